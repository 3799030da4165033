#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dfm/exact.hpp"
#include "dfm/model.hpp"

namespace dfm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Validation tolerances for the numerical model.
namespace tolerance {
inline constexpr double kUnitModulus = 1e-12;
inline constexpr double kOrthogonalityPerSize = 1e-9;  ///< multiplied by K
inline constexpr double kMagicSum = 1e-9;
inline constexpr double kProjection = 1e-10;
inline constexpr double kRankOneTrace = 1e-10;
inline constexpr double kRealTrace = 1e-9;
inline constexpr double kFlatFiber = 1e-12;
}  // namespace tolerance

/// Counter-based generator: the stream for (seed, index) is fixed, so per-sample
/// draws do not depend on thread scheduling. SplitMix64 mixing.
class PhaseStream {
public:
  PhaseStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform angle in [0, 2 pi).
  double next_angle();

private:
  std::uint64_t state_;
};

/// M x N matrix of unit-modulus entries Q_{ib}.
class PhaseMatrix {
public:
  PhaseMatrix(ModelParams params, ComplexMatrix entries);

  static PhaseMatrix flat(ModelParams params);
  /// One uniform angle per entry, row-major.
  static PhaseMatrix random(ModelParams params, PhaseStream& stream);

  ModelParams params() const noexcept { return params_; }
  const ComplexMatrix& entries() const noexcept { return entries_; }

  /// G_{ab} = <R_a, R_b> = sum_c Q_{ac} conj(Q_{bc}).
  ComplexMatrix gram() const;

private:
  ModelParams params_;
  ComplexMatrix entries_;
};

struct HadamardResiduals {
  double modulus = 0;         ///< max | |H_ij| - 1 |
  double orthogonality = 0;   ///< max | (H H^*)_{ij} - K delta_ij |
};

HadamardResiduals hadamard_residuals(const ComplexMatrix& h);

/// Square complex Hadamard matrix: unit-modulus entries, pairwise orthogonal rows.
class HadamardFiber {
public:
  /// Throws ValidationError when the invariants fail.
  explicit HadamardFiber(ComplexMatrix entries);

  Eigen::Index size() const noexcept { return entries_.rows(); }
  const ComplexMatrix& entries() const noexcept { return entries_; }

private:
  ComplexMatrix entries_;
};

/// (F_n)_{jk} = exp(2 pi i jk / n).
HadamardFiber fourier_matrix(unsigned n);

/// Deformed tensor product F_M (x)_Q F_N: entry ((i,a),(j,b)) = Q_{ib} (F_M)_{ij} (F_N)_{ab},
/// rows flattened as i*N + a and columns as j*N + b.
HadamardFiber dita_deform(const PhaseMatrix& q);

/// K x K array of rank-one projections U_{ij} = xi xi^* / K with xi = H_i / H_j.
/// Stored through the vectors xi; dense blocks are built on demand.
class MagicUnitary {
public:
  explicit MagicUnitary(ComplexMatrix factors);

  unsigned size() const noexcept { return size_; }
  /// xi for the pair (i, j); column i*K + j of factors().
  auto factor(unsigned i, unsigned j) const { return factors_.col(i * size_ + j); }
  const ComplexMatrix& factors() const noexcept { return factors_; }
  ComplexMatrix block(unsigned i, unsigned j) const;

private:
  unsigned size_;
  ComplexMatrix factors_;
};

MagicUnitary magic_unitary(const HadamardFiber& h);
/// Throws ValidationError unless `h` satisfies the Hadamard invariants.
MagicUnitary magic_unitary(const ComplexMatrix& h);

struct MagicResiduals {
  double row_sum = 0;      ///< max entry of |sum_j U_ij - 1|
  double column_sum = 0;   ///< max entry of |sum_i U_ij - 1|
  double idempotent = 0;   ///< max entry of |U^2 - U|
  double self_adjoint = 0; ///< max entry of |U - U^*|
  double trace = 0;        ///< max |Tr U - 1|
};

MagicResiduals magic_residuals(const MagicUnitary& u);

/// (T_p)_{I,J} = tr(U_{I_1 J_1} ... U_{I_p J_p}) with the normalized trace tr = Tr / K.
/// Multi-indices flattened big-endian: I = sum_y I_y K^{p-1-y}.
struct TransferMatrix {
  unsigned p = 0;
  unsigned size = 0;  ///< K
  ComplexMatrix entries;
};

TransferMatrix transfer_fiber(const MagicUnitary& u, unsigned p, const RunOptions& options = {});

/// Tr(T_1 T_2 ... T_r) by dense products.
Complex trace_of_product(std::span<const TransferMatrix> factors);

/// Tr(T_p(U^1) ... T_p(U^r)) for fibers of F_M (x)_Q F_N. Uses that U_{(i,a),(j,b)}
/// depends on a, b only through a - b: every T_p is block-circulant over Z_N^p and
/// the trace splits over the N^p characters into products of M^p x M^p blocks.
Complex deformed_transfer_trace(std::span<const MagicUnitary> fibers, ModelParams params, unsigned p);

struct McEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  double max_imag = 0;  ///< largest |Im| among the sampled traces
};

/// c_p^r as the mean of Tr(T_p(Q_1) ... T_p(Q_r)) over independent uniform Q_x.
/// Sample s draws Q_1..Q_r in order from PhaseStream(seed, s).
McEstimate mc_estimate_c(ModelParams params, unsigned p, unsigned r, std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& options = {});

/// delta_p(M, N) as the mean of (MN)^{-p} Tr(G(Q)^p), G the Gram matrix of the rows of Q.
McEstimate mc_estimate_delta(ModelParams params, unsigned p, std::uint64_t samples, std::uint64_t seed,
                             const RunOptions& options = {});

}  // namespace dfm
