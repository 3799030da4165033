#pragma once

#include <cstdint>
#include <vector>

#include "dfm/exact.hpp"
#include "dfm/model.hpp"

namespace dfm {

/// Rectangular table of exact values indexed from 1: at(s, t), 1 <= s <= rows.
class RatioTable {
public:
  RatioTable() = default;
  RatioTable(unsigned rows, unsigned cols) : rows_(rows), cols_(cols), cells_(std::size_t{rows} * cols) {}

  unsigned rows() const noexcept { return rows_; }
  unsigned cols() const noexcept { return cols_; }
  ExactRatio& at(unsigned s, unsigned t) { return cells_[index(s, t)]; }
  const ExactRatio& at(unsigned s, unsigned t) const { return cells_[index(s, t)]; }

private:
  std::size_t index(unsigned s, unsigned t) const;

  unsigned rows_ = 0;
  unsigned cols_ = 0;
  std::vector<ExactRatio> cells_;
};

/// Number of pairs (pi, sigma) with |pi| = s, |sigma| = t and pi |> sigma,
/// for s <= max_s, t <= max_t. Entry (s, t) at index [s-1][t-1].
struct TriangleCounts {
  unsigned p = 0;
  unsigned max_s = 0;
  unsigned max_t = 0;
  std::vector<std::vector<std::uint64_t>> pairs;
};

TriangleCounts triangle_counts(unsigned p, unsigned max_s, unsigned max_t, const RunOptions& options = {});

/// delta_p(M, N) by enumerating (a, b) in Z_M^p x Z_N^p against the base condition.
ExactRatio delta_direct(ModelParams params, unsigned p, const RunOptions& options = {});

/// delta_p(M, N) as (MN)^{-p} sum over pi |> sigma of (M)_{|pi|} (N)_{|sigma|}.
/// Only partitions with |pi| <= M and |sigma| <= N are scanned; the others carry
/// a vanishing falling factorial.
ExactRatio delta_partition(ModelParams params, unsigned p, const RunOptions& options = {});

/// Probability that pi |> sigma for uniform pi with s blocks and sigma with t blocks.
ExactRatio epsilon(unsigned p, unsigned s, unsigned t, const RunOptions& options = {});

/// epsilon(p, s, t) for all 1 <= s, t <= p from a single pair scan.
RatioTable epsilon_table(unsigned p, const RunOptions& options = {});

struct DecompositionReport {
  ModelParams params;
  unsigned p = 0;
  RatioTable contributions;  ///< delta_p^{st}, s <= min(p, M), t <= min(p, N)
  RatioTable epsilon;        ///< epsilon_p(s, t) on the same index range
  ExactRatio total;

  ExactRatio row_sum(unsigned s) const;
  ExactRatio column_sum(unsigned t) const;
  /// Sum of the contributions with s >= 2 and t >= 2.
  ExactRatio interior_sum() const;
};

DecompositionReport decompose(ModelParams params, unsigned p, const RunOptions& options = {});

/// 1/M^{p-1} + 1/N^{p-1} - 1/(MN)^{p-1}: the part of delta_p from s = 1 or t = 1.
ExactRatio boundary_contribution(ModelParams params, unsigned p);

enum class MomentAlgorithm { automatic, compositions, convolution };

/// N^{-2k} sum over compositions r of k into N parts of multinomial(k; r)^2, i.e.
/// the 2k-th moment of |q_1 + ... + q_N| / N for independent uniform phases.
ExactRatio moment_integral(unsigned N, unsigned k, const RunOptions& options = {},
                           MomentAlgorithm algorithm = MomentAlgorithm::automatic);

/// moment_integral(N, k) for k = 0..k_max.
std::vector<ExactRatio> moment_integral_table(unsigned N, unsigned k_max, const RunOptions& options = {});

/// delta_p(2, N) = 2^{1-p} sum_k C(p, 2k) moment_integral(N, k).
ExactRatio delta_m2_binomial(unsigned N, unsigned p, const RunOptions& options = {});

/// Floating moment_integral(N, k), evaluated in log space.
double moment_integral_float(unsigned N, unsigned k);

/// Floating delta_p(2, N) for large p (up to 10^6). Log-gamma weights,
/// negligible binomial tails dropped, compensated summation in descending order.
/// Cost is O(p) for N <= 2 and O(N p^2) otherwise.
double delta_m2_float(unsigned N, unsigned p);

/// 1 - (1 - M^{1-p})(1 - N^{1-p})(1 - epsilon_p(2, 2)); needs M, N >= 2 and p >= 2.
ExactRatio delta_upper_bound(ModelParams params, unsigned p, const RunOptions& options = {});

}  // namespace dfm
