#pragma once

#include <vector>

#include "dfm/exact.hpp"
#include "dfm/model.hpp"

namespace dfm {

inline constexpr unsigned kMaxStirlingDegree = 4096;

/// Block-count profile of the non-crossing partitions of p points:
/// coefficients[k] = #NC(p) with k blocks (Narayana numbers), k = 0..p.
struct StirlingPolynomial {
  unsigned p = 0;
  std::vector<BigInt> coefficients;

  ExactRatio evaluate(const ExactRatio& t) const;
  /// Catalan number C_p.
  BigInt coefficient_sum() const;
};

StirlingPolynomial stirling_polynomial(unsigned p);

/// p-th moment of the free Poisson law with rate t, i.e. S_p(t).
ExactRatio free_poisson_moment(const ExactRatio& t, unsigned p);

struct RegimeRow {
  unsigned N = 0;
  unsigned M = 0;
  unsigned p = 0;
  ExactRatio exact;           ///< delta_p(M, N)
  ExactRatio predicted;       ///< S_p(t) M^{-p} N
  ExactRatio relative_error;  ///< |exact - predicted| / predicted
  ExactRatio chi_moment;      ///< M^{p-1} delta_p / N
  ExactRatio chi_limit;       ///< S_p(t) / M
};

struct RegimeReport {
  ExactRatio t;
  unsigned p = 0;
  std::vector<RegimeRow> rows;

  /// Relative errors strictly decrease down the rows.
  bool strictly_decreasing() const;
};

/// Compares delta_p(tN, N) with the free Poisson prediction for each N.
/// Throws ParameterError when some t N is not a positive integer.
RegimeReport regime_check(const ExactRatio& t, unsigned p, const std::vector<unsigned>& N_values,
                          const RunOptions& options = {});

/// sqrt(N^N / (4 pi k)^{N-1}), the large-k profile of
/// N^{-2k} sum_r multinomial(k; r)^2.
double richmond_shallit(unsigned N, unsigned k);

/// sqrt(N^N / (pi p)^{N-1}), the large-p profile of delta_p(2, N).
double decay_estimate(unsigned N, unsigned p);

}  // namespace dfm
