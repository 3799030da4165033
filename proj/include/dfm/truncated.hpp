#pragma once

#include <vector>

#include "dfm/exact.hpp"
#include "dfm/model.hpp"

namespace dfm {

/// True iff pair_condition holds for (i_x, i_{x+1}) at every x, cyclically mod r.
bool truncation_condition(const IndexConfig& cfg, ModelParams params);

/// Estimated operation count of count_d; compared against RunOptions::budget.
long double count_d_cost(ModelParams params, unsigned p, unsigned r);

/// d_p^r(M, N): fraction of (i, a, b) in Z_M^r x Z_M^p x Z_N^p satisfying the
/// truncation condition, by exhaustive enumeration. The outer loop runs over
/// (a, b); i_1 is pinned to 0 using translation invariance.
ExactRatio count_d(ModelParams params, unsigned p, unsigned r, const RunOptions& options = {});

/// c_p^r = (MN)^{p-1} d_p^r.
ExactRatio c_from_d(const ExactRatio& d, ModelParams params, unsigned p);

/// Contribution of configurations where one of i, a, b is constant:
/// 1 - (M^p - M)(M^r - M)(N^p - N) / (M^{p+r} N^p).
ExactRatio alpha(ModelParams params, unsigned p, unsigned r);

/// delta + (1 - delta) / M^{r-1}, where delta is the limiting moment delta_p(M, N).
ExactRatio beta(ModelParams params, unsigned p, unsigned r, const ExactRatio& delta);

/// d_4^2(M, N) = beta_4^2 + [M even] (M - 2)(N - 1) / (M^4 N^3).
ExactRatio d42_closed_form(ModelParams params, const RunOptions& options = {});

/// Residues i in Z_M with
///   [(i + a_y, b_y)] + [(a_y, b_{y+1})] == [(i + a_y, b_{y+1})] + [(a_y, b_y)].
/// Always contains 0; sorted ascending.
std::vector<unsigned> solution_set(Residues a, Residues b, ModelParams params);

/// K_p^r(a, b): fraction of i in Z_M^r for which the truncation condition holds
/// at every x (cyclic), for fixed (a, b).
ExactRatio index_fraction(Residues a, Residues b, ModelParams params, unsigned r,
                          const RunOptions& options = {});

}  // namespace dfm
