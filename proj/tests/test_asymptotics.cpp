#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dfm/asymptotics.hpp"
#include "dfm/error.hpp"
#include "dfm/limiting.hpp"
#include "dfm/partition.hpp"
#include "oracles.hpp"

using namespace dfm;

TEST_CASE("Stirling polynomials") {
  CHECK(stirling_polynomial(1).coefficients == std::vector<BigInt>{0, 1});
  CHECK(stirling_polynomial(3).coefficients == std::vector<BigInt>{0, 1, 3, 1});
  CHECK(stirling_polynomial(4).evaluate(1) == 14);
  for (unsigned p = 1; p <= 10; ++p) {
    const auto s = stirling_polynomial(p);
    CHECK(s.coefficient_sum() == oracle::catalan(p));
    for (unsigned k = 1; k <= p; ++k) CHECK(s.coefficients[k] == s.coefficients[p + 1 - k]);
  }
  CHECK_THROWS_AS(stirling_polynomial(0), ParameterError);
  CHECK_THROWS_AS(stirling_polynomial(kMaxStirlingDegree + 1), ParameterError);
}

TEST_CASE("block-count profile matches enumeration and the Kreweras pairing") {
  for (unsigned p = 1; p <= 9; ++p) {
    std::vector<BigInt> counts(p + 1, 0), complement(p + 1, 0);
    auto stream = enumerate_partitions(p);
    while (auto pi = stream.next()) {
      if (!is_noncrossing(*pi)) continue;
      counts[pi->block_count()] += 1;
      complement[kreweras_complement(*pi).block_count()] += 1;
    }
    const auto s = stirling_polynomial(p);
    CHECK(s.coefficients == counts);
    for (unsigned k = 1; k <= p; ++k) CHECK(complement[p + 1 - k] == counts[k]);
  }
}

TEST_CASE("free Poisson moments") {
  CHECK(free_poisson_moment(ExactRatio(3, 7), 1) == ExactRatio(3, 7));
  CHECK(free_poisson_moment(1, 4) == 14);
  CHECK(free_poisson_moment(2, 3) == 22);
  CHECK(free_poisson_moment(ExactRatio(1, 2), 2) == ExactRatio(3, 4));
  CHECK_THROWS_AS(free_poisson_moment(0, 2), ParameterError);
}

TEST_CASE("regime check") {
  const auto trivial = regime_check(1, 1, {3, 6});
  for (const auto& row : trivial.rows) {
    CHECK(row.exact == 1);
    CHECK(row.predicted == 1);
    CHECK(row.relative_error == 0);
  }

  const auto r13 = regime_check(1, 3, {4, 8, 16});
  CHECK(r13.strictly_decreasing());
  CHECK(r13.rows[0].M == 4);
  CHECK(r13.rows[0].exact == delta_partition({4, 4}, 3));

  const auto r24 = regime_check(2, 4, {3, 6, 12});
  CHECK(r24.rows[2].M == 24);
  CHECK(r24.strictly_decreasing());
  for (const auto& row : r24.rows) {
    CHECK(row.chi_moment * row.N == row.exact * ExactRatio(BigInt(row.M) * row.M * row.M));
    CHECK(row.chi_limit * row.M == free_poisson_moment(2, 4));
  }

  CHECK(regime_check(ExactRatio(1, 2), 3, {4, 8}).rows[1].M == 4);
  CHECK_THROWS_AS(regime_check(ExactRatio(1, 3), 3, {4}), ParameterError);
  CHECK_THROWS_AS(regime_check(1, 3, {0}), ParameterError);
}

TEST_CASE("regime check is thread-count invariant") {
  const auto a = regime_check(1, 4, {2, 4, 8}, {kDefaultBudget, 1});
  const auto b = regime_check(1, 4, {2, 4, 8}, {kDefaultBudget, 3});
  for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].relative_error == b.rows[k].relative_error);
}

TEST_CASE("large-argument estimates") {
  for (unsigned k : {1u, 10u, 1000u}) CHECK(richmond_shallit(1, k) == doctest::Approx(1.0));
  for (unsigned p : {1u, 50u}) CHECK(decay_estimate(1, p) == doctest::Approx(1.0));
  for (unsigned p : {10u, 10000u})
    CHECK(decay_estimate(2, p) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi * p)).epsilon(1e-12));

  const double rs2 = moment_integral_float(2, 5000) / richmond_shallit(2, 5000);
  CHECK(std::abs(rs2 - 1) < 0.01);
  const double rs3 = to_double(moment_integral(3, 500)) / richmond_shallit(3, 500);
  CHECK(std::abs(rs3 - 1) < 0.05);
  CHECK(std::abs(delta_m2_float(2, 10000) / decay_estimate(2, 10000) - 1) < 0.03);
  CHECK_THROWS_AS(richmond_shallit(0, 3), ParameterError);
  CHECK_THROWS_AS(decay_estimate(2, 0), ParameterError);
}
