#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dfm/error.hpp"
#include "dfm/limiting.hpp"
#include "dfm/truncated.hpp"
#include "oracles.hpp"

using namespace dfm;

namespace {

ExactRatio q(long num, long den) {
  ExactRatio v(num, den);
  v.canonicalize();
  return v;
}

std::vector<unsigned> random_residues(std::mt19937& gen, unsigned len, unsigned modulus) {
  std::uniform_int_distribution<unsigned> dist(0, modulus - 1);
  std::vector<unsigned> v(len);
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("truncation condition") {
  const ModelParams mp{3, 2};
  IndexConfig cfg{{1, 1, 1}, {0, 2, 1}, {1, 0, 0}};
  CHECK(truncation_condition(cfg, mp));  // equal i
  cfg = {{0, 2, 1}, {2, 2, 2}, {1, 0, 1}};
  CHECK(truncation_condition(cfg, mp));  // constant a
  cfg = {{0, 2, 1}, {0, 1, 2}, {1, 1, 1}};
  CHECK(truncation_condition(cfg, mp));  // constant b
  CHECK_FALSE(truncation_condition({{0, 1}, {0, 1}, {0, 1}}, {2, 2}));
  CHECK_THROWS_AS(truncation_condition({{0, 3}, {0, 1}, {0, 1}}, {2, 2}), ParameterError);
}

TEST_CASE("count_d against the literal oracle") {
  for (unsigned M = 1; M <= 3; ++M)
    for (unsigned N = 1; N <= 3; ++N)
      for (unsigned p = 1; p <= 3; ++p)
        for (unsigned r = 1; r <= 3; ++r) {
          CAPTURE(M);
          CAPTURE(N);
          CAPTURE(p);
          CAPTURE(r);
          CHECK(count_d({M, N}, p, r) == oracle::brute_d(M, N, p, r));
        }
  CHECK(count_d({2, 2}, 4, 2) == oracle::brute_d(2, 2, 4, 2));
  CHECK(count_d({2, 3}, 4, 3) == oracle::brute_d(2, 3, 4, 3));
}

TEST_CASE("frozen values") {
  CHECK(count_d({2, 2}, 3, 2) == q(13, 16));
  CHECK(count_d({4, 3}, 4, 2) == q(1343, 3456));
  CHECK(count_d({2, 2}, 4, 2) == q(99, 128));
  CHECK(count_d({2, 2}, 4, 3) == q(169, 256));
  CHECK(c_from_d(count_d({2, 2}, 2, 2), {2, 2}, 2) == q(7, 2));
}

TEST_CASE("count_d is thread-count invariant") {
  const auto ref = count_d({3, 2}, 4, 3, {kDefaultBudget, 1});
  CHECK(count_d({3, 2}, 4, 3, {kDefaultBudget, 3}) == ref);
  CHECK(count_d({3, 2}, 4, 3, {kDefaultBudget, 7}) == ref);
}

TEST_CASE("trivial regimes") {
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned r = 1; r <= 3; ++r) {
      CHECK(count_d({1, 4}, p, r) == 1);
      CHECK(count_d({3, 1}, p, r) == 1);
    }
  for (unsigned p = 1; p <= 4; ++p) CHECK(count_d({3, 3}, p, 1) == 1);
  CHECK(c_from_d(1, {2, 2}, 3) == 16);
  CHECK(c_from_d(q(3, 7), {2, 5}, 1) == q(3, 7));
  for (unsigned r = 1; r <= 4; ++r) CHECK(c_from_d(count_d({3, 2}, 1, r), {3, 2}, 1) == 1);
}

TEST_CASE("argument checks and budget") {
  CHECK_THROWS_AS(count_d({2, 2}, 0, 2), ParameterError);
  CHECK_THROWS_AS(count_d({2, 2}, 2, 0), ParameterError);
  CHECK_THROWS_AS(count_d({0, 2}, 2, 2), ParameterError);
  CHECK_THROWS_AS(alpha({2, 2}, 0, 1), ParameterError);
  try {
    count_d({4, 4}, 6, 6);
    FAIL("expected a budget error");
  } catch (const BudgetError& e) {
    CHECK(e.estimated_ops() > e.budget());
    CHECK(std::string(e.what()).find("count_d") != std::string::npos);
  }
  CHECK_THROWS_AS(count_d({3, 3}, 3, 3, {1000, 1}), BudgetError);
}

TEST_CASE("alpha and beta") {
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned r = 1; r <= 4; ++r) CHECK(alpha({1, 3}, p, r) == 1);
  for (unsigned p = 1; p <= 4; ++p) CHECK(alpha({3, 3}, p, 1) == 1);
  for (unsigned p = 1; p <= 4; ++p) CHECK(beta({3, 2}, p, 1, q(1, 5)) == 1);

  for (unsigned M = 1; M <= 4; ++M)
    for (unsigned N = 1; N <= 4; ++N)
      for (unsigned r = 1; r <= 4; ++r) CHECK(alpha({M, N}, 2, r) == count_d({M, N}, 2, r));
  for (unsigned M = 1; M <= 3; ++M)
    for (unsigned N = 1; N <= 3; ++N)
      for (unsigned r = 1; r <= 4; ++r)
        CHECK(beta({M, N}, 3, r, delta_partition({M, N}, 3)) == count_d({M, N}, 3, r));
}

TEST_CASE("ordering alpha <= beta <= d <= 1 and d >= delta") {
  for (unsigned M = 1; M <= 4; ++M)
    for (unsigned N = 1; N <= 4; ++N)
      for (unsigned p = 1; p <= 5; ++p) {
        const ExactRatio delta = delta_partition({M, N}, p);
        for (unsigned r = 1; r <= 4; ++r) {
          if (count_d_cost({M, N}, p, r) > 2e7) continue;
          CAPTURE(M);
          CAPTURE(N);
          CAPTURE(p);
          CAPTURE(r);
          const auto a = alpha({M, N}, p, r);
          const auto b = beta({M, N}, p, r, delta);
          const auto d = count_d({M, N}, p, r);
          CHECK(0 <= a);
          CHECK(a <= b);
          CHECK(b <= d);
          CHECK(d <= 1);
          CHECK(d >= delta);
        }
      }
}

TEST_CASE("closed form at p = 4, r = 2") {
  for (unsigned M = 2; M <= 4; ++M)
    for (unsigned N = 2; N <= 4; ++N) CHECK(d42_closed_form({M, N}) == count_d({M, N}, 4, 2));
  for (unsigned N = 2; N <= 4; ++N) {
    CHECK(d42_closed_form({3, N}) == beta({3, N}, 4, 2, delta_partition({3, N}, 4)));
    CHECK(d42_closed_form({2, N}) == beta({2, N}, 4, 2, delta_partition({2, N}, 4)));
  }
}

TEST_CASE("solution set") {
  MultisetScratch scratch;
  for (unsigned M = 1; M <= 4; ++M)
    for (unsigned N = 1; N <= 4; ++N)
      for (unsigned p = 1; p <= (M * N > 9 ? 3u : 4u); ++p)
        oracle::for_each_tuple(p, M, [&](const std::vector<unsigned>& a) {
          oracle::for_each_tuple(p, N, [&](const std::vector<unsigned>& b) {
            const auto s = solution_set(a, b, {M, N});
            REQUIRE(!s.empty());
            CHECK(s.front() == 0);
            const bool base = base_condition(a, b, {M, N}, scratch);
            CHECK(base == oracle::base_holds(a, b, 1));
            CHECK((s.size() == M) == base);
          });
        });
  const std::vector<unsigned> a{1, 1, 1}, b{0, 1, 0};
  CHECK(solution_set(a, b, {3, 2}).size() == 3);
}

TEST_CASE("index fraction") {
  std::mt19937 gen(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned M = 2 + trial % 3, N = 2 + (trial / 3) % 2, p = 2 + trial % 3, r = 1 + trial % 4;
    const auto a = random_residues(gen, p, M);
    const auto b = random_residues(gen, p, N);
    const auto k = index_fraction(a, b, {M, N}, r);
    const auto s = solution_set(a, b, {M, N});
    MultisetScratch scratch;
    if (base_condition(a, b, {M, N}, scratch)) {
      CHECK(k == 1);
    } else {
      ExactRatio bound = 1;
      for (unsigned x = 1; x < r; ++x) bound *= q(static_cast<long>(s.size()), M);
      CHECK(k <= bound);
      if (p <= 3) {
        ExactRatio expect = 1;
        for (unsigned x = 1; x < r; ++x) expect /= M;
        CHECK(k == expect);
      }
    }
  }
}

TEST_CASE("d_4^r - beta_4^r at M = N = 2 decays at least like 2^{1-r}") {
  const ExactRatio delta = delta_partition({2, 2}, 4);
  for (unsigned r = 2; r <= 8; ++r) {
    const ExactRatio gap = count_d({2, 2}, 4, r) - beta({2, 2}, 4, r, delta);
    CHECK(gap >= 0);
    ExactRatio bound = 1;
    for (unsigned x = 1; x < r; ++x) bound /= 2;
    CHECK(gap <= bound);
  }
}
