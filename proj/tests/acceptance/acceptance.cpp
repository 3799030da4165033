// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dfm/asymptotics.hpp"
#include "dfm/limiting.hpp"
#include "dfm/matrix_model.hpp"
#include "dfm/truncated.hpp"

using namespace dfm;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> check;
};

// Records the first failure only; later ones rarely add information.
class Failures {
public:
  void require(bool cond, const std::string& what) {
    if (!cond && ok_) {
      ok_ = false;
      first_ = what;
    }
  }
  bool ok() const { return ok_; }
  Outcome outcome(std::string detail) const { return ok_ ? Outcome{true, std::move(detail)} : Outcome{false, first_}; }

private:
  bool ok_ = true;
  std::string first_;
};

std::string at(unsigned M, unsigned N, unsigned p, unsigned r = 0) {
  std::ostringstream s;
  s << "M=" << M << " N=" << N << " p=" << p;
  if (r) s << " r=" << r;
  return s.str();
}

ExactRatio inverse_power(unsigned base, unsigned e) {
  ExactRatio v(BigInt(1), ipow(base, e));
  v.canonicalize();
  return v;
}

Outcome small_p_identities() {
  Failures f;
  int checks = 0;
  for (unsigned M = 1; M <= 4; ++M)
    for (unsigned N = 1; N <= 4; ++N)
      for (unsigned r = 1; r <= 4; ++r)
        for (unsigned p = 1; p <= 3; ++p) {
          const ExactRatio d = count_d({M, N}, p, r);
          if (M == 1 || N == 1 || p == 1 || r == 1) f.require(d == 1, "d != 1 at " + at(M, N, p, r)), ++checks;
          if (p == 2) f.require(d == alpha({M, N}, 2, r), "d != alpha at " + at(M, N, p, r)), ++checks;
          if (p == 3)
            f.require(d == beta({M, N}, 3, r, delta_partition({M, N}, 3)), "d != beta at " + at(M, N, p, r)), ++checks;
        }
  return f.outcome(std::to_string(checks) + " exact identities");
}

Outcome d42_closed() {
  Failures f;
  for (unsigned M = 2; M <= 6; ++M)
    for (unsigned N = 2; N <= 5; ++N)
      f.require(count_d({M, N}, 4, 2) == d42_closed_form({M, N}), "mismatch at " + at(M, N, 4, 2));
  return f.outcome("20 grid points");
}

Outcome three_way_delta() {
  Failures f;
  for (unsigned M = 1; M <= 4; ++M)
    for (unsigned N = 1; N <= 4; ++N)
      for (unsigned p = 1; p <= 5; ++p)
        f.require(delta_direct({M, N}, p) == delta_partition({M, N}, p), "direct != partition at " + at(M, N, p));
  for (unsigned N = 1; N <= 4; ++N)
    for (unsigned p = 1; p <= 6; ++p) {
      const auto b = delta_m2_binomial(N, p);
      f.require(b == delta_direct({2, N}, p), "binomial != direct at " + at(2, N, p));
      f.require(b == delta_partition({2, N}, p), "binomial != partition at " + at(2, N, p));
    }
  return f.outcome("80 + 24 comparisons");
}

Outcome decomposition() {
  Failures f;
  for (unsigned M = 2; M <= 4; ++M)
    for (unsigned N = 2; N <= 4; ++N)
      for (unsigned p = 1; p <= 5; ++p) {
        const auto rep = decompose({M, N}, p);
        ExactRatio sum = 0;
        for (unsigned s = 1; s <= rep.contributions.rows(); ++s)
          for (unsigned t = 1; t <= rep.contributions.cols(); ++t) sum += rep.contributions.at(s, t);
        f.require(sum == delta_direct({M, N}, p), "table sum != delta at " + at(M, N, p));
        f.require(rep.row_sum(1) == inverse_power(M, p - 1), "row 1 at " + at(M, N, p));
        f.require(rep.column_sum(1) == inverse_power(N, p - 1), "column 1 at " + at(M, N, p));
      }
  return f.outcome("45 tables");
}

Outcome epsilon_monotone() {
  Failures f;
  for (unsigned p = 1; p <= 6; ++p) {
    const auto e = epsilon_table(p);
    for (unsigned s = 1; s <= p; ++s)
      for (unsigned t = 1; t <= p; ++t) {
        if (s > 1) f.require(e.at(s, t) <= e.at(s - 1, t), "increase in s at p=" + std::to_string(p));
        if (t > 1) f.require(e.at(s, t) <= e.at(s, t - 1), "increase in t at p=" + std::to_string(p));
      }
  }
  return f.outcome("p <= 6");
}

Outcome convergence() {
  Failures f;
  const ExactRatio delta = delta_partition({2, 2}, 4);
  for (unsigned r = 2; r <= 8; ++r) {
    const ExactRatio gap = count_d({2, 2}, 4, r) - delta;
    f.require(gap >= 0, "negative gap at r=" + std::to_string(r));
    f.require(gap <= inverse_power(2, r - 1), "gap above 2^{1-r} at r=" + std::to_string(r));
  }
  std::uint64_t failing = 0;
  MultisetScratch scratch;
  for (unsigned M = 1; M <= 3; ++M)
    for (unsigned N = 1; N <= 3; ++N)
      for (unsigned p = 1; p <= 3; ++p) {
        std::vector<unsigned> a(p, 0), b(p, 0);
        // odometer over (a, b)
        while (true) {
          if (!base_condition(a, b, {M, N}, scratch)) {
            ++failing;
            const ExactRatio share(BigInt(static_cast<unsigned long>(solution_set(a, b, {M, N}).size())), BigInt(M));
            ExactRatio bound = 1;
            for (unsigned r = 1; r <= 4; ++r) {
              f.require(index_fraction(a, b, {M, N}, r) <= bound, "K above (|S|/M)^{r-1} at " + at(M, N, p, r));
              bound *= share;
            }
          }
          unsigned k = 0;
          for (; k < 2 * p; ++k) {
            unsigned& digit = k < p ? a[k] : b[k - p];
            if (++digit < (k < p ? M : N)) break;
            digit = 0;
          }
          if (k == 2 * p) break;
        }
      }
  return f.outcome("gap bound r=2..8; " + std::to_string(failing) + " base-failing (a,b) checked");
}

Outcome monte_carlo() {
  Failures f;
  const std::uint64_t seeds[2] = {20261015, 977};
  // the 3x3 cells exceed the default operation budget
  const RunOptions options{10'000'000'000ULL, 0};
  int retries = 0;
  double worst = 0;
  double max_imag = 0;
  auto within = [&](auto estimate, double exact) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const McEstimate e = estimate(seeds[attempt]);
      max_imag = std::max(max_imag, e.max_imag);
      const double diff = std::abs(e.mean - exact);
      // deterministic cells (p = 1, M = 1) reproduce the exact value up to rounding
      const double z = diff <= 1e-12 * std::max(1.0, exact) ? 0.0 : (e.std_error > 0 ? diff / e.std_error : INFINITY);
      if (z <= 3) {
        worst = std::max(worst, z);
        return true;
      }
      ++retries;
    }
    return false;
  };
  for (unsigned M = 2; M <= 3; ++M)
    for (unsigned N = 2; N <= 3; ++N)
      for (unsigned p = 1; p <= 3; ++p) {
        for (unsigned r = 1; r <= 3; ++r) {
          const double exact = to_double(c_from_d(count_d({M, N}, p, r), {M, N}, p));
          f.require(within([&](std::uint64_t s) { return mc_estimate_c({M, N}, p, r, 2000, s, options); }, exact),
                    "model estimate off at " + at(M, N, p, r));
        }
        const double exact = to_double(delta_partition({M, N}, p));
        f.require(within([&](std::uint64_t s) { return mc_estimate_delta({M, N}, p, 5000, s, options); }, exact),
                  "gram estimate off at " + at(M, N, p));
      }
  f.require(max_imag < tolerance::kRealTrace, "sampled trace not real");
  char buf[160];
  std::snprintf(buf, sizeof buf, "48 cells, max |z| %.2f, %d retries, max |Im Tr| %.1e", worst, retries, max_imag);
  return f.outcome(buf);
}

Outcome magic_validation() {
  Failures f;
  const std::vector<ModelParams> shapes{{1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2},
                                        {3, 4}, {4, 3}, {4, 4}, {2, 8}, {8, 2}, {3, 5}, {5, 3}};
  double worst_sum = 0, worst_proj = 0, worst_flat = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    for (const auto& mp : shapes) {
      PhaseStream stream(seed, 0);
      const auto h = dita_deform(PhaseMatrix::random(mp, stream));
      const auto hr = hadamard_residuals(h.entries());
      const double K = mp.M * mp.N;
      f.require(hr.modulus < tolerance::kUnitModulus, "modulus residual");
      f.require(hr.orthogonality < tolerance::kOrthogonalityPerSize * K, "orthogonality residual");
      const auto r = magic_residuals(magic_unitary(h));
      worst_sum = std::max({worst_sum, r.row_sum, r.column_sum});
      worst_proj = std::max({worst_proj, r.idempotent, r.self_adjoint, r.trace});
      f.require(r.row_sum < tolerance::kMagicSum && r.column_sum < tolerance::kMagicSum, "row/column sums");
      f.require(r.idempotent < tolerance::kProjection && r.self_adjoint < tolerance::kProjection, "projection");
      f.require(r.trace < tolerance::kRankOneTrace, "rank-one trace");
    }
  for (const auto& mp : shapes) {
    const auto flat = dita_deform(PhaseMatrix::flat(mp)).entries();
    const auto fm = fourier_matrix(mp.M).entries(), fn = fourier_matrix(mp.N).entries();
    for (unsigned i = 0; i < mp.M; ++i)
      for (unsigned a = 0; a < mp.N; ++a)
        for (unsigned j = 0; j < mp.M; ++j)
          for (unsigned b = 0; b < mp.N; ++b)
            worst_flat = std::max(worst_flat, std::abs(flat(i * mp.N + a, j * mp.N + b) - fm(i, j) * fn(a, b)));
  }
  f.require(worst_flat < tolerance::kFlatFiber, "flat fiber differs from the tensor product");
  char buf[160];
  std::snprintf(buf, sizeof buf, "sums %.1e, projections %.1e, flat %.1e", worst_sum, worst_proj, worst_flat);
  return f.outcome(buf);
}

Outcome richmond_shallit_ratio() {
  Failures f;
  const double r2 = moment_integral_float(2, 5000) / richmond_shallit(2, 5000);
  const double r3 = to_double(moment_integral(3, 500)) / richmond_shallit(3, 500);
  f.require(std::abs(r2 - 1) < 0.01, "N=2 ratio " + std::to_string(r2));
  f.require(std::abs(r3 - 1) < 0.05, "N=3 ratio " + std::to_string(r3));
  char buf[96];
  std::snprintf(buf, sizeof buf, "ratios %.6f (N=2), %.6f (N=3)", r2, r3);
  return f.outcome(buf);
}

Outcome decay_profile() {
  Failures f;
  const unsigned p = 10000;
  const double r2 = delta_m2_float(2, p) / (2.0 / std::sqrt(std::numbers::pi * p));
  const double r3 = delta_m2_float(3, p) / decay_estimate(3, p);
  f.require(std::abs(r2 - 1) < 0.03, "N=2 ratio " + std::to_string(r2));
  f.require(std::abs(r3 - 1) < 0.10, "N=3 ratio " + std::to_string(r3));
  char buf[96];
  std::snprintf(buf, sizeof buf, "ratios %.6f (N=2), %.6f (N=3)", r2, r3);
  return f.outcome(buf);
}

Outcome free_poisson_regime() {
  Failures f;
  const std::vector<unsigned> ladder{4, 8, 16};
  for (unsigned t = 1; t <= 2; ++t)
    for (unsigned p = 2; p <= 5; ++p) {
      const auto rep = regime_check(t, p, ladder);
      f.require(rep.strictly_decreasing(), "relative error not decreasing at t=" + std::to_string(t) +
                                               " p=" + std::to_string(p));
      ExactRatio prev = -1;
      for (const auto& row : rep.rows) {
        ExactRatio gap = abs(row.chi_moment - row.chi_limit) / row.chi_limit;
        f.require(prev < 0 || gap < prev, "chi/N moment not approaching the limit");
        prev = gap;
      }
    }
  return f.outcome("t in {1,2}, p = 2..5, N = 4, 8, 16");
}

Outcome decay_to_zero() {
  Failures f;
  for (unsigned M = 2; M <= 3; ++M)
    for (unsigned N = 2; N <= 3; ++N) {
      const ExactRatio d1 = delta_partition({M, N}, 1);
      const ExactRatio d9 = delta_partition({M, N}, 9);
      f.require(d9 < d1 / 2, "delta_9 not below delta_1 / 2 at " + at(M, N, 9));
      for (unsigned p = 2; p <= 9; ++p)
        f.require(delta_partition({M, N}, p) <= delta_upper_bound({M, N}, p), "bound violated at " + at(M, N, p));
    }
  return f.outcome("M, N in {2,3}, p = 2..9");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact small-p identities", 60, small_p_identities},
      {2, "closed form for d_4^2", 300, d42_closed},
      {3, "three-way delta agreement", 120, three_way_delta},
      {4, "delta decomposition table", 60, decomposition},
      {5, "epsilon monotonicity", 60, epsilon_monotone},
      {6, "convergence of d_p^r to delta_p", 180, convergence},
      {7, "Monte Carlo oracles", 300, monte_carlo},
      {8, "magic unitary validation", 30, magic_validation},
      {9, "Richmond-Shallit estimate", 60, richmond_shallit_ratio},
      {10, "decay profile at M = 2", 120, decay_profile},
      {11, "free Poisson regime", 60, free_poisson_regime},
      {12, "decay to zero and upper bound", 120, decay_to_zero},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.limit_seconds) o = {false, "took longer than " + std::to_string(c.limit_seconds) + " s"};
    failed += !o.ok;
    std::printf("%s criterion %2d  %-34s %8.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.title, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
