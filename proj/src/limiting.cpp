#include "dfm/limiting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "dfm/error.hpp"
#include "dfm/parallel.hpp"
#include "dfm/partition.hpp"

namespace dfm {

std::size_t RatioTable::index(unsigned s, unsigned t) const {
  if (s == 0 || t == 0 || s > rows_ || t > cols_)
    throw ParameterError("table index (" + std::to_string(s) + ", " + std::to_string(t) + ") out of range");
  return std::size_t{s - 1} * cols_ + (t - 1);
}

namespace {

void check_p(unsigned p) {
  if (p == 0) throw ParameterError("p must be at least 1");
}

struct PartitionMasks {
  unsigned blocks;
  std::vector<BlockMask> masks;
  std::vector<BlockMask> shifted;
};

std::vector<PartitionMasks> partition_masks(unsigned p, unsigned max_blocks) {
  std::vector<PartitionMasks> out;
  auto stream = enumerate_partitions(p, max_blocks);
  while (auto pi = stream.next()) {
    PartitionMasks entry{static_cast<unsigned>(pi->block_count()), {}, {}};
    for (BlockMask m : pi->masks()) {
      entry.masks.push_back(m);
      entry.shifted.push_back(shift_block(m, p));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

bool related(const PartitionMasks& pi, const PartitionMasks& sigma) {
  for (std::size_t i = 0; i < pi.masks.size(); ++i)
    for (BlockMask gamma : sigma.masks)
      if (std::popcount(pi.masks[i] & gamma) != std::popcount(pi.shifted[i] & gamma)) return false;
  return true;
}

long double partitions_up_to(const std::vector<BigInt>& stirling, unsigned max_blocks) {
  long double total = 0;
  for (unsigned s = 1; s <= max_blocks && s < stirling.size(); ++s) total += stirling[s].get_d();
  return total;
}

}  // namespace

TriangleCounts triangle_counts(unsigned p, unsigned max_s, unsigned max_t, const RunOptions& options) {
  check_p(p);
  if (p > kMaxGroundSet) throw ParameterError("p exceeds the partition cap of " + std::to_string(kMaxGroundSet));
  max_s = std::clamp(max_s, 1U, p);
  max_t = std::clamp(max_t, 1U, p);
  const auto stirling = stirling_row(p);
  check_budget(partitions_up_to(stirling, max_s) * partitions_up_to(stirling, max_t), options, "partition pair scan");

  const auto pis = partition_masks(p, max_s);
  const auto sigmas = max_t == max_s ? pis : partition_masks(p, max_t);

  const unsigned workers = resolve_threads(options.threads);
  using Table = std::vector<std::vector<std::uint64_t>>;
  std::vector<Table> partial(workers, Table(max_s, std::vector<std::uint64_t>(max_t, 0)));
  parallel_for_chunks(workers, workers, [&](std::uint64_t wb, std::uint64_t we) {
    for (std::uint64_t w = wb; w < we; ++w) {
      auto& table = partial[w];
      const std::size_t begin = pis.size() * w / workers;
      const std::size_t end = pis.size() * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i)
        for (const auto& sigma : sigmas)
          if (related(pis[i], sigma)) ++table[pis[i].blocks - 1][sigma.blocks - 1];
    }
  });

  TriangleCounts counts{p, max_s, max_t, Table(max_s, std::vector<std::uint64_t>(max_t, 0))};
  for (const auto& table : partial)
    for (unsigned s = 0; s < max_s; ++s)
      for (unsigned t = 0; t < max_t; ++t) counts.pairs[s][t] += table[s][t];
  return counts;
}

ExactRatio delta_direct(ModelParams params, unsigned p, const RunOptions& options) {
  params.validate();
  check_p(p);
  const long double configs = pow_estimate(static_cast<long double>(params.M) * params.N, p);
  check_budget(configs * p, options, "delta_direct");

  const unsigned M = params.M;
  const unsigned N = params.N;
  const std::uint64_t total = ipow(static_cast<unsigned long>(M) * N, p).get_ui();
  const std::uint64_t hits = parallel_count(total, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<unsigned> a(p), b(p);
    MultisetScratch scratch;
    std::uint64_t local = 0;
    for (std::uint64_t n = begin; n < end; ++n) {
      std::uint64_t rest = n;
      for (unsigned y = p; y-- > 0;) {
        b[y] = static_cast<unsigned>(rest % N);
        rest /= N;
        a[y] = static_cast<unsigned>(rest % M);
        rest /= M;
      }
      if (base_condition(a, b, params, scratch)) ++local;
    }
    return local;
  });
  return make_ratio(BigInt(hits), BigInt(total));
}

ExactRatio delta_partition(ModelParams params, unsigned p, const RunOptions& options) {
  params.validate();
  check_p(p);
  const unsigned max_s = std::min(params.M, p);
  const unsigned max_t = std::min(params.N, p);
  const auto counts = triangle_counts(p, max_s, max_t, options);
  BigInt sum = 0;
  for (unsigned s = 1; s <= max_s; ++s) {
    const BigInt fs = falling_factorial(params.M, s);
    for (unsigned t = 1; t <= max_t; ++t)
      if (counts.pairs[s - 1][t - 1] != 0)
        sum += BigInt(counts.pairs[s - 1][t - 1]) * fs * falling_factorial(params.N, t);
  }
  return make_ratio(sum, ipow(static_cast<unsigned long>(params.M) * params.N, p));
}

ExactRatio epsilon(unsigned p, unsigned s, unsigned t, const RunOptions& options) {
  check_p(p);
  if (s == 0 || t == 0 || s > p || t > p) throw ParameterError("epsilon needs 1 <= s, t <= p");
  const auto counts = triangle_counts(p, s, t, options);
  const auto stirling = stirling_row(p);
  return make_ratio(BigInt(counts.pairs[s - 1][t - 1]), stirling[s] * stirling[t]);
}

RatioTable epsilon_table(unsigned p, const RunOptions& options) {
  check_p(p);
  const auto counts = triangle_counts(p, p, p, options);
  const auto stirling = stirling_row(p);
  RatioTable table(p, p);
  for (unsigned s = 1; s <= p; ++s)
    for (unsigned t = 1; t <= p; ++t)
      table.at(s, t) = make_ratio(BigInt(counts.pairs[s - 1][t - 1]), stirling[s] * stirling[t]);
  return table;
}

ExactRatio DecompositionReport::row_sum(unsigned s) const {
  ExactRatio sum = 0;
  for (unsigned t = 1; t <= contributions.cols(); ++t) sum += contributions.at(s, t);
  return sum;
}

ExactRatio DecompositionReport::column_sum(unsigned t) const {
  ExactRatio sum = 0;
  for (unsigned s = 1; s <= contributions.rows(); ++s) sum += contributions.at(s, t);
  return sum;
}

ExactRatio DecompositionReport::interior_sum() const {
  ExactRatio sum = 0;
  for (unsigned s = 2; s <= contributions.rows(); ++s)
    for (unsigned t = 2; t <= contributions.cols(); ++t) sum += contributions.at(s, t);
  return sum;
}

DecompositionReport decompose(ModelParams params, unsigned p, const RunOptions& options) {
  params.validate();
  check_p(p);
  const unsigned max_s = std::min(params.M, p);
  const unsigned max_t = std::min(params.N, p);
  const auto counts = triangle_counts(p, max_s, max_t, options);
  const auto stirling = stirling_row(p);

  DecompositionReport report{params, p, RatioTable(max_s, max_t), RatioTable(max_s, max_t), 0};
  const BigInt Mp = ipow(params.M, p);
  const BigInt Np = ipow(params.N, p);
  for (unsigned s = 1; s <= max_s; ++s) {
    const ExactRatio row_weight = make_ratio(falling_factorial(params.M, s) * stirling[s], Mp);
    for (unsigned t = 1; t <= max_t; ++t) {
      const ExactRatio col_weight = make_ratio(falling_factorial(params.N, t) * stirling[t], Np);
      const ExactRatio eps = make_ratio(BigInt(counts.pairs[s - 1][t - 1]), stirling[s] * stirling[t]);
      report.epsilon.at(s, t) = eps;
      report.contributions.at(s, t) = row_weight * col_weight * eps;
      report.total += report.contributions.at(s, t);
    }
  }
  return report;
}

ExactRatio boundary_contribution(ModelParams params, unsigned p) {
  params.validate();
  check_p(p);
  return make_ratio(1, ipow(params.M, p - 1)) + make_ratio(1, ipow(params.N, p - 1)) -
         make_ratio(1, ipow(static_cast<unsigned long>(params.M) * params.N, p - 1));
}

namespace {

// Sum over compositions of k into N parts of multinomial(k; r)^2.
BigInt multinomial_square_sum_compositions(unsigned N, unsigned k) {
  std::vector<BigInt> factorial(k + 1);
  factorial[0] = 1;
  for (unsigned m = 1; m <= k; ++m) factorial[m] = factorial[m - 1] * m;
  BigInt sum = 0;
  std::vector<unsigned> parts(N, 0);
  std::function<void(unsigned, unsigned, const BigInt&)> rec = [&](unsigned slot, unsigned left,
                                                                   const BigInt& denom) {
    if (slot + 1 == N) {
      const BigInt term = factorial[k] / (denom * factorial[left]);
      sum += term * term;
      return;
    }
    for (unsigned r = 0; r <= left; ++r) rec(slot + 1, left - r, denom * factorial[r]);
  };
  rec(0, k, BigInt(1));
  return sum;
}

// layer[m] = sum over compositions of m into n parts of multinomial(m; r)^2, for
// m = 0..k_max, built by  A_n(m) = sum_j C(m, j)^2 A_{n-1}(m - j).
std::vector<BigInt> convolve_layer(const std::vector<BigInt>& previous, unsigned k_max) {
  std::vector<BigInt> layer(k_max + 1);
  BigInt c;
  for (unsigned m = 0; m <= k_max; ++m) {
    BigInt acc = 0;
    c = 1;
    for (unsigned j = 0; j <= m; ++j) {
      acc += c * c * previous[m - j];
      mpz_mul_ui(c.get_mpz_t(), c.get_mpz_t(), m - j);
      mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), j + 1);
    }
    layer[m] = std::move(acc);
  }
  return layer;
}

BigInt multinomial_square_sum_convolution(unsigned N, unsigned k) {
  if (N == 1) return 1;
  std::vector<BigInt> layer(k + 1, BigInt(1));
  for (unsigned n = 2; n < N; ++n) layer = convolve_layer(layer, k);
  BigInt acc = 0;
  BigInt c = 1;
  for (unsigned j = 0; j <= k; ++j) {
    acc += c * c * layer[k - j];
    mpz_mul_ui(c.get_mpz_t(), c.get_mpz_t(), k - j);
    mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), j + 1);
  }
  return acc;
}

constexpr long double kCompositionLimit = 200'000;

}  // namespace

ExactRatio moment_integral(unsigned N, unsigned k, const RunOptions& options, MomentAlgorithm algorithm) {
  if (N == 0) throw ParameterError("N must be positive");
  const long double compositions = binomial(k + N - 1, N - 1).get_d();
  const long double convolution_cost =
      static_cast<long double>(N > 2 ? N - 2 : 0) * k * k / 2.0L + static_cast<long double>(k) + 1;
  if (algorithm == MomentAlgorithm::automatic)
    algorithm = (N <= 4 && compositions <= kCompositionLimit) ? MomentAlgorithm::compositions
                                                              : MomentAlgorithm::convolution;
  const BigInt sum = [&] {
    if (algorithm == MomentAlgorithm::compositions) {
      check_budget(compositions * N, options, "moment_integral (compositions)");
      return multinomial_square_sum_compositions(N, k);
    }
    check_budget(convolution_cost, options, "moment_integral (convolution)");
    return multinomial_square_sum_convolution(N, k);
  }();
  return make_ratio(sum, ipow(N, 2UL * k));
}

std::vector<ExactRatio> moment_integral_table(unsigned N, unsigned k_max, const RunOptions& options) {
  if (N == 0) throw ParameterError("N must be positive");
  check_budget(static_cast<long double>(N) * (k_max + 1) * (k_max + 1) / 2.0L, options, "moment_integral_table");
  std::vector<BigInt> layer(k_max + 1, BigInt(1));
  for (unsigned n = 2; n <= N; ++n) layer = convolve_layer(layer, k_max);
  std::vector<ExactRatio> out;
  out.reserve(k_max + 1);
  for (unsigned k = 0; k <= k_max; ++k) out.push_back(make_ratio(layer[k], ipow(N, 2UL * k)));
  return out;
}

ExactRatio delta_m2_binomial(unsigned N, unsigned p, const RunOptions& options) {
  if (N == 0) throw ParameterError("N must be positive");
  check_p(p);
  const auto moments = moment_integral_table(N, p / 2, options);
  ExactRatio sum = 0;
  for (unsigned k = 0; 2 * k <= p; ++k) sum += ExactRatio(binomial(p, 2 * k)) * moments[k];
  return sum / ExactRatio(ipow(2, p - 1));
}

namespace {

double log_binomial(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

// g[m] = moment_integral(N, m) for m = 0..k_max in floating point.
std::vector<double> moment_integral_float_table(unsigned N, unsigned k_max) {
  std::vector<double> g(k_max + 1, 1.0);
  if (N <= 1) return g;
  if (N == 2) {
    for (unsigned m = 0; m <= k_max; ++m) g[m] = std::exp(log_binomial(2.0 * m, m) - 2.0 * m * std::log(2.0));
    return g;
  }
  std::vector<double> log_fact(k_max + 1);
  for (unsigned m = 0; m <= k_max; ++m) log_fact[m] = std::lgamma(m + 1.0);
  // A_n(m) / n^{2m} = sum_j C(m,j)^2 (n-1)^{2(m-j)} n^{-2m} [A_{n-1}(m-j) / (n-1)^{2(m-j)}]
  for (unsigned n = 2; n <= N; ++n) {
    const double log_n = std::log(static_cast<double>(n));
    const double log_prev = std::log(static_cast<double>(n - 1));
    std::vector<double> next(k_max + 1, 0.0);
    for (unsigned m = 0; m <= k_max; ++m) {
      double acc = 0.0;
      for (unsigned j = 0; j <= m; ++j) {
        const double log_c = log_fact[m] - log_fact[j] - log_fact[m - j];
        const double lw = 2.0 * log_c + 2.0 * (m - j) * log_prev - 2.0 * m * log_n;
        if (lw < -745.0) continue;
        acc += std::exp(lw) * g[m - j];
      }
      next[m] = acc;
    }
    g = std::move(next);
  }
  return g;
}

double neumaier_sum_descending(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double sum = 0.0;
  double carry = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    carry += std::fabs(sum) >= std::fabs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return sum + carry;
}

}  // namespace

double moment_integral_float(unsigned N, unsigned k) {
  if (N == 0) throw ParameterError("N must be positive");
  return moment_integral_float_table(N, k).back();
}

double delta_m2_float(unsigned N, unsigned p) {
  if (N == 0) throw ParameterError("N must be positive");
  check_p(p);
  if (p > 1'000'000) throw ParameterError("delta_m2_float supports p <= 10^6");
  const unsigned k_top = p / 2;
  std::vector<double> log_w(k_top + 1);
  double log_w_max = -INFINITY;
  for (unsigned k = 0; k <= k_top; ++k) {
    log_w[k] = log_binomial(p, 2.0 * k) - (p - 1.0) * std::log(2.0);
    log_w_max = std::max(log_w_max, log_w[k]);
  }
  // Weights below e^{-80} of the peak cannot affect a double result: the
  // moments lie in [0, 1] and the weights sum to 1.
  unsigned k_lo = 0;
  while (k_lo < k_top && log_w[k_lo] < log_w_max - 80.0) ++k_lo;
  unsigned k_hi = k_top;
  while (k_hi > k_lo && log_w[k_hi] < log_w_max - 80.0) --k_hi;

  const auto moments = moment_integral_float_table(N, k_hi);
  std::vector<double> terms;
  terms.reserve(k_hi - k_lo + 1);
  for (unsigned k = k_lo; k <= k_hi; ++k) terms.push_back(std::exp(log_w[k]) * moments[k]);
  return neumaier_sum_descending(std::move(terms));
}

ExactRatio delta_upper_bound(ModelParams params, unsigned p, const RunOptions& options) {
  params.validate();
  if (params.M < 2 || params.N < 2) throw PreconditionError("the upper bound needs M, N >= 2");
  if (p < 2) throw PreconditionError("the upper bound needs p >= 2");
  const ExactRatio eps22 = epsilon(p, 2, 2, options);
  const ExactRatio one = 1;
  return one - (one - make_ratio(1, ipow(params.M, p - 1))) * (one - make_ratio(1, ipow(params.N, p - 1))) *
                   (one - eps22);
}

}  // namespace dfm
