#include "dfm/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dfm/error.hpp"
#include "dfm/limiting.hpp"
#include "dfm/parallel.hpp"
#include "dfm/partition.hpp"

namespace dfm {
namespace {

void check_degree(unsigned p) {
  if (p == 0) throw ParameterError("p must be positive");
  if (p > kMaxStirlingDegree)
    throw ParameterError("p exceeds the Stirling polynomial cap of " + std::to_string(kMaxStirlingDegree));
}

ExactRatio ratio_pow(const ExactRatio& x, unsigned e) {
  ExactRatio r = 1;
  for (unsigned k = 0; k < e; ++k) r *= x;
  return r;
}

}  // namespace

ExactRatio StirlingPolynomial::evaluate(const ExactRatio& t) const {
  // Horner from the top coefficient
  ExactRatio acc = 0;
  for (std::size_t k = coefficients.size(); k-- > 0;) {
    acc *= t;
    acc += ExactRatio(coefficients[k]);
  }
  acc.canonicalize();
  return acc;
}

BigInt StirlingPolynomial::coefficient_sum() const {
  BigInt s = 0;
  for (const auto& c : coefficients) s += c;
  return s;
}

StirlingPolynomial stirling_polynomial(unsigned p) {
  check_degree(p);
  StirlingPolynomial s{p, std::vector<BigInt>(p + 1, 0)};
  for (unsigned k = 1; k <= p; ++k) s.coefficients[k] = narayana(p, k);
  return s;
}

ExactRatio free_poisson_moment(const ExactRatio& t, unsigned p) {
  if (t <= 0) throw ParameterError("t must be positive");
  return stirling_polynomial(p).evaluate(t);
}

bool RegimeReport::strictly_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].relative_error < rows[k - 1].relative_error)) return false;
  return true;
}

RegimeReport regime_check(const ExactRatio& t, unsigned p, const std::vector<unsigned>& N_values,
                          const RunOptions& options) {
  if (t <= 0) throw ParameterError("t must be positive");
  check_degree(p);
  const ExactRatio sp = free_poisson_moment(t, p);

  RegimeReport report{t, p, std::vector<RegimeRow>(N_values.size())};
  for (std::size_t k = 0; k < N_values.size(); ++k) {
    const unsigned N = N_values[k];
    if (N == 0) throw ParameterError("N values must be positive");
    const ExactRatio m = t * N;
    if (m.get_den() != 1) throw ParameterError("t * N = " + to_string(m) + " is not an integer");
    if (!m.get_num().fits_uint_p()) throw ParameterError("t * N is too large");
    report.rows[k].N = N;
    report.rows[k].M = static_cast<unsigned>(m.get_num().get_ui());
  }

  // rows are independent; each worker owns its slots
  RunOptions inner = options;
  inner.threads = 1;
  parallel_for_chunks(report.rows.size(), options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t k = begin; k < end; ++k) {
      RegimeRow& row = report.rows[k];
      const ExactRatio M = row.M;
      row.p = p;
      row.exact = delta_partition({row.M, row.N}, p, inner);
      row.predicted = sp * row.N / ratio_pow(M, p);
      row.relative_error = abs(row.exact - row.predicted) / row.predicted;
      row.chi_moment = ratio_pow(M, p - 1) * row.exact / row.N;
      row.chi_limit = sp / M;
      row.predicted.canonicalize();
      row.relative_error.canonicalize();
      row.chi_moment.canonicalize();
      row.chi_limit.canonicalize();
    }
  });
  return report;
}

double richmond_shallit(unsigned N, unsigned k) {
  if (N == 0 || k == 0) throw ParameterError("N and k must be positive");
  const double n = N;
  return std::exp(0.5 * (n * std::log(n) - (n - 1) * std::log(4.0 * std::numbers::pi * k)));
}

double decay_estimate(unsigned N, unsigned p) {
  if (N == 0 || p == 0) throw ParameterError("N and p must be positive");
  const double n = N;
  return std::exp(0.5 * (n * std::log(n) - (n - 1) * std::log(std::numbers::pi * p)));
}

}  // namespace dfm
