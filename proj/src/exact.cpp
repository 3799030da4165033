#include "dfm/exact.hpp"

#include <cmath>
#include <sstream>

#include "dfm/error.hpp"

namespace dfm {

ExactRatio make_ratio(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) throw ParameterError("ratio with zero denominator");
  ExactRatio r(numerator, denominator);
  r.canonicalize();
  return r;
}

std::string to_string(const ExactRatio& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

ExactRatio parse_ratio(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return ExactRatio(BigInt(std::string(text)));
    BigInt num(std::string(text.substr(0, slash)));
    BigInt den(std::string(text.substr(slash + 1)));
    return make_ratio(num, den);
  } catch (const std::invalid_argument&) {
    throw ParameterError("not a rational number: '" + std::string(text) + "'");
  }
}

// Truncates toward zero, so the result is within one ulp of the exact value.
double to_double(const ExactRatio& value) { return value.get_d(); }

BigInt ipow(unsigned long base, unsigned long exponent) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exponent);
  return r;
}

BigInt falling_factorial(unsigned long n, unsigned long k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (unsigned long i = 0; i < k; ++i) r *= n - i;
  return r;
}

BigInt binomial(unsigned long n, unsigned long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

long double pow_estimate(long double base, unsigned long exponent) {
  return std::pow(base, static_cast<long double>(exponent));
}

void check_budget(long double estimated_ops, const RunOptions& options, std::string_view what) {
  if (estimated_ops <= static_cast<long double>(options.budget)) return;
  std::ostringstream os;
  os.precision(3);
  os << what << ": estimated " << std::scientific << static_cast<double>(estimated_ops)
     << " operations exceeds budget " << static_cast<double>(options.budget);
  throw BudgetError(os.str(), estimated_ops, static_cast<long double>(options.budget));
}

}  // namespace dfm
