#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace dfm {

using BigInt = mpz_class;

/// Exact rational in lowest terms with a positive denominator.
using ExactRatio = mpq_class;

inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000ULL;

/// Cost guard and parallelism shared by every enumeration routine.
/// `threads == 0` means "use the hardware concurrency".
struct RunOptions {
  std::uint64_t budget = kDefaultBudget;
  unsigned threads = 0;
};

ExactRatio make_ratio(const BigInt& numerator, const BigInt& denominator);

/// Always "num/den", also for integers ("1/1").
std::string to_string(const ExactRatio& value);

/// Accepts "a/b" or a bare integer "a".
ExactRatio parse_ratio(std::string_view text);

double to_double(const ExactRatio& value);

BigInt ipow(unsigned long base, unsigned long exponent);

/// n (n-1) ... (n-k+1); zero when k > n.
BigInt falling_factorial(unsigned long n, unsigned long k);

BigInt binomial(unsigned long n, unsigned long k);

/// Throws BudgetError naming `what` when `estimated_ops` exceeds the budget.
void check_budget(long double estimated_ops, const RunOptions& options, std::string_view what);

/// Saturating-free power in long double, used only for cost estimates.
long double pow_estimate(long double base, unsigned long exponent);

}  // namespace dfm
