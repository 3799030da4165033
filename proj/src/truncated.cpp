#include "dfm/truncated.hpp"

#include <algorithm>
#include <string>

#include "dfm/error.hpp"
#include "dfm/limiting.hpp"
#include "dfm/parallel.hpp"

namespace dfm {

void ModelParams::validate() const {
  if (M == 0 || N == 0) throw ParameterError("M and N must be positive");
}

void check_residues(Residues values, unsigned modulus, const char* name) {
  for (unsigned v : values)
    if (v >= modulus)
      throw ParameterError(std::string(name) + " entry " + std::to_string(v) + " is not a residue mod " +
                           std::to_string(modulus));
}

bool pair_condition(Residues a, Residues b, ModelParams params, unsigned u, unsigned v,
                    MultisetScratch& scratch) {
  const std::size_t p = a.size();
  const unsigned M = params.M;
  const unsigned N = params.N;
  scratch.lhs.resize(2 * p);
  scratch.rhs.resize(2 * p);
  for (std::size_t y = 0; y < p; ++y) {
    const std::size_t yn = (y + 1 == p) ? 0 : y + 1;
    const std::uint32_t ru = (u + a[y]) % M * N;
    const std::uint32_t rv = (v + a[y]) % M * N;
    scratch.lhs[2 * y] = ru + b[y];
    scratch.lhs[2 * y + 1] = rv + b[yn];
    scratch.rhs[2 * y] = ru + b[yn];
    scratch.rhs[2 * y + 1] = rv + b[y];
  }
  std::sort(scratch.lhs.begin(), scratch.lhs.end());
  std::sort(scratch.rhs.begin(), scratch.rhs.end());
  return scratch.lhs == scratch.rhs;
}

bool base_condition(Residues a, Residues b, ModelParams params, MultisetScratch& scratch) {
  const std::size_t p = a.size();
  scratch.lhs.resize(p);
  scratch.rhs.resize(p);
  for (std::size_t y = 0; y < p; ++y) {
    const std::size_t yn = (y + 1 == p) ? 0 : y + 1;
    scratch.lhs[y] = a[y] * params.N + b[y];
    scratch.rhs[y] = a[y] * params.N + b[yn];
  }
  std::sort(scratch.lhs.begin(), scratch.lhs.end());
  std::sort(scratch.rhs.begin(), scratch.rhs.end());
  return scratch.lhs == scratch.rhs;
}

namespace {

void check_pr(unsigned p, unsigned r) {
  if (p == 0) throw ParameterError("p must be at least 1");
  if (r == 0) throw ParameterError("r must be at least 1");
}

// Decodes a flat index into (a, b) digits, a first, least significant digit last.
void decode_ab(std::uint64_t index, ModelParams params, std::vector<unsigned>& a, std::vector<unsigned>& b) {
  for (std::size_t y = b.size(); y-- > 0;) {
    b[y] = static_cast<unsigned>(index % params.N);
    index /= params.N;
  }
  for (std::size_t y = a.size(); y-- > 0;) {
    a[y] = static_cast<unsigned>(index % params.M);
    index /= params.M;
  }
}

void increment_ab(ModelParams params, std::vector<unsigned>& a, std::vector<unsigned>& b) {
  for (std::size_t y = b.size(); y-- > 0;) {
    if (++b[y] < params.N) return;
    b[y] = 0;
  }
  for (std::size_t y = a.size(); y-- > 0;) {
    if (++a[y] < params.M) return;
    a[y] = 0;
  }
}

// Number of (i_2, ..., i_r) with i_1 = 0 such that every cyclic step
// i_{x+1} - i_x lies in `allowed`.
std::uint64_t count_closed_walks(const std::vector<char>& allowed, unsigned M, unsigned r) {
  if (r == 1) return 1;
  std::vector<unsigned> path(r, 0);
  std::vector<unsigned> next(r, 0);
  std::uint64_t total = 0;
  unsigned depth = 1;
  next[1] = 0;
  while (depth > 0) {
    if (next[depth] == M) {
      --depth;
      continue;
    }
    const unsigned candidate = next[depth]++;
    if (!allowed[(candidate + M - path[depth - 1]) % M]) continue;
    path[depth] = candidate;
    if (depth + 1 == r) {
      if (allowed[(M - candidate) % M]) ++total;
    } else {
      ++depth;
      next[depth] = 0;
    }
  }
  return total;
}

}  // namespace

bool truncation_condition(const IndexConfig& cfg, ModelParams params) {
  params.validate();
  check_pr(static_cast<unsigned>(cfg.a.size()), static_cast<unsigned>(cfg.i.size()));
  if (cfg.a.size() != cfg.b.size()) throw ParameterError("a and b must have the same length p");
  check_residues(cfg.i, params.M, "i");
  check_residues(cfg.a, params.M, "a");
  check_residues(cfg.b, params.N, "b");
  MultisetScratch scratch;
  const std::size_t r = cfg.i.size();
  for (std::size_t x = 0; x < r; ++x)
    if (!pair_condition(cfg.a, cfg.b, params, cfg.i[x], cfg.i[(x + 1) % r], scratch)) return false;
  return true;
}

long double count_d_cost(ModelParams params, unsigned p, unsigned r) {
  const long double outer = pow_estimate(params.M, p) * pow_estimate(params.N, p);
  return outer * (params.M + r * pow_estimate(params.M, r - 1));
}

ExactRatio count_d(ModelParams params, unsigned p, unsigned r, const RunOptions& options) {
  params.validate();
  check_pr(p, r);
  check_budget(count_d_cost(params, p, r), options, "count_d");

  const unsigned M = params.M;
  const long double max_count = pow_estimate(M, p + r - 1) * pow_estimate(params.N, p);
  if (max_count >= 0x1p63L) throw BudgetError("count_d: counts overflow 64 bits", max_count, 0x1p63L);
  const std::uint64_t outer = ipow(M, p).get_ui() * ipow(params.N, p).get_ui();
  const std::uint64_t walks = parallel_count(outer, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<unsigned> a(p), b(p);
    std::vector<char> allowed(M);
    MultisetScratch scratch;
    std::uint64_t local = 0;
    if (begin < end) decode_ab(begin, params, a, b);
    for (std::uint64_t n = begin; n < end; ++n) {
      // The condition at x depends on i_x, i_{x+1} only through i_{x+1} - i_x.
      for (unsigned d = 0; d < M; ++d) allowed[d] = pair_condition(a, b, params, 0, d, scratch);
      local += count_closed_walks(allowed, M, r);
      increment_ab(params, a, b);
    }
    return local;
  });
  // i_1 was pinned: multiply by M, then normalize by M^{p+r} N^p.
  return make_ratio(BigInt(walks) * M, ipow(M, p + r) * ipow(params.N, p));
}

ExactRatio c_from_d(const ExactRatio& d, ModelParams params, unsigned p) {
  params.validate();
  if (p == 0) throw ParameterError("p must be at least 1");
  return d * ExactRatio(ipow(static_cast<unsigned long>(params.M) * params.N, p - 1));
}

ExactRatio alpha(ModelParams params, unsigned p, unsigned r) {
  params.validate();
  check_pr(p, r);
  const unsigned M = params.M;
  const unsigned N = params.N;
  const BigInt num = (ipow(M, p) - M) * (ipow(M, r) - M) * (ipow(N, p) - N);
  return ExactRatio(1) - make_ratio(num, ipow(M, p + r) * ipow(N, p));
}

ExactRatio beta(ModelParams params, unsigned p, unsigned r, const ExactRatio& delta) {
  params.validate();
  check_pr(p, r);
  return delta + make_ratio(1, ipow(params.M, r - 1)) * (ExactRatio(1) - delta);
}

ExactRatio d42_closed_form(ModelParams params, const RunOptions& options) {
  params.validate();
  const ExactRatio base = beta(params, 4, 2, delta_partition(params, 4, options));
  if (params.M % 2 != 0) return base;
  const BigInt num = BigInt(params.M - 2) * (params.N - 1);
  return base + make_ratio(num, ipow(params.M, 4) * ipow(params.N, 3));
}

std::vector<unsigned> solution_set(Residues a, Residues b, ModelParams params) {
  params.validate();
  if (a.empty() || a.size() != b.size()) throw ParameterError("a and b must be nonempty and of equal length");
  check_residues(a, params.M, "a");
  check_residues(b, params.N, "b");
  const std::size_t p = a.size();
  const unsigned M = params.M;
  const unsigned N = params.N;
  std::vector<unsigned> out;
  std::vector<std::uint32_t> left, right;
  for (unsigned i = 0; i < M; ++i) {
    left.clear();
    right.clear();
    for (std::size_t y = 0; y < p; ++y) {
      const unsigned shifted = (i + a[y]) % M;
      const unsigned next_b = b[(y + 1) % p];
      left.push_back(shifted * N + b[y]);
      left.push_back(a[y] * N + next_b);
      right.push_back(shifted * N + next_b);
      right.push_back(a[y] * N + b[y]);
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    if (left == right) out.push_back(i);
  }
  return out;
}

ExactRatio index_fraction(Residues a, Residues b, ModelParams params, unsigned r, const RunOptions& options) {
  params.validate();
  if (a.empty() || a.size() != b.size()) throw ParameterError("a and b must be nonempty and of equal length");
  if (r == 0) throw ParameterError("r must be at least 1");
  check_residues(a, params.M, "a");
  check_residues(b, params.N, "b");
  check_budget(pow_estimate(params.M, r) * r, options, "index_fraction");

  const unsigned M = params.M;
  std::vector<unsigned> i(r, 0);
  MultisetScratch scratch;
  std::uint64_t hits = 0;
  while (true) {
    bool ok = true;
    for (unsigned x = 0; x < r && ok; ++x) ok = pair_condition(a, b, params, i[x], i[(x + 1) % r], scratch);
    if (ok) ++hits;
    unsigned pos = r;
    while (pos > 0 && ++i[pos - 1] == M) i[--pos] = 0;
    if (pos == 0) break;
  }
  return make_ratio(BigInt(hits), ipow(M, r));
}

}  // namespace dfm
