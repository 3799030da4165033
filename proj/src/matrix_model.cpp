#include "dfm/matrix_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dfm/error.hpp"
#include "dfm/parallel.hpp"

namespace dfm {
namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Complex unit(double angle) { return std::polar(1.0, angle); }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Deterministic pairwise sum; the split points depend only on the length.
double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

McEstimate summarize(const std::vector<double>& values, double max_imag) {
  McEstimate out;
  out.samples = values.size();
  out.max_imag = max_imag;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values.data(), values.size()) / n;
  if (values.size() > 1) {
    std::vector<double> dev(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) dev[k] = (values[k] - out.mean) * (values[k] - out.mean);
    out.std_error = std::sqrt(pairwise_sum(dev.data(), dev.size()) / (n - 1) / n);
  }
  return out;
}

void check_positive(unsigned value, const char* name) {
  if (value == 0) throw ParameterError(std::string(name) + " must be positive");
}

std::uint64_t upow(std::uint64_t base, unsigned exponent) {
  std::uint64_t v = 1;
  for (unsigned k = 0; k < exponent; ++k) v *= base;
  return v;
}

// Base-`radix` digits of `index`, most significant first.
void digits(std::uint64_t index, unsigned radix, std::vector<unsigned>& out) {
  for (std::size_t y = out.size(); y-- > 0;) {
    out[y] = static_cast<unsigned>(index % radix);
    index /= radix;
  }
}

}  // namespace

PhaseStream::PhaseStream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = index;
  state_ = seed ^ splitmix(s);
  splitmix(state_);
}

std::uint64_t PhaseStream::next_u64() { return splitmix(state_); }

double PhaseStream::next_angle() {
  // 53 random bits -> [0, 1)
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return 2.0 * std::numbers::pi * u;
}

PhaseMatrix::PhaseMatrix(ModelParams params, ComplexMatrix entries) : params_(params), entries_(std::move(entries)) {
  params_.validate();
  if (entries_.rows() != params_.M || entries_.cols() != params_.N)
    throw ParameterError("phase matrix must be M x N");
  for (Eigen::Index i = 0; i < entries_.size(); ++i)
    if (std::abs(std::abs(entries_(i)) - 1.0) > tolerance::kUnitModulus)
      throw ValidationError("phase matrix entry is not of unit modulus");
}

PhaseMatrix PhaseMatrix::flat(ModelParams params) {
  params.validate();
  return PhaseMatrix(params, ComplexMatrix::Ones(params.M, params.N));
}

PhaseMatrix PhaseMatrix::random(ModelParams params, PhaseStream& stream) {
  params.validate();
  ComplexMatrix q(params.M, params.N);
  for (unsigned i = 0; i < params.M; ++i)
    for (unsigned b = 0; b < params.N; ++b) q(i, b) = unit(stream.next_angle());
  return PhaseMatrix(params, std::move(q));
}

ComplexMatrix PhaseMatrix::gram() const { return entries_ * entries_.adjoint(); }

HadamardResiduals hadamard_residuals(const ComplexMatrix& h) {
  HadamardResiduals r;
  for (Eigen::Index i = 0; i < h.size(); ++i) r.modulus = std::max(r.modulus, std::abs(std::abs(h(i)) - 1.0));
  ComplexMatrix g = h * h.adjoint();
  g.diagonal().array() -= static_cast<double>(h.rows());
  r.orthogonality = max_abs(g);
  return r;
}

HadamardFiber::HadamardFiber(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw ValidationError("Hadamard fiber must be a non-empty square matrix");
  const auto r = hadamard_residuals(entries_);
  if (r.modulus > tolerance::kUnitModulus)
    throw ValidationError("Hadamard fiber has an entry off the unit circle (residual " +
                          std::to_string(r.modulus) + ")");
  if (r.orthogonality > tolerance::kOrthogonalityPerSize * static_cast<double>(entries_.rows()))
    throw ValidationError("Hadamard fiber rows are not orthogonal (residual " + std::to_string(r.orthogonality) +
                          ")");
}

HadamardFiber fourier_matrix(unsigned n) {
  check_positive(n, "n");
  ComplexMatrix f(n, n);
  for (unsigned j = 0; j < n; ++j)
    for (unsigned k = 0; k < n; ++k)
      f(j, k) = unit(2.0 * std::numbers::pi * static_cast<double>((std::uint64_t{j} * k) % n) / n);
  return HadamardFiber(std::move(f));
}

HadamardFiber dita_deform(const PhaseMatrix& q) {
  const auto [M, N] = q.params();
  const ComplexMatrix fm = fourier_matrix(M).entries();
  const ComplexMatrix fn = fourier_matrix(N).entries();
  const unsigned K = M * N;
  ComplexMatrix h(K, K);
  for (unsigned i = 0; i < M; ++i)
    for (unsigned a = 0; a < N; ++a)
      for (unsigned j = 0; j < M; ++j)
        for (unsigned b = 0; b < N; ++b) h(i * N + a, j * N + b) = q.entries()(i, b) * fm(i, j) * fn(a, b);
  return HadamardFiber(std::move(h));
}

MagicUnitary::MagicUnitary(ComplexMatrix factors)
    : size_(static_cast<unsigned>(factors.rows())), factors_(std::move(factors)) {
  if (size_ == 0 || factors_.cols() != static_cast<Eigen::Index>(size_) * size_)
    throw ParameterError("magic unitary factors must be K x K^2");
}

ComplexMatrix MagicUnitary::block(unsigned i, unsigned j) const {
  const auto xi = factor(i, j);
  return xi * xi.adjoint() / static_cast<double>(size_);
}

MagicUnitary magic_unitary(const ComplexMatrix& h) { return magic_unitary(HadamardFiber(h)); }

MagicUnitary magic_unitary(const HadamardFiber& h) {
  const auto K = static_cast<unsigned>(h.size());
  const ComplexMatrix& m = h.entries();
  ComplexMatrix factors(K, static_cast<Eigen::Index>(K) * K);
  for (unsigned i = 0; i < K; ++i)
    for (unsigned j = 0; j < K; ++j) factors.col(i * K + j) = m.row(i).transpose().cwiseQuotient(m.row(j).transpose());
  return MagicUnitary(std::move(factors));
}

MagicResiduals magic_residuals(const MagicUnitary& u) {
  const unsigned K = u.size();
  const ComplexMatrix id = ComplexMatrix::Identity(K, K);
  MagicResiduals r;
  std::vector<ComplexMatrix> column_sums(K, ComplexMatrix::Zero(K, K));
  for (unsigned i = 0; i < K; ++i) {
    ComplexMatrix row_sum = ComplexMatrix::Zero(K, K);
    for (unsigned j = 0; j < K; ++j) {
      const ComplexMatrix b = u.block(i, j);
      row_sum += b;
      column_sums[j] += b;
      r.idempotent = std::max(r.idempotent, max_abs(b * b - b));
      r.self_adjoint = std::max(r.self_adjoint, max_abs(b - b.adjoint()));
      r.trace = std::max(r.trace, std::abs(b.trace() - 1.0));
    }
    r.row_sum = std::max(r.row_sum, max_abs(row_sum - id));
  }
  for (const auto& c : column_sums) r.column_sum = std::max(r.column_sum, max_abs(c - id));
  return r;
}

TransferMatrix transfer_fiber(const MagicUnitary& u, unsigned p, const RunOptions& options) {
  check_positive(p, "p");
  const unsigned K = u.size();
  const long double entries = pow_estimate(K, 2UL * p);
  check_budget(entries * p, options, "transfer_fiber");
  if (entries > (1UL << 28)) throw BudgetError("transfer_fiber: matrix does not fit in memory", entries, 1UL << 28);

  const ComplexMatrix g = u.factors().adjoint() * u.factors();
  const std::uint64_t dim = upow(K, p);
  const double scale = std::pow(static_cast<double>(K), -static_cast<double>(p) - 1.0);
  TransferMatrix t{p, K, ComplexMatrix(dim, dim)};
  parallel_for_chunks(dim, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<unsigned> di(p), dj(p), pair(p);
    for (std::uint64_t I = begin; I < end; ++I) {
      digits(I, K, di);
      for (std::uint64_t J = 0; J < dim; ++J) {
        digits(J, K, dj);
        for (unsigned y = 0; y < p; ++y) pair[y] = di[y] * K + dj[y];
        Complex v = scale;
        for (unsigned y = 0; y < p; ++y) v *= g(pair[y], pair[(y + 1) % p]);
        t.entries(I, J) = v;
      }
    }
  });
  return t;
}

Complex trace_of_product(std::span<const TransferMatrix> factors) {
  if (factors.empty()) throw ParameterError("trace_of_product needs at least one factor");
  ComplexMatrix acc = factors.front().entries;
  for (std::size_t x = 1; x < factors.size(); ++x) {
    if (factors[x].entries.rows() != acc.cols()) throw ParameterError("transfer matrices have different sizes");
    acc = acc * factors[x].entries;
  }
  return acc.trace();
}

Complex deformed_transfer_trace(std::span<const MagicUnitary> fibers, ModelParams params, unsigned p) {
  params.validate();
  check_positive(p, "p");
  if (fibers.empty()) throw ParameterError("deformed_transfer_trace needs at least one fiber");
  const unsigned M = params.M, N = params.N, K = M * N;
  for (const auto& u : fibers)
    if (u.size() != K) throw ParameterError("fiber size does not match M N");

  const std::uint64_t mp = upow(M, p), np = upow(N, p);
  const double scale = std::pow(static_cast<double>(K), -static_cast<double>(p) - 1.0);

  std::vector<Complex> twiddle(N);
  for (unsigned k = 0; k < N; ++k) twiddle[k] = unit(-2.0 * std::numbers::pi * k / N);

  // hat[x][(I * mp + J) * np + chi]: character-chi block of the x-th transfer matrix
  std::vector<std::vector<Complex>> hat(fibers.size());
  std::vector<unsigned> di(p), dj(p), de(p), pair(p);
  std::vector<Complex> line(N), out(N);
  for (std::size_t x = 0; x < fibers.size(); ++x) {
    const ComplexMatrix g = fibers[x].factors().adjoint() * fibers[x].factors();
    auto& f = hat[x];
    f.assign(mp * mp * np, Complex{});
    for (std::uint64_t I = 0; I < mp; ++I) {
      digits(I, M, di);
      for (std::uint64_t J = 0; J < mp; ++J) {
        digits(J, M, dj);
        for (std::uint64_t e = 0; e < np; ++e) {
          digits(e, N, de);
          // row (i_y, 0), column (j_y, -e_y)
          for (unsigned y = 0; y < p; ++y) pair[y] = (di[y] * N) * K + dj[y] * N + (N - de[y]) % N;
          Complex v = scale;
          for (unsigned y = 0; y < p; ++y) v *= g(pair[y], pair[(y + 1) % p]);
          f[(I * mp + J) * np + e] = v;
        }
      }
    }
    // DFT over each of the p axes of Z_N^p
    for (unsigned y = 0; y < p; ++y) {
      const std::uint64_t stride = upow(N, p - 1 - y);
      for (std::uint64_t base = 0; base < mp * mp; ++base) {
        Complex* row = f.data() + base * np;
        for (std::uint64_t e = 0; e < np; ++e) {
          if ((e / stride) % N != 0) continue;
          for (unsigned k = 0; k < N; ++k) line[k] = row[e + k * stride];
          for (unsigned c = 0; c < N; ++c) {
            Complex s{};
            for (unsigned k = 0; k < N; ++k) s += line[k] * twiddle[(std::uint64_t{c} * k) % N];
            out[c] = s;
          }
          for (unsigned c = 0; c < N; ++c) row[e + c * stride] = out[c];
        }
      }
    }
  }

  Complex total{};
  ComplexMatrix acc(mp, mp), block(mp, mp);
  for (std::uint64_t chi = 0; chi < np; ++chi) {
    for (std::size_t x = 0; x < fibers.size(); ++x) {
      for (std::uint64_t I = 0; I < mp; ++I)
        for (std::uint64_t J = 0; J < mp; ++J) block(I, J) = hat[x][(I * mp + J) * np + chi];
      if (x == 0)
        acc = block;
      else
        acc = acc * block;
    }
    total += acc.trace();
  }
  return total;
}

McEstimate mc_estimate_c(ModelParams params, unsigned p, unsigned r, std::uint64_t samples, std::uint64_t seed,
                         const RunOptions& options) {
  params.validate();
  check_positive(p, "p");
  check_positive(r, "r");
  if (samples == 0) throw ParameterError("samples must be positive");
  const long double K = params.M * params.N;
  const long double mp = pow_estimate(params.M, p), np = pow_estimate(params.N, p);
  const long double per_sample = r * (pow_estimate(K, 5) + mp * mp * np * p * (params.N + 1)) + np * r * mp * mp * mp;
  check_budget(per_sample * samples, options, "mc_estimate_c");

  std::vector<double> values(samples);
  std::vector<double> imag(samples);
  parallel_for_chunks(samples, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<MagicUnitary> fibers;
    for (std::uint64_t s = begin; s < end; ++s) {
      PhaseStream stream(seed, s);
      fibers.clear();
      for (unsigned x = 0; x < r; ++x)
        fibers.push_back(magic_unitary(dita_deform(PhaseMatrix::random(params, stream))));
      const Complex t = deformed_transfer_trace(fibers, params, p);
      values[s] = t.real();
      imag[s] = std::abs(t.imag());
    }
  });
  return summarize(values, *std::max_element(imag.begin(), imag.end()));
}

McEstimate mc_estimate_delta(ModelParams params, unsigned p, std::uint64_t samples, std::uint64_t seed,
                             const RunOptions& options) {
  params.validate();
  check_positive(p, "p");
  if (samples == 0) throw ParameterError("samples must be positive");
  const long double M = params.M;
  check_budget(samples * (M * M * params.N + M * M * M + M * p), options, "mc_estimate_delta");

  const double mn = static_cast<double>(params.M) * params.N;
  std::vector<double> values(samples);
  parallel_for_chunks(samples, options.threads, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t s = begin; s < end; ++s) {
      PhaseStream stream(seed, s);
      const ComplexMatrix g = PhaseMatrix::random(params, stream).gram();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(g, Eigen::EigenvaluesOnly);
      double v = 0;
      for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
        v += std::pow(std::max(eig.eigenvalues()(k), 0.0) / mn, static_cast<double>(p));
      values[s] = v;
    }
  });
  return summarize(values, 0.0);
}

}  // namespace dfm
