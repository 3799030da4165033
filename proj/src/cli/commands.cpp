#include "dfm/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>

#include "dfm/asymptotics.hpp"
#include "dfm/cli/cache.hpp"
#include "dfm/limiting.hpp"
#include "dfm/matrix_model.hpp"
#include "dfm/truncated.hpp"

namespace dfm::cli {
namespace {

struct CommonFlags {
  std::string format = "csv";
  std::string out;
  std::string cache;
  std::string budget;
  unsigned threads = 0;
  bool no_timing = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", f.out, "output file (default: standard output)");
  sub->add_option("--cache", f.cache, std::string("cache directory (default: $") + kCacheEnvVar + ")");
  sub->add_option("--budget", f.budget, "operation budget, e.g. 1e9");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_flag("--no-timing", f.no_timing, "report runtime_ms as 0");
}

class Context {
public:
  Context(const CommonFlags& flags, std::ostream& err) : err_(err), timing_(!flags.no_timing) {
    options.threads = flags.threads;
    if (!flags.budget.empty()) {
      double b = 0;
      try {
        b = std::stod(flags.budget);
      } catch (const std::exception&) {
        throw ParameterError("--budget: not a number: " + flags.budget);
      }
      if (!(b >= 1)) throw ParameterError("--budget must be at least 1");
      options.budget = b >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(b);
    }
    if (auto dir = resolve_cache_dir(flags.cache)) cache_.emplace(*dir);
  }

  RunOptions options;

  template <class F>
  RunRecord exact(const std::string& command, unsigned M, unsigned N, std::optional<unsigned> p,
                  std::optional<unsigned> r, const std::string& method, F&& compute,
                  std::optional<CacheKey> key = std::nullopt) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<ExactRatio> value;
    bool hit = false;
    if (cache_ && key) {
      value = cache_->load(*key);
      hit = value.has_value();
      if (hit) err_ << "cache hit: " << key->text() << '\n';
    }
    if (!value) {
      value = compute();
      if (cache_ && key) cache_->store(*key, *value);
    }
    RunRecord rec = exact_record(command, M, N, p, r, method, *value);
    rec.cache_hit = hit;
    rec.runtime_ms = elapsed(start);
    return rec;
  }

  std::int64_t elapsed(std::chrono::steady_clock::time_point start) const {
    if (!timing_) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  }

private:
  std::ostream& err_;
  bool timing_;
  std::optional<ResultCache> cache_;
};

void cross_check(const std::vector<RunRecord>& records, const std::vector<std::size_t>& checked) {
  for (std::size_t k = 1; k < checked.size(); ++k) {
    const auto& a = records[checked[0]];
    const auto& b = records[checked[k]];
    if (*a.value_exact != *b.value_exact)
      throw CrossCheckError("methods '" + a.method + "' and '" + b.method + "' disagree", {a, b});
  }
}

std::optional<double> z_score(const McEstimate& est, double exact) {
  if (std::abs(est.mean - exact) <= 1e-12 * std::max(1.0, std::abs(exact))) return 0.0;
  if (est.std_error > 0) return (est.mean - exact) / est.std_error;
  return std::nullopt;
}

std::vector<RunRecord> cmd_truncated(Context& ctx, unsigned M, unsigned N, unsigned p, unsigned r,
                                     const std::vector<std::string>& methods) {
  const ModelParams params{M, N};
  params.validate();
  if (p == 0 || r == 0) throw ParameterError("p and r must be positive");
  std::vector<RunRecord> out;
  std::vector<std::size_t> checked;
  std::optional<ExactRatio> delta;
  auto limit = [&] {
    if (!delta) delta = delta_partition(params, p, ctx.options);
    return *delta;
  };
  for (const auto& m : methods) {
    if (m == "direct") {
      checked.push_back(out.size());
      out.push_back(ctx.exact("truncated", M, N, p, r, m, [&] { return count_d(params, p, r, ctx.options); },
                              CacheKey{"d/direct", M, N, p, r}));
    } else if (m == "alpha") {
      if (p <= 2) checked.push_back(out.size());
      out.push_back(ctx.exact("truncated", M, N, p, r, m, [&] { return alpha(params, p, r); }));
    } else if (m == "beta") {
      if (p <= 3) checked.push_back(out.size());
      out.push_back(ctx.exact("truncated", M, N, p, r, m, [&] { return beta(params, p, r, limit()); }));
    } else if (m == "closed-form") {
      if (p != 4 || r != 2) throw ParameterError("method closed-form is available only for p = 4, r = 2");
      checked.push_back(out.size());
      out.push_back(ctx.exact("truncated", M, N, p, r, m, [&] { return d42_closed_form(params, ctx.options); }));
    } else {
      throw ParameterError("truncated: unknown method '" + m + "' (direct, alpha, beta, closed-form)");
    }
  }
  cross_check(out, checked);
  return out;
}

std::vector<RunRecord> cmd_limit(Context& ctx, unsigned M, unsigned N, unsigned p,
                                 const std::vector<std::string>& methods, const std::string& report) {
  const ModelParams params{M, N};
  params.validate();
  if (p == 0) throw ParameterError("p must be positive");
  if (!report.empty() && report != "decomposition") throw ParameterError("--report: only 'decomposition'");
  std::vector<RunRecord> out;
  std::vector<std::size_t> checked;
  for (const auto& m : methods) {
    if (m == "direct") {
      checked.push_back(out.size());
      out.push_back(ctx.exact("limit", M, N, p, std::nullopt, m,
                              [&] { return delta_direct(params, p, ctx.options); },
                              CacheKey{"delta/direct", M, N, p, std::nullopt}));
    } else if (m == "partition") {
      checked.push_back(out.size());
      out.push_back(ctx.exact("limit", M, N, p, std::nullopt, m,
                              [&] { return delta_partition(params, p, ctx.options); },
                              CacheKey{"delta/partition", M, N, p, std::nullopt}));
    } else if (m == "binomial") {
      if (M != 2) throw ParameterError("method binomial requires M = 2");
      checked.push_back(out.size());
      out.push_back(ctx.exact("limit", M, N, p, std::nullopt, m,
                              [&] { return delta_m2_binomial(N, p, ctx.options); },
                              CacheKey{"delta/binomial", M, N, p, std::nullopt}));
    } else if (m == "bound") {
      out.push_back(ctx.exact("limit", M, N, p, std::nullopt, m,
                              [&] { return delta_upper_bound(params, p, ctx.options); }));
    } else {
      throw ParameterError("limit: unknown method '" + m + "' (direct, partition, binomial, bound)");
    }
  }
  if (report == "decomposition") {
    const auto start = std::chrono::steady_clock::now();
    const auto rep = decompose(params, p, ctx.options);
    const auto ms = ctx.elapsed(start);
    for (unsigned s = 1; s <= rep.contributions.rows(); ++s)
      for (unsigned t = 1; t <= rep.contributions.cols(); ++t) {
        auto rec = exact_record("limit", M, N, p, std::nullopt,
                                "decomposition s=" + std::to_string(s) + " t=" + std::to_string(t),
                                rep.contributions.at(s, t));
        out.push_back(std::move(rec));
      }
    checked.push_back(out.size());
    out.push_back(exact_record("limit", M, N, p, std::nullopt, "decomposition-total", rep.total));
    out.back().runtime_ms = ms;
  }
  cross_check(out, checked);
  return out;
}

std::vector<RunRecord> cmd_converge(Context& ctx, unsigned M, unsigned N, unsigned p, unsigned r_max) {
  const ModelParams params{M, N};
  params.validate();
  if (p == 0 || r_max == 0) throw ParameterError("p and r-max must be positive");
  long double cost = 0;
  for (unsigned r = 1; r <= r_max; ++r) cost += count_d_cost(params, p, r);
  check_budget(cost, ctx.options, "converge");

  const ExactRatio delta = delta_partition(params, p, ctx.options);
  std::vector<RunRecord> out;
  for (unsigned r = 1; r <= r_max; ++r) {
    auto d = ctx.exact("converge", M, N, p, r, "direct", [&] { return count_d(params, p, r, ctx.options); },
                       CacheKey{"d/direct", M, N, p, r});
    const ExactRatio dv = *d.value_exact;
    out.push_back(std::move(d));
    out.push_back(exact_record("converge", M, N, p, r, "beta", beta(params, p, r, delta)));
    out.push_back(exact_record("converge", M, N, p, r, "limit", delta));
    ExactRatio gap = dv - delta;
    gap.canonicalize();
    out.push_back(exact_record("converge", M, N, p, r, "gap", gap));
  }
  return out;
}

std::vector<RunRecord> cmd_mc(Context& ctx, const std::string& kind, unsigned M, unsigned N, unsigned p, unsigned r,
                              std::uint64_t samples, std::uint64_t seed) {
  const ModelParams params{M, N};
  params.validate();
  if (p == 0) throw ParameterError("p must be positive");
  std::vector<RunRecord> out;
  std::optional<RunRecord> exact;
  McEstimate est;
  const auto start = std::chrono::steady_clock::now();
  if (kind == "model") {
    if (r == 0) throw ParameterError("mc --kind model needs --r");
    est = mc_estimate_c(params, p, r, samples, seed, ctx.options);
    if (count_d_cost(params, p, r) <= static_cast<long double>(ctx.options.budget))
      exact = ctx.exact("mc", M, N, p, r, "direct",
                        [&] { return c_from_d(count_d(params, p, r, ctx.options), params, p); },
                        CacheKey{"c/direct", M, N, p, r});
  } else {
    est = mc_estimate_delta(params, p, samples, seed, ctx.options);
    exact = ctx.exact("mc", M, N, p, std::nullopt, "partition",
                      [&] { return delta_partition(params, p, ctx.options); },
                      CacheKey{"delta/partition", M, N, p, std::nullopt});
  }
  RunRecord rec = float_record("mc", M, N, p, kind == "model" ? std::optional<unsigned>(r) : std::nullopt,
                               kind == "model" ? "mc-model" : "mc-gram", est.mean);
  rec.std_error = est.std_error;
  rec.seed = seed;
  rec.runtime_ms = ctx.elapsed(start);
  if (exact) rec.z = z_score(est, exact->value_float);
  out.push_back(std::move(rec));
  if (exact) out.push_back(std::move(*exact));
  return out;
}

std::vector<RunRecord> cmd_asymptotic(Context& ctx, const std::string& t_text, unsigned p,
                                      const std::vector<unsigned>& N_values) {
  const ExactRatio t = parse_ratio(t_text);
  const auto start = std::chrono::steady_clock::now();
  const auto report = regime_check(t, p, N_values, ctx.options);
  const auto ms = ctx.elapsed(start);
  std::vector<RunRecord> out;
  for (const auto& row : report.rows) {
    auto add = [&](const char* method, const ExactRatio& v) {
      out.push_back(exact_record("asymptotic", row.M, row.N, p, std::nullopt, method, v));
    };
    add("partition", row.exact);
    out.back().runtime_ms = ms;
    add("free-poisson", row.predicted);
    add("relative-error", row.relative_error);
    add("chi-moment", row.chi_moment);
    add("chi-limit", row.chi_limit);
  }
  return out;
}

std::vector<RunRecord> cmd_estimate(Context& ctx, const std::string& kind, unsigned N,
                                    const std::vector<unsigned>& points) {
  std::vector<RunRecord> out;
  const bool decay = kind == "decay" || kind == "thm64";
  for (unsigned x : points) {
    const auto start = std::chrono::steady_clock::now();
    double value = 0;
    double estimate = 0;
    std::string method;
    if (decay) {
      // delta_p(2, N)
      value = delta_m2_float(N, x);
      estimate = decay_estimate(N, x);
      method = "binomial-float";
    } else if (N <= 2) {
      value = moment_integral_float(N, x);
      estimate = richmond_shallit(N, x);
      method = "closed-form";
    } else {
      value = to_double(moment_integral(N, x, ctx.options));
      estimate = richmond_shallit(N, x);
      method = "dp";
    }
    const unsigned M = decay ? 2 : 0;
    out.push_back(float_record("estimate", M, N, x, std::nullopt, method, value));
    out.back().runtime_ms = ctx.elapsed(start);
    out.push_back(float_record("estimate", M, N, x, std::nullopt, "estimate", estimate));
    out.push_back(float_record("estimate", M, N, x, std::nullopt, "ratio", value / estimate));
  }
  return out;
}

std::vector<char*> make_argv(std::vector<std::string>& storage) {
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return argv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo moments of the Fourier-matrix quantum permutation models", "dfm"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::function<std::vector<RunRecord>(Context&)> action;

  unsigned M = 0, N = 0, p = 0, r = 0, r_max = 0;
  std::vector<std::string> methods;
  std::string report, kind, t_text;
  std::uint64_t samples = 2000, seed = 1;
  std::vector<unsigned> N_values, points;

  auto* truncated = app.add_subcommand("truncated", "truncated moments d_p^r");
  truncated->add_option("--M", M)->required();
  truncated->add_option("--N", N)->required();
  truncated->add_option("--p", p)->required();
  truncated->add_option("--r", r)->required();
  truncated->add_option("--method", methods, "direct, alpha, beta, closed-form")->delimiter(',');
  add_common(truncated, flags);
  truncated->callback([&] {
    if (methods.empty()) methods = {"direct"};
    action = [&](Context& ctx) { return cmd_truncated(ctx, M, N, p, r, methods); };
  });

  auto* limit = app.add_subcommand("limit", "limiting moments delta_p");
  limit->add_option("--M", M)->required();
  limit->add_option("--N", N)->required();
  limit->add_option("--p", p)->required();
  limit->add_option("--method", methods, "direct, partition, binomial, bound")->delimiter(',');
  limit->add_option("--report", report, "decomposition");
  add_common(limit, flags);
  limit->callback([&] {
    if (methods.empty()) methods = {"partition"};
    action = [&](Context& ctx) { return cmd_limit(ctx, M, N, p, methods, report); };
  });

  auto* converge = app.add_subcommand("converge", "d_p^r, beta_p^r and delta_p for r = 1..r-max");
  converge->add_option("--M", M)->required();
  converge->add_option("--N", N)->required();
  converge->add_option("--p", p)->required();
  converge->add_option("--r-max", r_max)->required();
  add_common(converge, flags);
  converge->callback([&] { action = [&](Context& ctx) { return cmd_converge(ctx, M, N, p, r_max); }; });

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates against exact values");
  mc->add_option("--kind", kind, "model or gram")->required()->check(CLI::IsMember({"model", "gram"}));
  mc->add_option("--M", M)->required();
  mc->add_option("--N", N)->required();
  mc->add_option("--p", p)->required();
  mc->add_option("--r", r, "number of fibers (model only)");
  mc->add_option("--samples", samples)->check(CLI::PositiveNumber);
  mc->add_option("--seed", seed);
  add_common(mc, flags);
  mc->callback([&] { action = [&](Context& ctx) { return cmd_mc(ctx, kind, M, N, p, r, samples, seed); }; });

  auto* asymptotic = app.add_subcommand("asymptotic", "delta_p(tN, N) against the free Poisson prediction");
  asymptotic->add_option("--t", t_text, "positive rational")->required();
  asymptotic->add_option("--p", p)->required();
  asymptotic->add_option("--N", N_values)->required()->delimiter(',');
  add_common(asymptotic, flags);
  asymptotic->callback([&] { action = [&](Context& ctx) { return cmd_asymptotic(ctx, t_text, p, N_values); }; });

  auto* estimate = app.add_subcommand("estimate", "large-argument estimates against exact sums");
  estimate->add_option("--kind", kind, "decay (delta_p(2,N) in p) or rs (multinomial sums in k)")
      ->required()
      ->check(CLI::IsMember({"decay", "thm64", "rs"}));
  estimate->add_option("--N", N)->required();
  auto* p_opt = estimate->add_option("--p", points, "values of p (decay)")->delimiter(',');
  auto* k_opt = estimate->add_option("--k", points, "values of k (rs)")->delimiter(',');
  p_opt->excludes(k_opt);
  add_common(estimate, flags);
  estimate->callback([&] {
    if (points.empty()) throw CLI::ValidationError("estimate", "--p or --k is required");
    action = [&](Context& ctx) { return cmd_estimate(ctx, kind, N, points); };
  });

  std::vector<std::string> storage{"dfm"};
  storage.insert(storage.end(), args.begin(), args.end());
  auto argv = make_argv(storage);
  try {
    app.parse(static_cast<int>(storage.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kParameterError;
  }

  try {
    Context ctx(flags, err);
    std::vector<RunRecord> records = action(ctx);
    const Format format = flags.format == "json" ? Format::json : Format::csv;
    if (flags.out.empty()) {
      write_records(out, records, format);
    } else {
      std::ofstream file(flags.out);
      if (!file) throw Error("cannot open " + flags.out);
      write_records(file, records, format);
    }
    return kSuccess;
  } catch (const CrossCheckError& e) {
    err << "cross-check failed: " << e.what() << '\n';
    write_records(err, e.conflicting(), Format::csv);
    return kCrossCheckFailure;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace dfm::cli
