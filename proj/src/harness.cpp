#include "dosprop/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "dosprop/error.hpp"
#include "dosprop/testing.hpp"

namespace dosprop {

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(Errc::BadConfig, what); }

double parse_number(const std::string& text, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    bad_config("cannot read a number from '" + text + "' in " + context);
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string alpha_tag(double alpha) {
  if (alpha == 1.0) return "1";
  if (alpha == 0.5) return "05";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

// Runs body(r) for every replicate, striding across `threads` workers. Results
// are written by replicate index, so the schedule never changes the output.
template <typename Body>
void for_each_replicate(std::size_t replicates, unsigned threads, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicates)));
  if (workers == 1) {
    for (std::size_t r = 0; r < replicates; ++r) body(r);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t r = w; r < replicates; r += workers) body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct ReplicateTable {
  std::size_t estimators = 0;
  std::vector<double> count;  // [r * estimators + e]
  std::vector<double> k_hat;
  std::vector<double> fdp;
  std::vector<double> power;

  ReplicateTable(std::size_t reps, std::size_t est, bool with_fdr)
      : estimators(est), count(reps * est), k_hat(reps * est, -1.0) {
    if (with_fdr) {
      fdp.resize(reps * est);
      power.resize(reps * est);
    }
  }
};

AggregateStats summarise(const ExperimentConfig& config, const std::vector<EstimatorSpec>& specs,
                         const ReplicateTable& table, std::optional<double> level) {
  AggregateStats out;
  out.scenario = describe(config.scenario);
  out.n = sample_size(config.scenario);
  out.false_nulls = false_null_count(config.scenario);
  out.replicate_count = config.replicates;
  out.seed = config.master_seed;
  out.level = level;

  const std::size_t reps = config.replicates;
  const double N = static_cast<double>(reps);
  const double truth = static_cast<double>(out.false_nulls);
  const std::size_t E = specs.size();

  std::optional<double> oracle_power;
  for (std::size_t e = 0; e < E; ++e) {
    EstimatorStats s;
    s.label = specs[e].label;
    double sum = 0.0, sq_err = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double v = table.count[r * E + e];
      sum += v;
      sq_err += (v - truth) * (v - truth);
    }
    s.mean_count = sum / N;
    s.bias = s.mean_count - truth;
    s.rmse = std::sqrt(sq_err / N);
    double ss = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = table.count[r * E + e] - s.mean_count;
      ss += d * d;
    }
    s.sd = reps > 1 ? std::sqrt(ss / (N - 1.0)) : 0.0;

    if (specs[e].uses_changepoint()) {
      double k = 0.0;
      for (std::size_t r = 0; r < reps; ++r) k += table.k_hat[r * E + e];
      s.mean_changepoint = k / N;
    }
    if (!table.fdp.empty()) {
      double f = 0.0, p = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        f += table.fdp[r * E + e];
        p += table.power[r * E + e];
      }
      s.fdr = f / N;
      s.mean_power = p / N;
      double fss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = table.fdp[r * E + e] - *s.fdr;
        fss += d * d;
      }
      s.fdr_se = reps > 1 ? std::sqrt(fss / (N - 1.0) / N) : 0.0;
      if (specs[e].kind == EstimatorKind::oracle && !oracle_power) oracle_power = s.mean_power;
    }
    out.estimators.push_back(std::move(s));
  }

  if (oracle_power) {
    for (auto& s : out.estimators) {
      if (*oracle_power > 0.0) {
        s.relative_power = *s.mean_power / *oracle_power;
      } else {
        s.relative_power = *s.mean_power > 0.0 ? *s.mean_power / *oracle_power : 1.0;
      }
    }
  }
  return out;
}

AggregateStats run(const ExperimentConfig& config, const std::vector<EstimatorSpec>& specs,
                   std::optional<double> level) {
  const std::size_t E = specs.size();
  const std::size_t n1 = false_null_count(config.scenario);
  ReplicateTable table(config.replicates, E, level.has_value());

  for_each_replicate(config.replicates, config.threads, [&](std::size_t r) {
    Rng data_rng = Rng::for_stream(config.master_seed, r, 0);
    const LabeledSample data = generate(config.scenario, data_rng);
    const double n = static_cast<double>(data.sample.size());
    for (std::size_t e = 0; e < E; ++e) {
      Rng est_rng = Rng::for_stream(config.master_seed, r, 1 + e);
      const auto outcome = apply_estimator(specs[e], data.sample, n1, est_rng);
      table.count[r * E + e] = n * outcome.pi1;
      if (outcome.k_hat) table.k_hat[r * E + e] = static_cast<double>(*outcome.k_hat);
      if (level) {
        const auto rejections = adaptive_bh(data.sample, *level, outcome.pi0);
        const auto metrics = confusion_metrics(rejections, data.truth);
        table.fdp[r * E + e] = metrics.fdp;
        table.power[r * E + e] = metrics.power;
      }
    }
  });
  return summarise(config, specs, table, level);
}

}  // namespace

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
  EstimatorSpec s;
  const auto parts = split(text, ':');
  const std::string& head = parts[0];
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) bad_config("bad estimator spec '" + text + "'");
  };

  if (head == "dos1" || head == "dos05" || head == "udos1" || head == "udos05") {
    arity(0, 0);
    s.kind = head[0] == 'u' ? EstimatorKind::udos : EstimatorKind::dos;
    s.dos.alpha = head.ends_with("05") ? 0.5 : 1.0;
  } else if (head == "dos" || head == "udos") {
    arity(0, 2);
    s.kind = head == "dos" ? EstimatorKind::dos : EstimatorKind::udos;
    if (parts.size() >= 2) s.dos.alpha = parse_number(parts[1], text);
    if (parts.size() == 3) s.dos.c = parse_number(parts[2], text);
  } else if (head == "st-half" || head == "st-1/2") {
    arity(0, 0);
    s.kind = EstimatorKind::storey;
    s.lambda = 0.5;
  } else if (head == "storey") {
    arity(1, 1);
    s.kind = EstimatorKind::storey;
    s.lambda = parse_number(parts[1], text);
  } else if (head == "st-med") {
    arity(0, 0);
    s.kind = EstimatorKind::st_med;
  } else if (head == "lsl") {
    arity(0, 0);
    s.kind = EstimatorKind::lsl;
  } else if (head == "jd") {
    arity(0, 1);
    s.kind = EstimatorKind::jd;
    if (parts.size() == 2) {
      const double b = parse_number(parts[1], text);
      if (!(b >= 1.0) || b != std::floor(b)) bad_config("JD bootstrap count must be a positive integer in '" + text + "'");
      s.jd.bootstrap_reps = static_cast<std::size_t>(b);
    }
  } else if (head == "oracle") {
    arity(0, 0);
    s.kind = EstimatorKind::oracle;
  } else if (head == "fixed") {
    arity(1, 1);
    s.kind = EstimatorKind::fixed;
    s.fixed_pi0 = parse_number(parts[1], text);
  } else {
    bad_config("unknown estimator '" + text + "'");
  }
  s.label = default_label(s);
  s.validate();
  return s;
}

std::string EstimatorSpec::default_label(const EstimatorSpec& spec) {
  char buf[64];
  switch (spec.kind) {
    case EstimatorKind::dos:
    case EstimatorKind::udos: {
      std::string label = (spec.kind == EstimatorKind::dos ? "DOS" : "uDOS") + alpha_tag(spec.dos.alpha);
      if (spec.dos.c != 0.0) {
        std::snprintf(buf, sizeof buf, "(c=%g)", spec.dos.c);
        label += buf;
      }
      return label;
    }
    case EstimatorKind::storey:
      if (spec.lambda == 0.5) return "ST-1/2";
      std::snprintf(buf, sizeof buf, "ST(%g)", spec.lambda);
      return buf;
    case EstimatorKind::st_med: return "ST-MED";
    case EstimatorKind::lsl: return "LSL";
    case EstimatorKind::jd: return "JD";
    case EstimatorKind::oracle: return "ORACLE";
    case EstimatorKind::fixed:
      if (spec.fixed_pi0 == 1.0) return "BH";
      std::snprintf(buf, sizeof buf, "FIXED(%g)", spec.fixed_pi0);
      return buf;
  }
  return "?";
}

void EstimatorSpec::validate() const {
  switch (kind) {
    case EstimatorKind::dos:
    case EstimatorKind::udos: dos.validate(); break;
    case EstimatorKind::storey:
      if (!(lambda > 0.0 && lambda < 1.0)) throw Error(Errc::BadLambda, "Storey lambda must lie in (0,1)");
      break;
    case EstimatorKind::jd:
      if (jd.lambda_grid.empty()) throw Error(Errc::BadGrid, "JD lambda grid is empty");
      for (double l : jd.lambda_grid) {
        if (!(l > 0.0 && l < 1.0)) throw Error(Errc::BadGrid, "JD lambda grid value outside (0,1)");
      }
      if (jd.bootstrap_reps < 1) throw Error(Errc::BadB, "JD needs at least one bootstrap resample");
      break;
    case EstimatorKind::fixed:
      if (!(fixed_pi0 > 0.0 && fixed_pi0 <= 1.0)) throw Error(Errc::BadPi0, "fixed pi0 must lie in (0,1]");
      break;
    default: break;
  }
  if (label.empty()) bad_config("estimator label is empty");
}

EstimatorOutcome apply_estimator(const EstimatorSpec& spec, const PValueSample& sample, std::size_t false_nulls,
                                 Rng& rng) {
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  EstimatorOutcome out;
  auto take = [&](const ProportionEstimate& est) {
    out.pi1 = est.pi1;
    out.pi0 = est.pi0;
  };
  switch (spec.kind) {
    case EstimatorKind::dos: {
      const auto est = dos_storey(sample, spec.dos);
      take(to_proportion(est, n, "dos"));
      out.pi1 = est.pi1;
      out.k_hat = est.k_hat;
      break;
    }
    case EstimatorKind::udos: {
      const auto cp = dos_changepoint(sample, spec.dos);
      out.pi1 = static_cast<double>(cp.k_hat) / nd;
      out.pi0 = 1.0 - out.pi1;
      out.k_hat = cp.k_hat;
      break;
    }
    case EstimatorKind::storey: take(storey_at(sample, spec.lambda)); break;
    case EstimatorKind::st_med: take(st_median(sample)); break;
    case EstimatorKind::lsl: take(lsl(sample)); break;
    case EstimatorKind::jd: take(jd_bootstrap(sample, spec.jd, rng)); break;
    case EstimatorKind::oracle:
      out.pi1 = static_cast<double>(false_nulls) / nd;
      out.pi0 = std::max(1.0 / nd, 1.0 - out.pi1);
      break;
    case EstimatorKind::fixed:
      out.pi0 = spec.fixed_pi0;
      out.pi1 = 1.0 - spec.fixed_pi0;
      break;
  }
  return out;
}

void ExperimentConfig::validate() const {
  dosprop::validate(scenario);
  if (replicates < 1) bad_config("replicates must be at least 1");
  if (estimators.empty()) bad_config("estimator list is empty");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    estimators[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (estimators[j].label == estimators[i].label) bad_config("duplicate estimator label '" + estimators[i].label + "'");
    }
  }
  if (level && !(*level > 0.0 && *level < 1.0)) throw Error(Errc::BadLevel, "FDR level must lie in (0,1)");
}

const EstimatorStats& AggregateStats::at(const std::string& label) const {
  for (const auto& s : estimators) {
    if (s.label == label) return s;
  }
  throw Error(Errc::BadConfig, "no estimator labelled '" + label + "' in report");
}

AggregateStats run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run(config, config.estimators, std::nullopt);
}

AggregateStats run_fdr_experiment(const ExperimentConfig& config, double level) {
  config.validate();
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::BadLevel, "FDR level must lie in (0,1)");
  auto specs = config.estimators;
  const bool has_oracle =
      std::any_of(specs.begin(), specs.end(), [](const auto& s) { return s.kind == EstimatorKind::oracle; });
  if (!has_oracle) specs.push_back(EstimatorSpec::parse("oracle"));
  return run(config, specs, level);
}

std::vector<SweepRow> sweep_c(const ExperimentConfig& config, const std::vector<double>& c_values) {
  for (double c : c_values) {
    if (!(c >= 0.0 && c < 0.5)) throw Error(Errc::BadCValue, "sweep value c must lie in [0, 1/2), got " + std::to_string(c));
  }
  std::vector<SweepRow> rows;
  for (double c : c_values) {
    ExperimentConfig cfg = config;
    for (auto& e : cfg.estimators) {
      if (e.uses_changepoint()) e.dos.c = c;
    }
    rows.push_back({c, run_experiment(cfg)});
  }
  return rows;
}

}  // namespace dosprop
