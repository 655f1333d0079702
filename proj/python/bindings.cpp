#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dosprop/asymptotics.hpp"
#include "dosprop/error.hpp"
#include "dosprop/estimators.hpp"
#include "dosprop/harness.hpp"
#include "dosprop/io.hpp"
#include "dosprop/models.hpp"
#include "dosprop/testing.hpp"

namespace py = pybind11;
using namespace dosprop;

namespace {

PValueSample sample_of(const std::vector<double>& p) { return validate_sample(p); }

py::dict proportion_dict(const ProportionEstimate& e) {
  py::dict d;
  d["method"] = e.method;
  d["pi1"] = e.pi1;
  d["pi0"] = e.pi0;
  d["pi0_raw"] = e.pi0_raw;
  d["lambda"] = e.lambda_used ? py::cast(*e.lambda_used) : py::none();
  return d;
}

py::dict rejection_dict(const RejectionSet& r) {
  py::dict d;
  d["rejected"] = r.rejected_count;
  d["indices"] = r.rejected_original_indices;
  d["threshold_rank"] = r.threshold_rank;
  d["effective_level"] = r.effective_level;
  return d;
}

py::dict stats_dict(const AggregateStats& s) {
  py::dict d;
  d["scenario"] = s.scenario;
  d["n"] = s.n;
  d["false_nulls"] = s.false_nulls;
  d["replicates"] = s.replicate_count;
  d["seed"] = s.seed;
  d["level"] = s.level;
  py::list rows;
  for (const auto& e : s.estimators) {
    py::dict r;
    r["label"] = e.label;
    r["mean_count"] = e.mean_count;
    r["bias"] = e.bias;
    r["sd"] = e.sd;
    r["rmse"] = e.rmse;
    r["mean_changepoint"] = e.mean_changepoint;
    r["fdr"] = e.fdr;
    r["fdr_se"] = e.fdr_se;
    r["mean_power"] = e.mean_power;
    r["relative_power"] = e.relative_power;
    rows.append(r);
  }
  d["estimators"] = rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dosprop, m) {
  m.doc() = "Difference-of-slopes estimation of the false-null proportion";

  // Library errors surface as DosPropError, a ValueError subclass.
  py::register_exception<Error>(m, "DosPropError", PyExc_ValueError);

  m.def("dos_sequence", [](const std::vector<double>& p, double alpha) {
    return dos_sequence(sample_of(p), alpha);
  }, py::arg("p"), py::arg("alpha") = 1.0);

  m.def("dos_changepoint", [](const std::vector<double>& p, double alpha, double c) {
    const auto cp = dos_changepoint(sample_of(p), DosParams{alpha, c});
    return py::make_tuple(cp.k_hat, cp.lambda);
  }, py::arg("p"), py::arg("alpha") = 1.0, py::arg("c") = 0.0);

  m.def("dos_storey", [](const std::vector<double>& p, double alpha, double c) {
    const auto e = dos_storey(sample_of(p), DosParams{alpha, c});
    py::dict d;
    d["k_hat"] = e.k_hat;
    d["lambda"] = e.lambda;
    d["pi1_raw"] = e.pi1_raw;
    d["pi1"] = e.pi1;
    return d;
  }, py::arg("p"), py::arg("alpha") = 1.0, py::arg("c") = 0.0);

  m.def("udos", [](const std::vector<double>& p, double alpha, double c) {
    return proportion_dict(udos(sample_of(p), DosParams{alpha, c}));
  }, py::arg("p"), py::arg("alpha") = 1.0, py::arg("c") = 0.0);

  m.def("storey", [](const std::vector<double>& p, double lambda) {
    return proportion_dict(storey_at(sample_of(p), lambda));
  }, py::arg("p"), py::arg("lam") = 0.5);

  m.def("st_median", [](const std::vector<double>& p) { return proportion_dict(st_median(sample_of(p))); },
        py::arg("p"));
  m.def("lsl", [](const std::vector<double>& p) { return proportion_dict(lsl(sample_of(p))); }, py::arg("p"));

  m.def("jd", [](const std::vector<double>& p, std::optional<std::vector<double>> grid, std::size_t B,
                 std::uint64_t seed) {
    JdOptions opts;
    if (grid) opts.lambda_grid = *grid;
    opts.bootstrap_reps = B;
    Rng rng(seed);
    return proportion_dict(jd_bootstrap(sample_of(p), opts, rng));
  }, py::arg("p"), py::arg("grid") = py::none(), py::arg("B") = 100, py::arg("seed") = 1);

  m.def("bh", [](const std::vector<double>& p, double level) {
    return rejection_dict(bh_rejections(sample_of(p), level));
  }, py::arg("p"), py::arg("level"));

  m.def("adaptive_bh", [](const std::vector<double>& p, double level, double pi0) {
    return rejection_dict(adaptive_bh(sample_of(p), level, pi0));
  }, py::arg("p"), py::arg("level"), py::arg("pi0"));

  m.def("generate", [](const std::string& kind, std::size_t n, double pi1, double param, double mu0, double rho,
                       std::uint64_t seed) {
    Scenario sc;
    if (kind == "gaussian") {
      sc = GaussianScenario{n, pi1, param, mu0, rho};
    } else if (kind == "uniform") {
      sc = UniformMixtureScenario{n, pi1, param};
    } else {
      throw Error(Errc::BadScenario, "unknown scenario kind '" + kind + "'");
    }
    Rng rng(seed);
    const auto ls = generate(sc, rng);
    std::vector<double> p(ls.sample.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[ls.sample.original_index(k)] = ls.sample.values()[k];
    return py::make_tuple(p, ls.truth.is_false_null);
  }, py::arg("kind"), py::arg("n"), py::arg("pi1"), py::arg("param"), py::arg("mu0") = 0.0, py::arg("rho") = 0.0,
     py::arg("seed") = 1,
     "Returns (p-values, false-null flags) in generation order. param is mu1 for gaussian, b for uniform.");

  m.def("ideal_changepoint", [](const std::string& model, double alpha) {
    const auto q = parse_model_spec(model);
    const auto r = check_a2(q, alpha);
    py::dict d;
    d["a2"] = a2_status_name(r.status);
    if (r.status == A2Status::ok) {
      const auto ideal = ideal_changepoint(q, alpha, false);
      d["t_tilde"] = ideal.t_tilde;
      d["quantile_at_t"] = ideal.quantile_at_t;
      d["pi1_estimable"] = ideal.pi1_estimable;
      d["h_at_max"] = ideal.h_at_max;
    } else {
      d["grid_argmax"] = r.t_at_max;
      d["h_max"] = r.h_max;
    }
    return d;
  }, py::arg("model"), py::arg("alpha") = 1.0, "model is gaussian:PI1,MU1 | uniform:PI1,B | composite:PI1,MU0,MU1");

  m.def("run_config", [](const std::string& json_text, std::optional<double> level) {
    const auto cfg = parse_config(json_text);
    const auto level_used = level ? level : cfg.level;
    AggregateStats stats;
    {
      py::gil_scoped_release release;
      stats = level_used ? run_fdr_experiment(cfg, *level_used) : run_experiment(cfg);
    }
    return stats_dict(stats);
  }, py::arg("json_text"), py::arg("level") = py::none(),
     "Runs an experiment config (same JSON as the CLI). With a level, runs the FDR study.");
}
