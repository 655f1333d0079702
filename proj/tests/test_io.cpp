#include <filesystem>
#include <string>

#include <doctest.h>

#include "dosprop/io.hpp"
#include "test_util.hpp"

using namespace dosprop;

namespace {

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text.compare(pos, prefix.size(), prefix) == 0) ++n;
    pos = text.find('\n', pos);
    if (pos == std::string::npos) break;
    ++pos;
  }
  return n;
}

AggregateStats sample_stats(bool with_fdr) {
  ExperimentConfig cfg;
  cfg.scenario = GaussianScenario{120, 0.1, 3.0, 0.0, 0.2};
  cfg.estimators = {EstimatorSpec::parse("dos1"), EstimatorSpec::parse("st-half"), EstimatorSpec::parse("lsl")};
  cfg.replicates = 37;
  cfg.master_seed = 8675309;
  return with_fdr ? run_fdr_experiment(cfg, 0.05) : run_experiment(cfg);
}

}  // namespace

TEST_SUITE("p-value files") {
  TEST_CASE("plain lines") {
    const auto s = parse_pvalues("0.1\n0.5\n0.9\n0.2\n", {});
    CHECK(s.size() == 4);
    CHECK(s.order_stat(1) == 0.1);
  }

  TEST_CASE("blank lines and CRLF are tolerated") {
    CHECK(parse_pvalues("0.1\r\n\r\n  0.5 \n\n0.9\n0.2", {}).size() == 4);
  }

  TEST_CASE("csv by header name or column number") {
    const std::string csv = "id,p\na,0.1\nb,0.5\nc,0.9\nd,0.2\n";
    CHECK(parse_pvalues(csv, PValueFormat::parse("csv:p")).size() == 4);
    CHECK(parse_pvalues(csv, PValueFormat::parse("csv:2")).values() ==
          parse_pvalues(csv, PValueFormat::parse("csv:p")).values());
    CHECK_ERRC(parse_pvalues(csv, PValueFormat::parse("csv:q")), Errc::ParseError);
  }

  TEST_CASE("unparsable row reports its line") {
    try {
      parse_pvalues("0.1\n\nabc\n0.2\n", {});
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(e.index() == 3);
    }
  }

  TEST_CASE("out-of-range value names the line") {
    try {
      parse_pvalues("0.1\n\n1.5\n", {});
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::OutOfRange);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("empty file") { CHECK_ERRC(parse_pvalues("\n\n", {}), Errc::EmptyInput); }

  TEST_CASE("missing file is an I/O error") {
    CHECK_ERRC(read_pvalues("/nonexistent/dir/p.txt", {}), Errc::IoError);
  }

  TEST_CASE("format strings") {
    CHECK(PValueFormat::parse("plain").kind == PValueFormat::Kind::plain);
    CHECK(PValueFormat::parse("csv:pval").column == "pval");
    CHECK_ERRC(PValueFormat::parse("tsv"), Errc::BadConfig);
    CHECK_ERRC(PValueFormat::parse("csv:"), Errc::BadConfig);
  }

  TEST_CASE("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "dosprop_io_test.txt";
    write_file(path, "0.3\n0.01\n0.7\n0.02\n");
    const auto s = read_pvalues(path, {});
    CHECK(s.values() == std::vector<double>{0.01, 0.02, 0.3, 0.7});
    CHECK(s.original_index(0) == 1);
    std::filesystem::remove(path);
  }
}

TEST_SUITE("reports") {
  TEST_CASE("single estimator gives a three-row markdown table") {
    ExperimentConfig cfg;
    cfg.scenario = GaussianScenario{100, 0.1, 3.0, 0.0, 0.0};
    cfg.estimators = {EstimatorSpec::parse("dos1")};
    cfg.replicates = 10;
    cfg.master_seed = 31337;
    const auto md = write_report(run_experiment(cfg), ReportFormat::markdown);
    CHECK(count_lines_starting(md, "| BIAS |") == 1);
    CHECK(count_lines_starting(md, "| SD |") == 1);
    CHECK(count_lines_starting(md, "| RMSE |") == 1);
    CHECK(count_lines_starting(md, "|") == 5);  // header, rule, three rows
    CHECK(md.find("seed: 31337") != std::string::npos);
    CHECK(md.find("DOS1") != std::string::npos);
  }

  TEST_CASE("fdr report adds FDR and POWER rows") {
    const auto md = write_report(sample_stats(true), ReportFormat::markdown);
    CHECK(count_lines_starting(md, "| FDR |") == 1);
    CHECK(count_lines_starting(md, "| POWER |") == 1);
    CHECK(md.find("ORACLE") != std::string::npos);
    CHECK(md.find("level: 0.05") != std::string::npos);
  }

  TEST_CASE("csv round trip is exact") {
    for (bool fdr : {false, true}) {
      const auto stats = sample_stats(fdr);
      const auto back = parse_report_csv(write_report(stats, ReportFormat::csv));
      CHECK(back.scenario == stats.scenario);
      CHECK(back.seed == stats.seed);
      CHECK(back.n == stats.n);
      CHECK(back.false_nulls == stats.false_nulls);
      CHECK(back.replicate_count == stats.replicate_count);
      CHECK(back.level == stats.level);
      REQUIRE(back.estimators.size() == stats.estimators.size());
      for (std::size_t i = 0; i < stats.estimators.size(); ++i) {
        const auto& a = stats.estimators[i];
        const auto& b = back.estimators[i];
        CHECK(a.label == b.label);
        CHECK(a.mean_count == b.mean_count);
        CHECK(a.bias == b.bias);
        CHECK(a.sd == b.sd);
        CHECK(a.rmse == b.rmse);
        CHECK(a.mean_changepoint == b.mean_changepoint);
        CHECK(a.fdr == b.fdr);
        CHECK(a.fdr_se == b.fdr_se);
        CHECK(a.mean_power == b.mean_power);
        CHECK(a.relative_power == b.relative_power);
      }
    }
  }

  TEST_CASE("malformed csv") {
    CHECK_ERRC(parse_report_csv("# seed: 1\n"), Errc::ParseError);
    CHECK_ERRC(parse_report_csv("wrong,header\n"), Errc::ParseError);
    const auto good = write_report(sample_stats(false), ReportFormat::csv);
    CHECK_ERRC(parse_report_csv(good + "X,1,2\n"), Errc::ParseError);
  }

  TEST_CASE("sweep report has one section per c") {
    ExperimentConfig cfg;
    cfg.scenario = GaussianScenario{100, 0.1, 3.0, 0.0, 0.0};
    cfg.estimators = {EstimatorSpec::parse("dos1")};
    cfg.replicates = 5;
    const auto rows = sweep_c(cfg, {0.0, 0.02});
    const auto md = write_sweep_report(rows, ReportFormat::markdown);
    CHECK(md.find("c = 0\n") != std::string::npos);
    CHECK(md.find("c = 0.02\n") != std::string::npos);
    CHECK(count_lines_starting(md, "| MEAN K |") == 2);
    const auto csv = write_sweep_report(rows, ReportFormat::csv);
    CHECK(count_lines_starting(csv, "0.02,DOS1,") == 1);
  }

  TEST_CASE("report format names") {
    CHECK(parse_report_format("csv") == ReportFormat::csv);
    CHECK(parse_report_format("md") == ReportFormat::markdown);
    CHECK_ERRC(parse_report_format("html"), Errc::BadConfig);
  }
}

TEST_SUITE("config") {
  TEST_CASE("full gaussian config") {
    const auto cfg = parse_config(R"({
      "scenario": {"kind": "gaussian", "n": 1000, "pi1": 0.01, "mu1": 3.5, "rho": 0.2},
      "estimators": ["dos1", "st-half", {"method": "jd", "B": 30, "grid": [0.2, 0.5]},
                     {"method": "dos", "alpha": 0.75, "c": 0.01, "label": "mine"}],
      "replicates": 50, "seed": 9, "threads": 2, "level": 0.1
    })");
    const auto& g = std::get<GaussianScenario>(cfg.scenario);
    CHECK(g.n == 1000);
    CHECK(g.mu1 == 3.5);
    CHECK(g.rho == 0.2);
    CHECK(g.mu0 == 0.0);
    REQUIRE(cfg.estimators.size() == 4);
    CHECK(cfg.estimators[2].jd.bootstrap_reps == 30);
    CHECK(cfg.estimators[2].jd.lambda_grid == std::vector<double>{0.2, 0.5});
    CHECK(cfg.estimators[3].dos.alpha == 0.75);
    CHECK(cfg.estimators[3].label == "mine");
    CHECK(cfg.replicates == 50);
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.threads == 2);
    CHECK(cfg.level == 0.1);
  }

  TEST_CASE("composite scenario maps r to the two means") {
    const auto cfg = parse_config(R"({"scenario": {"kind": "composite", "n": 100, "pi1": 0.25, "r": 5},
                                      "estimators": ["udos1"]})");
    const auto& g = std::get<GaussianScenario>(cfg.scenario);
    CHECK(g.mu0 == doctest::Approx(-1.0));
    CHECK(g.mu1 == doctest::Approx(2.25));
  }

  TEST_CASE("uniform mixture scenario") {
    const auto cfg = parse_config(R"({"scenario": {"kind": "uniform_mixture", "n": 500, "pi1": 0.2, "b": 0.1},
                                      "estimators": ["dos05"]})");
    CHECK(std::get<UniformMixtureScenario>(cfg.scenario).b == 0.1);
  }

  TEST_CASE("errors") {
    CHECK_ERRC(parse_config("{"), Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": 10, "pi1": 0.1, "mu1": 3}})"), Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": 10, "pi1": 0.1, "mu1": 3},
                                "estimators": ["dos1"], "colour": 1})"),
               Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": 10, "pi1": 0.1, "mu1": 3, "sigma": 1},
                                "estimators": ["dos1"]})"),
               Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "beta"}, "estimators": ["dos1"]})"), Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": -5, "pi1": 0.1, "mu1": 3},
                                "estimators": ["dos1"]})"),
               Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": 10, "pi1": 0.1, "mu1": 3},
                                "estimators": [{"method": "dos1", "beta": 2}]})"),
               Errc::BadConfig);
    CHECK_ERRC(parse_config(R"({"scenario": {"kind": "gaussian", "n": 10, "pi1": 0.1, "mu1": "3"},
                                "estimators": ["dos1"]})"),
               Errc::BadConfig);
  }

  TEST_CASE("model specs and number lists") {
    CHECK(parse_model_spec("gaussian:0.1,3").pi1() == 0.1);
    CHECK(parse_model_spec("uniform:0.2,0.1").cdf(0.1) == doctest::Approx(0.28));
    CHECK(std::holds_alternative<CompositeGaussianModel>(parse_model_spec("composite:0.25,-1,2.25").kind()));
    CHECK(std::holds_alternative<PiecewiseLinearModel>(
        parse_model_spec("piecewise:0.1/0.2/0.3/0.4,0.1/0.2/0.4/0.9").kind()));
    CHECK_ERRC(parse_model_spec("gaussian:0.1"), Errc::BadConfig);
    CHECK_ERRC(parse_model_spec("weibull:1,2"), Errc::BadConfig);
    CHECK_ERRC(parse_model_spec("gaussian"), Errc::BadConfig);
    CHECK_ERRC(parse_model_spec("gaussian:1.5,3"), Errc::BadModel);
    CHECK(parse_number_list("0, 0.01,0.02") == std::vector<double>{0.0, 0.01, 0.02});
    CHECK_ERRC(parse_number_list("0,,1"), Errc::BadConfig);
  }
}
