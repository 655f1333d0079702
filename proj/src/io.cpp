#include "dosprop/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dosprop/error.hpp"

namespace dosprop {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  std::string s(buf);
  return s == "-0.0" ? "0.0" : s;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what, line);
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(Errc::BadConfig, what); }

}  // namespace

PValueFormat PValueFormat::parse(const std::string& text) {
  if (text == "plain") return {};
  if (text.starts_with("csv:") && text.size() > 4) return {Kind::csv, text.substr(4)};
  throw Error(Errc::BadConfig, "unknown p-value format '" + text + "' (expected plain or csv:COLUMN)");
}

PValueSample parse_pvalues(const std::string& text, const PValueFormat& format) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  std::vector<std::size_t> lines;
  std::optional<std::size_t> column;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;

    std::string cell;
    if (format.kind == PValueFormat::Kind::plain) {
      cell = trim(line);
    } else {
      const auto cells = split_csv(line);
      if (!column) {
        const auto it = std::find(cells.begin(), cells.end(), format.column);
        if (it != cells.end()) {
          column = static_cast<std::size_t>(it - cells.begin());
        } else if (const auto num = to_double(format.column);
                   num && *num >= 1.0 && *num == std::floor(*num) && *num <= static_cast<double>(cells.size())) {
          column = static_cast<std::size_t>(*num) - 1;
        } else {
          parse_error(line_no, "CSV header has no column '" + format.column + "'");
        }
        continue;
      }
      if (*column >= cells.size()) parse_error(line_no, "row has no column " + std::to_string(*column + 1));
      cell = cells[*column];
    }

    const auto v = to_double(cell);
    if (!v) parse_error(line_no, "cannot parse p-value '" + cell + "'");
    values.push_back(*v);
    lines.push_back(line_no);
  }

  try {
    return PValueSample::from(values);
  } catch (const Error& e) {
    if (e.index() && *e.index() < lines.size()) {
      throw Error(e.code(), "line " + std::to_string(lines[*e.index()]) + ": " + e.what(), e.index());
    }
    throw;
  }
}

PValueSample read_pvalues(const std::filesystem::path& path, const PValueFormat& format) {
  return parse_pvalues(read_file(path), format);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "failed reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  out << bytes;
  if (!out) throw Error(Errc::IoError, "failed writing '" + path.string() + "'");
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "md" || text == "markdown") return ReportFormat::markdown;
  throw Error(Errc::BadConfig, "unknown report format '" + text + "' (expected csv or md)");
}

namespace {

constexpr const char* kCsvColumns =
    "estimator,mean_count,bias,sd,rmse,mean_changepoint,fdr,fdr_se,mean_power,relative_power";

std::string opt(const std::optional<double>& v) { return v ? exact(*v) : std::string(); }

void header_lines(std::ostream& os, const AggregateStats& s, const char* prefix) {
  os << prefix << "scenario: " << s.scenario << "\n";
  os << prefix << "seed: " << s.seed << "\n";
  os << prefix << "replicates: " << s.replicate_count << "\n";
  os << prefix << "n: " << s.n << "\n";
  os << prefix << "false_nulls: " << s.false_nulls << "\n";
  if (s.level) os << prefix << "level: " << exact(*s.level) << "\n";
}

void csv_rows(std::ostream& os, const AggregateStats& s, const std::string& lead) {
  for (const auto& e : s.estimators) {
    os << lead << e.label << ',' << exact(e.mean_count) << ',' << exact(e.bias) << ',' << exact(e.sd) << ','
       << exact(e.rmse) << ',' << opt(e.mean_changepoint) << ',' << opt(e.fdr) << ',' << opt(e.fdr_se) << ','
       << opt(e.mean_power) << ',' << opt(e.relative_power) << "\n";
  }
}

// BIAS / SD / RMSE rows, estimators as columns.
void markdown_table(std::ostream& os, const AggregateStats& s, bool with_changepoint) {
  os << "|      |";
  for (const auto& e : s.estimators) os << ' ' << e.label << " |";
  os << "\n|------|";
  for (std::size_t i = 0; i < s.estimators.size(); ++i) os << "-----:|";
  os << "\n";
  auto row = [&](const char* name, auto get, auto render) {
    os << "| " << name << " |";
    for (const auto& e : s.estimators) os << ' ' << render(get(e)) << " |";
    os << "\n";
  };
  row("BIAS", [](const EstimatorStats& e) { return e.bias; }, fixed1);
  row("SD", [](const EstimatorStats& e) { return e.sd; }, fixed1);
  row("RMSE", [](const EstimatorStats& e) { return e.rmse; }, fixed1);
  const bool any_cp = std::any_of(s.estimators.begin(), s.estimators.end(),
                                  [](const auto& e) { return e.mean_changepoint.has_value(); });
  if (with_changepoint && any_cp) {
    row("MEAN K", [](const EstimatorStats& e) { return e.mean_changepoint; },
        [](const std::optional<double>& v) { return v ? fixed1(*v) : std::string("-"); });
  }
  if (s.level) {
    row("FDR", [](const EstimatorStats& e) { return e.fdr; },
        [](const std::optional<double>& v) { return v ? fixed3(*v) : std::string("-"); });
    row("POWER", [](const EstimatorStats& e) { return e.relative_power; },
        [](const std::optional<double>& v) { return v ? fixed3(*v) : std::string("-"); });
  }
}

}  // namespace

std::string write_report(const AggregateStats& stats, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    header_lines(os, stats, "# ");
    os << kCsvColumns << "\n";
    csv_rows(os, stats, "");
  } else {
    header_lines(os, stats, "");
    os << "\n";
    markdown_table(os, stats, false);
  }
  return os.str();
}

std::string write_sweep_report(const std::vector<SweepRow>& rows, ReportFormat format) {
  std::ostringstream os;
  if (rows.empty()) return {};
  if (format == ReportFormat::csv) {
    header_lines(os, rows.front().stats, "# ");
    os << "c," << kCsvColumns << "\n";
    for (const auto& r : rows) csv_rows(os, r.stats, exact(r.c) + ",");
  } else {
    header_lines(os, rows.front().stats, "");
    for (const auto& r : rows) {
      os << "\nc = " << exact(r.c) << "\n\n";
      markdown_table(os, r.stats, true);
    }
  }
  return os.str();
}

AggregateStats parse_report_csv(const std::string& text) {
  AggregateStats out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool seen_columns = false;

  auto number = [&](const std::string& cell) {
    const auto v = to_double(cell);
    if (!v) parse_error(line_no, "bad number '" + cell + "'");
    return *v;
  };
  auto optional_number = [&](const std::string& cell) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    return number(cell);
  };
  auto count = [&](const std::string& cell) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) parse_error(line_no, "bad integer '" + cell + "'");
    return v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("# ")) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(colon + 2);
      if (key == "scenario") out.scenario = value;
      else if (key == "seed") out.seed = count(value);
      else if (key == "replicates") out.replicate_count = count(value);
      else if (key == "n") out.n = count(value);
      else if (key == "false_nulls") out.false_nulls = count(value);
      else if (key == "level") out.level = number(value);
      continue;
    }
    if (!seen_columns) {
      if (line != kCsvColumns) parse_error(line_no, "unexpected column header");
      seen_columns = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 10) parse_error(line_no, "expected 10 fields, got " + std::to_string(cells.size()));
    EstimatorStats e;
    e.label = cells[0];
    e.mean_count = number(cells[1]);
    e.bias = number(cells[2]);
    e.sd = number(cells[3]);
    e.rmse = number(cells[4]);
    e.mean_changepoint = optional_number(cells[5]);
    e.fdr = optional_number(cells[6]);
    e.fdr_se = optional_number(cells[7]);
    e.mean_power = optional_number(cells[8]);
    e.relative_power = optional_number(cells[9]);
    out.estimators.push_back(std::move(e));
  }
  if (!seen_columns) parse_error(line_no, "no column header found");
  return out;
}

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) bad_config(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad_config("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) bad_config("'" + std::string(key) + "' in " + where + " must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad_config("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    bad_config("scenario needs a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    check_keys(j, {"kind", "n", "pi1", "mu1", "mu0", "rho"}, "gaussian scenario");
    GaussianScenario s;
    s.n = get_count(j, "n", "scenario");
    s.pi1 = get_number(j, "pi1", "scenario");
    s.mu1 = get_number(j, "mu1", "scenario");
    if (j.contains("mu0")) s.mu0 = get_number(j, "mu0", "scenario");
    if (j.contains("rho")) s.rho = get_number(j, "rho", "scenario");
    return s;
  }
  if (kind == "composite") {
    // null mean -0.2 r, alternative mean 1 + 0.25 r
    check_keys(j, {"kind", "n", "pi1", "r", "rho"}, "composite scenario");
    GaussianScenario s;
    s.n = get_count(j, "n", "scenario");
    s.pi1 = get_number(j, "pi1", "scenario");
    const double r = get_number(j, "r", "scenario");
    s.mu0 = -0.2 * r;
    s.mu1 = 1.0 + 0.25 * r;
    if (j.contains("rho")) s.rho = get_number(j, "rho", "scenario");
    return s;
  }
  if (kind == "uniform_mixture") {
    check_keys(j, {"kind", "n", "pi1", "b"}, "uniform_mixture scenario");
    UniformMixtureScenario s;
    s.n = get_count(j, "n", "scenario");
    s.pi1 = get_number(j, "pi1", "scenario");
    s.b = get_number(j, "b", "scenario");
    return s;
  }
  bad_config("unknown scenario kind '" + kind + "'");
}

EstimatorSpec parse_estimator(const json& j) {
  if (j.is_string()) return EstimatorSpec::parse(j.get<std::string>());
  check_keys(j, {"method", "alpha", "c", "lambda", "grid", "B", "pi0", "label"}, "estimator");
  if (!j.contains("method") || !j.at("method").is_string()) bad_config("estimator object needs a string 'method'");
  EstimatorSpec s = EstimatorSpec::parse(j.at("method").get<std::string>());
  if (j.contains("alpha")) s.dos.alpha = get_number(j, "alpha", "estimator");
  if (j.contains("c")) s.dos.c = get_number(j, "c", "estimator");
  if (j.contains("lambda")) s.lambda = get_number(j, "lambda", "estimator");
  if (j.contains("pi0")) s.fixed_pi0 = get_number(j, "pi0", "estimator");
  if (j.contains("B")) s.jd.bootstrap_reps = get_count(j, "B", "estimator");
  if (j.contains("grid")) {
    if (!j.at("grid").is_array()) bad_config("'grid' must be an array of numbers");
    s.jd.lambda_grid.clear();
    for (const auto& v : j.at("grid")) {
      if (!v.is_number()) bad_config("'grid' must be an array of numbers");
      s.jd.lambda_grid.push_back(v.get<double>());
    }
  }
  s.label = j.contains("label") ? j.at("label").get<std::string>() : EstimatorSpec::default_label(s);
  s.validate();
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"scenario", "estimators", "replicates", "seed", "threads", "level"}, "config");
  if (!j.contains("scenario")) bad_config("config needs a 'scenario'");
  if (!j.contains("estimators") || !j.at("estimators").is_array()) bad_config("config needs an 'estimators' array");

  ExperimentConfig cfg;
  try {
    cfg.scenario = parse_scenario(j.at("scenario"));
    cfg.estimators.clear();
    for (const auto& e : j.at("estimators")) cfg.estimators.push_back(parse_estimator(e));
    if (j.contains("replicates")) cfg.replicates = get_count(j, "replicates", "config");
    if (j.contains("seed")) cfg.master_seed = get_count(j, "seed", "config");
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(j, "threads", "config"));
    if (j.contains("level")) cfg.level = get_number(j, "level", "config");
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

std::vector<double> numbers_separated(const std::string& text, char sep, const std::string& context) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    const std::string cell = trim(std::string_view(text).substr(start, pos == std::string::npos ? pos : pos - start));
    const auto v = to_double(cell);
    if (!v) bad_config("cannot read a number from '" + cell + "' in " + context);
    out.push_back(*v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) { return numbers_separated(text, ',', "'" + text + "'"); }

QuantileModel parse_model_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) bad_config("model spec '" + text + "' needs KIND:PARAMS");
  const std::string kind = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  if (kind == "piecewise") {
    const auto comma = params.find(',');
    if (comma == std::string::npos) bad_config("piecewise model needs BREAKS,SLOPES");
    return QuantileModel::piecewise_linear(numbers_separated(params.substr(0, comma), '/', text),
                                           numbers_separated(params.substr(comma + 1), '/', text));
  }
  const auto v = numbers_separated(params, ',', text);
  auto need = [&](std::size_t k) {
    if (v.size() != k) bad_config("model '" + kind + "' takes " + std::to_string(k) + " parameters");
  };
  if (kind == "gaussian") {
    need(2);
    return QuantileModel::gaussian_mixture(v[0], v[1]);
  }
  if (kind == "uniform") {
    need(2);
    return QuantileModel::uniform_mixture(v[0], v[1]);
  }
  if (kind == "composite") {
    need(3);
    return QuantileModel::composite_gaussian(v[0], v[1], v[2]);
  }
  bad_config("unknown model kind '" + kind + "'");
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

}  // namespace dosprop
