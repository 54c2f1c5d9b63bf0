#include "rankatlas/serialization.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rankatlas {

FormatError::FormatError(std::string field, const std::string& message)
    : std::runtime_error("field '" + field + "': " + message), field_(std::move(field)) {}

namespace {

const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object()) throw FormatError(key, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(key, "missing");
  return *it;
}

int require_int(const Json& j, const std::string& key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw FormatError(key, "expected an integer");
  return v.get<int>();
}

std::vector<double> require_doubles(const Json& j, const std::string& key, std::size_t expected) {
  const auto& v = require(j, key);
  if (!v.is_array()) throw FormatError(key, "expected an array");
  if (v.size() != expected) {
    throw FormatError(key, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : v) {
    if (!x.is_number()) throw FormatError(key, "non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

Json to_json(const Tensor3& t) {
  return {{"dims", {t.d1(), t.d2(), t.d3()}},
          {"layout", "slice-major"},
          {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

Tensor3 tensor_from_json(const Json& j) {
  const auto& dims = require(j, "dims");
  if (!dims.is_array() || dims.size() != 3) throw FormatError("dims", "expected [d1, d2, d3]");
  int d[3];
  for (int i = 0; i < 3; ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<int>() < 1) {
      throw FormatError("dims", "entries must be positive integers");
    }
    d[i] = dims[i].get<int>();
  }
  if (j.contains("layout") && j["layout"] != "slice-major") {
    throw FormatError("layout", "only \"slice-major\" is supported");
  }
  return {d[0], d[1], d[2], require_doubles(j, "data", static_cast<std::size_t>(d[0]) * d[1] * d[2])};
}

Tensor3 tensor_from_text(std::istream& in) {
  int d1 = 0, d2 = 0, d3 = 0;
  if (!(in >> d1 >> d2 >> d3) || d1 < 1 || d2 < 1 || d3 < 1) {
    throw FormatError("dims", "header must be three positive integers");
  }
  std::vector<double> data(static_cast<std::size_t>(d1) * d2 * d3);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(in >> data[i])) throw FormatError("data", "expected " + std::to_string(data.size()) + " numbers");
  }
  return {d1, d2, d3, std::move(data)};
}

void write_tensor_text(std::ostream& out, const Tensor3& t) {
  out << t.d1() << ' ' << t.d2() << ' ' << t.d3() << '\n' << std::setprecision(17);
  for (int k = 0; k < t.d3(); ++k) {
    for (int i = 0; i < t.d1(); ++i) {
      for (int j = 0; j < t.d2(); ++j) out << (j ? " " : "") << t(i, j, k);
      out << '\n';
    }
    if (k + 1 < t.d3()) out << '\n';
  }
}

Tensor3 read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tensor file '" + path + "'");
  in >> std::ws;
  if (in.peek() == '{') {
    try {
      return tensor_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
      throw FormatError("<root>", std::string("invalid JSON in '") + path + "': " + e.what());
    }
  }
  return tensor_from_text(in);
}

Json to_json(const BilinearMap& f) {
  return {{"a", f.a()}, {"b", f.b()}, {"c", f.c()}, {"coeffs", f.coeffs()}};
}

BilinearMap bilinear_from_json(const Json& j) {
  const int a = require_int(j, "a"), b = require_int(j, "b"), c = require_int(j, "c");
  if (a < 1 || b < 1 || c < 1) throw FormatError("a", "dimensions must be positive");
  return {a, b, c, require_doubles(j, "coeffs", static_cast<std::size_t>(a) * b * c)};
}

Json to_json(const HashBoundsTable& table) {
  Json entries = Json::array();
  for (int m = 1; m <= table.max_dim(); ++m) {
    for (int n = m; n <= table.max_dim(); ++n) {
      const auto& e = table.at(m, n);
      entries.push_back({{"m", m},
                         {"n", n},
                         {"lower", e.lower},
                         {"upper", e.upper},
                         {"lower_rule", to_string(e.lower_rule)},
                         {"upper_rule", to_string(e.upper_rule)}});
    }
  }
  return {{"max_dim", table.max_dim()}, {"entries", entries}};
}

HashBoundsTable bounds_from_json(const Json& j) {
  const int max_dim = require_int(j, "max_dim");
  if (max_dim < 1) throw FormatError("max_dim", "must be positive");
  HashBoundsTable table(max_dim);
  const auto& entries = require(j, "entries");
  if (!entries.is_array()) throw FormatError("entries", "expected an array");
  for (const auto& e : entries) {
    const int m = require_int(e, "m"), n = require_int(e, "n");
    if (!table.contains(m, n)) throw FormatError("entries", "pair outside 1..max_dim");
    auto& slot = table.mutable_at(m, n);
    slot.lower = require_int(e, "lower");
    slot.upper = require_int(e, "upper");
    try {
      slot.lower_rule = bound_rule_from_string(require(e, "lower_rule").get<std::string>());
      slot.upper_rule = bound_rule_from_string(require(e, "upper_rule").get<std::string>());
    } catch (const std::invalid_argument& err) {
      throw FormatError("lower_rule", err.what());
    } catch (const Json::type_error&) {
      throw FormatError("lower_rule", "expected a string");
    }
  }
  return table;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const RankCertificate& cert) {
  Json points = Json::array();
  for (const auto& [d, a] : cert.points) points.push_back({{"d", vector_json(d)}, {"a", vector_json(a)}});
  Json diagonals = Json::array();
  for (const auto& dk : cert.D) diagonals.push_back(vector_json(dk.diagonal()));
  return {{"dims", {{"m", cert.dims.m()}, {"n", cert.dims.n()}, {"p", cert.dims.p()}}},
          {"points", points},
          {"A", to_json(cert.A)},
          {"D", diagonals},
          {"N", to_json(cert.N)},
          {"Q", to_json(cert.Q)},
          {"cond_N", cert.cond_N},
          {"equation_residual", cert.equation_residual},
          {"residual", cert.residual}};
}

Json to_json(const CertifyResult& result) {
  Json j = {{"verdict", to_string(result.verdict)},
            {"margin", result.margin.margin},
            {"margin_relative", result.margin.relative},
            {"points_found", result.points_found},
            {"span_dim", result.span_dim},
            {"diagnostics", result.diagnostics}};
  if (result.certificate) j["certificate"] = to_json(*result.certificate);
  return j;
}

Json to_json(const TrankResult& r) {
  static constexpr const char* kinds[] = {"exact", "conditional", "interval"};
  Json j = {{"m", r.m}, {"n", r.n}, {"p", r.p}, {"kind", kinds[static_cast<int>(r.kind)]},
            {"provenance", r.provenance}, {"text", format_result(r)}};
  switch (r.kind) {
    case TrankKind::kExact:
      j["ranks"] = r.ranks;
      break;
    case TrankKind::kConditional:
      j["ranks_if"] = r.ranks;
      j["ranks_else"] = r.otherwise;
      j["condition"] = r.condition;
      break;
    case TrankKind::kInterval:
      j["lower"] = r.lower;
      j["upper"] = r.upper ? Json(*r.upper) : Json(nullptr);
      break;
  }
  if (r.hash_bound) j["hash_bound"] = {{"lower", r.hash_bound->lower}, {"upper", r.hash_bound->upper}};
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.m = require_int(j, "m");
  cfg.n = require_int(j, "n");
  cfg.p = require_int(j, "p");
  if (!ProblemDims::valid(cfg.m, cfg.n, cfg.p)) {
    throw FormatError("p", "need 3 <= m <= n and (m-1)(n-1)+1 <= p <= (m-1)n");
  }
  cfg.samples = require_int(j, "samples");
  if (cfg.samples < 1) throw FormatError("samples", "must be >= 1");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw FormatError("seed", "expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  auto opt_int = [&](const Json& obj, const char* key, int& slot) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_number_integer() || obj[key].get<int>() < 1) throw FormatError(key, "expected a positive integer");
    slot = obj[key].get<int>();
  };
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    if (!b.is_object()) throw FormatError("budgets", "expected an object");
    opt_int(b, "restarts", cfg.certify.search.restarts);
    opt_int(b, "iterations", cfg.certify.search.iterations);
    opt_int(b, "lines", cfg.certify.search.lines);
    opt_int(b, "rounds", cfg.certify.rounds);
    opt_int(b, "als_restarts", cfg.als.restarts);
    opt_int(b, "als_sweeps", cfg.als.sweeps);
    if (b.contains("tol_rankdrop")) {
      if (!b["tol_rankdrop"].is_number()) throw FormatError("tol_rankdrop", "expected a number");
      cfg.certify.search.tol_rankdrop = b["tol_rankdrop"].get<double>();
    }
  }
  auto opt_bool = [&](const char* key, bool& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw FormatError(key, "expected a boolean");
    slot = j[key].get<bool>();
  };
  opt_bool("als", cfg.run_als);
  opt_bool("timings", cfg.timings);
  auto opt_string = [&](const char* key, std::string& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw FormatError(key, "expected a string");
    slot = j[key].get<std::string>();
  };
  opt_string("csv", cfg.csv_path);
  opt_string("summary", cfg.summary_path);
  return cfg;
}

Json summary_json(const ExperimentReport& report) {
  const auto& c = report.config;
  return {{"config",
           {{"m", c.m},
            {"n", c.n},
            {"p", c.p},
            {"samples", c.samples},
            {"seed", c.seed},
            {"budgets",
             {{"restarts", c.certify.search.restarts},
              {"iterations", c.certify.search.iterations},
              {"lines", c.certify.search.lines},
              {"rounds", c.certify.rounds},
              {"tol_rankdrop", c.certify.search.tol_rankdrop},
              {"als_restarts", c.als.restarts},
              {"als_sweeps", c.als.sweeps}}},
            {"als", c.run_als},
            {"timings", c.timings}}},
          {"counts",
           {{"RankP", report.rank_p}, {"RankExceedsP", report.rank_exceeds_p}, {"Inconclusive", report.inconclusive}}},
          {"frequencies",
           {{"RankP", report.frequency(Verdict::kRankP)},
            {"RankExceedsP", report.frequency(Verdict::kRankExceedsP)},
            {"Inconclusive", report.frequency(Verdict::kInconclusive)}}},
          {"max_cert_residual", report.max_cert_residual},
          {"exclusion_violations", report.exclusion_violations},
          {"predicted", report.predicted}};
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "sample_id,verdict,cert_residual,als_p,als_p1,points_found,span_dim,wall_ms\n";
  std::ostringstream row;
  row << std::setprecision(17);
  for (const auto& r : report.records) {
    row.str("");
    row << r.sample_id << ',' << to_string(r.verdict) << ',' << r.cert_residual << ',' << r.als_p << ','
        << r.als_p1 << ',' << r.points_found << ',' << r.span_dim << ',' << r.wall_ms << '\n';
    out << row.str();
  }
}

void write_experiment_outputs(const ExperimentReport& report) {
  if (!report.config.csv_path.empty()) {
    std::ofstream out(report.config.csv_path);
    if (!out) throw std::runtime_error("cannot write CSV '" + report.config.csv_path + "'");
    write_csv(out, report);
  }
  if (!report.config.summary_path.empty()) {
    std::ofstream out(report.config.summary_path);
    if (!out) throw std::runtime_error("cannot write summary '" + report.config.summary_path + "'");
    out << summary_json(report).dump(2) << '\n';
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("<root>", "invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace rankatlas
