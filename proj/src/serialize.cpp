#include "llab/serialize.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace llab {

namespace {

void check_schema(const Json& j, const char* kind) {
  require(j.is_object(), std::string(kind) + ": expected a JSON object");
  require(j.value("kind", std::string()) == kind, std::string(kind) + ": wrong or missing kind field");
  require(j.value("schema_version", 0) == kSchemaVersion,
          std::string(kind) + ": unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
}

Json measure_body(const MeasureS1& mu) {
  Json j;
  if (mu.is_atomic()) {
    j["representation"] = "atoms";
    Json atoms = Json::array();
    for (const auto& a : mu.atoms()) atoms.push_back({{"angle", a.angle}, {"weight", a.weight}});
    j["atoms"] = atoms;
  } else {
    j["representation"] = "bins";
    j["bins"] = std::vector<double>(mu.bins().begin(), mu.bins().end());
  }
  j["total"] = mu.total();
  return j;
}

MeasureS1 measure_body_from(const Json& j) {
  const auto rep = j.at("representation").get<std::string>();
  if (rep == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({a.at("angle").get<double>(), a.at("weight").get<double>()});
    return MeasureS1::from_atoms(std::move(atoms));
  }
  require(rep == "bins", "measure: representation must be atoms or bins");
  const auto bins = j.at("bins").get<std::vector<double>>();
  return MeasureS1::from_bins(Eigen::Map<const Eigen::VectorXd>(bins.data(), static_cast<Index>(bins.size())));
}

}  // namespace

Json to_json(const MeasureS1& mu) {
  Json j = measure_body(mu);
  j["kind"] = "MeasureS1";
  j["schema_version"] = kSchemaVersion;
  return j;
}

MeasureS1 measure_from_json(const Json& j) {
  check_schema(j, "MeasureS1");
  return measure_body_from(j);
}

Json to_json(const DrivingMeasure& rho) {
  require(!rho.is_path_backed(), "DrivingMeasure JSON: only slab-backed measures are serializable");
  Json slabs = Json::array();
  for (const auto& s : rho.slabs()) slabs.push_back(measure_body(s));
  return {{"kind", "DrivingMeasure"}, {"schema_version", kSchemaVersion}, {"slabs", slabs}};
}

DrivingMeasure driving_from_json(const Json& j) {
  check_schema(j, "DrivingMeasure");
  std::vector<MeasureS1> slabs;
  for (const auto& s : j.at("slabs")) slabs.push_back(measure_body_from(s));
  return DrivingMeasure::from_slabs(std::move(slabs));
}

Json to_json(const LevelTuple& tuple) {
  Json entries = Json::array();
  for (const auto& e : tuple.entries) entries.push_back(measure_body(e));
  return {{"kind", "LevelTuple"}, {"schema_version", kSchemaVersion}, {"level", tuple.level}, {"entries", entries}};
}

LevelTuple tuple_from_json(const Json& j) {
  check_schema(j, "LevelTuple");
  LevelTuple t;
  t.level = j.at("level").get<int>();
  require(t.level >= 0 && t.level <= kMaxLevel, "LevelTuple: level out of range");
  for (const auto& e : j.at("entries")) t.entries.push_back(measure_body_from(e));
  require(t.entries.size() == (std::size_t{1} << t.level), "LevelTuple: entry count must be 2^level");
  return t;
}

Json to_json(const RateReport& report) {
  Json j{{"kind", "RateReport"}, {"schema_version", kSchemaVersion}, {"method", to_string(report.method)}};
  if (report.value.is_infinite())
    j["value"] = "inf";
  else
    j["value"] = report.value.value();
  const auto& d = report.diagnostics;
  j["diagnostics"] = {{"quadrature_nodes", d.quadrature_nodes}, {"iterations", d.iterations},
                      {"gradient_norm", d.gradient_norm},       {"quadrature_error", d.quadrature_error},
                      {"converged", d.converged},               {"certified", d.certified},
                      {"note", d.note}};
  if (report.witness) {
    const auto& w = *report.witness;
    j["witness"] = {{"degree", w.degree()},
                    {"cos", std::vector<double>(w.cos_coeffs.begin(), w.cos_coeffs.end())},
                    {"sin", std::vector<double>(w.sin_coeffs.begin(), w.sin_coeffs.end())}};
  }
  return j;
}

RateReport rate_report_from_json(const Json& j) {
  check_schema(j, "RateReport");
  RateReport r;
  const auto method = j.at("method").get<std::string>();
  bool known = false;
  for (auto m : {RateMethod::dirichlet, RateMethod::variational, RateMethod::level_n, RateMethod::energy}) {
    if (method == to_string(m)) {
      r.method = m;
      known = true;
    }
  }
  require(known, "RateReport: unknown method " + method);
  const auto& v = j.at("value");
  r.value = v.is_string() ? RateValue::infinite() : RateValue::finite(v.get<double>());
  const auto& d = j.at("diagnostics");
  r.diagnostics.quadrature_nodes = d.at("quadrature_nodes").get<Index>();
  r.diagnostics.iterations = d.at("iterations").get<int>();
  r.diagnostics.gradient_norm = d.at("gradient_norm").get<double>();
  r.diagnostics.quadrature_error = d.at("quadrature_error").get<double>();
  r.diagnostics.converged = d.at("converged").get<bool>();
  r.diagnostics.certified = d.at("certified").get<bool>();
  r.diagnostics.note = d.at("note").get<std::string>();
  if (j.contains("witness")) {
    const auto c = j["witness"].at("cos").get<std::vector<double>>();
    const auto s = j["witness"].at("sin").get<std::vector<double>>();
    r.witness = VariationalWitness{Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Index>(c.size())),
                                   Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Index>(s.size()))};
  }
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  require(end != text.c_str() && *end == '\0', "not a number: '" + text + "'");
  return v;
}

const char* to_string(ProbeStatus status) {
  switch (status) {
    case ProbeStatus::alive: return "alive";
    case ProbeStatus::swallowed: return "swallowed";
    case ProbeStatus::undetermined: return "undetermined";
  }
  return "unknown";
}

void write_hull_csv(std::ostream& out, const HullGrid& grid) {
  out << "re,im,survival_time,status\n";
  for (const auto& p : grid.probes) {
    out << format_double(p.z.real()) << ',' << format_double(p.z.imag()) << ',';
    if (p.survival_time) out << format_double(*p.survival_time);
    out << ',' << to_string(p.status) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceSample>& samples) {
  out << "t,re,im,error_gauge\n";
  for (const auto& s : samples) {
    const Complex z = s.point.estimate.value_or(s.point.point);
    out << format_double(s.t) << ',' << format_double(z.real()) << ',' << format_double(z.imag()) << ',';
    if (s.point.error_gauge) out << format_double(*s.point.error_gauge);
    out << '\n';
  }
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace llab
