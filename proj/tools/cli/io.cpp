#include "cli/io.hpp"

#include "freespec/error.hpp"
#include "freespec/transforms.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace freespec::cli {

namespace {

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw UsageError(what + " must be a number");
  return j.get<double>();
}

int positive_int(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw UsageError(what + " must be a positive integer");
  return j.get<int>();
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw UsageError(what + " must be an array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(number(x, what));
  return v;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // JSON lines: the first line carries the metadata.
    const auto nl = text.find('\n');
    if (nl != std::string::npos && nl + 1 < text.size()) {
      try {
        return json::parse(text.substr(0, nl));
      } catch (const json::parse_error&) {
      }
    }
    std::ostringstream msg;
    msg << path << ":" << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": " << e.what();
    throw UsageError(msg.str());
  }
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw UsageError(what + " must be a number or a [re, im] pair");
}

namespace {

double parse_double(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) throw UsageError("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw UsageError("expected a comma-separated list of numbers");
  return out;
}

Complex parse_complex(const std::string& s) {
  const auto v = parse_doubles(s);
  if (v.size() > 2) throw UsageError("complex number must be 're' or 're,im': '" + s + "'");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

GridSpec parse_grid(const std::string& s) {
  const auto v = parse_doubles(s);
  if (v.size() != 3) throw UsageError("grid must be 'a,b,step'");
  GridSpec g{v[0], v[1], v[2]};
  try {
    (void)g.points();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return g;
}

SpectralMeasure measure_from_json(const json& j) {
  if (j.contains("atoms")) {
    const auto& a = j.at("atoms");
    return SpectralMeasure::atoms(numbers(field(a, "support", "atoms"), "support"),
                                  numbers(field(a, "weights", "atoms"), "weights"));
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    return SpectralMeasure::grid(number(field(g, "t_min", "grid"), "t_min"),
                                 number(field(g, "step", "grid"), "step"),
                                 numbers(field(g, "values", "grid"), "values"));
  }
  if (j.contains("semicircle")) {
    const double v = number(field(j.at("semicircle"), "variance", "semicircle"), "variance");
    return semicircle_grid(v, 1e-3 * std::sqrt(v));
  }
  throw UsageError("measure needs one of \"atoms\", \"grid\", \"semicircle\"");
}

CauchyTransform transform_from_json(const json& j) {
  if (j.contains("semicircle"))
    return semicircle_transform(number(field(j.at("semicircle"), "variance", "semicircle"), "variance"));
  return cauchy_transform(measure_from_json(j));
}

VarianceProfile profile_from_json(const json& j) {
  const int rows = positive_int(field(j, "rows", "profile"), "rows");
  const int cols = positive_int(field(j, "cols", "profile"), "cols");
  const auto& s = field(j, "sigma", "profile");
  if (!s.is_array() || static_cast<int>(s.size()) != rows)
    throw UsageError("profile: sigma must have " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto row = numbers(s[static_cast<std::size_t>(i)], "sigma row");
    if (static_cast<int>(row.size()) != cols)
      throw UsageError("profile: sigma row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)];
  }
  return VarianceProfile(std::move(m));
}

CMatrix matrix_from_json(const json& j) {
  const int rows = positive_int(field(j, "rows", "matrix"), "rows");
  const int cols = positive_int(field(j, "cols", "matrix"), "cols");
  const auto& e = field(j, "entries", "matrix");
  if (!e.is_array() || static_cast<int>(e.size()) != rows)
    throw UsageError("matrix: entries must have " + std::to_string(rows) + " rows");
  CMatrix A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = e[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw UsageError("matrix: row " + std::to_string(i) + " must have " + std::to_string(cols) +
                       " entries");
    for (int c = 0; c < cols; ++c) A(i, c) = complex_from_json(row[static_cast<std::size_t>(c)], "matrix entry");
  }
  return A;
}

json matrix_to_json(const CMatrix& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index c = 0; c < A.cols(); ++c) r.push_back(to_json(A(i, c)));
    rows.push_back(std::move(r));
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"entries", std::move(rows)}};
}

EnsembleSpec ensemble_from_json(const json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw UsageError("ensemble must be a JSON object");
  const std::string kind = field(j, "kind", "ensemble").get<std::string>();
  EnsembleSpec s;
  if (kind == "gue") s.kind = EnsembleKind::GUE;
  else if (kind == "wigner_real") s.kind = EnsembleKind::WignerReal;
  else if (kind == "complex_iid") s.kind = EnsembleKind::ComplexIID;
  else if (kind == "haar_unitary") s.kind = EnsembleKind::HaarUnitary;
  else if (kind == "profile_gaussian") s.kind = EnsembleKind::ProfileGaussian;
  else throw UsageError("unknown ensemble kind '" + kind + "'");
  if (j.contains("n")) s.n = positive_int(j.at("n"), "n");
  if (j.contains("m")) s.m = positive_int(j.at("m"), "m");
  if (j.contains("entry")) {
    const std::string e = j.at("entry").get<std::string>();
    if (e == "gaussian") s.entry = EntryDist::Gaussian;
    else if (e == "rademacher") s.entry = EntryDist::Rademacher;
    else if (e == "uniform") s.entry = EntryDist::UniformCentered;
    else throw UsageError("unknown entry distribution '" + e + "'");
  }
  if (j.contains("profile")) s.profile = profile_from_json(j.at("profile"));
  if (j.contains("mean")) s.mean = matrix_from_json(j.at("mean"));
  if (j.contains("hermitian")) s.hermitian = j.at("hermitian").get<bool>();
  s.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
  try {
    s.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("ensemble: ") + e.what());
  }
  return s;
}

std::vector<MatrixSource> sources_from_json(const json& j, std::uint64_t base_seed) {
  const json list = j.contains("matrices") ? j.at("matrices") : json::array({j});
  if (!list.is_array() || list.empty()) throw UsageError("\"matrices\" must be a non-empty array");
  std::vector<MatrixSource> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const std::uint64_t seed = splitmix64(base_seed + i);
    const std::string kind = field(e, "kind", "matrix source").get<std::string>();
    if (kind == "fixed") {
      out.emplace_back(matrix_from_json(field(e, "matrix", "fixed source")));
    } else if (kind == "haar_conjugated") {
      out.emplace_back(HaarConjugated{matrix_from_json(field(e, "matrix", "haar_conjugated source")),
                                      e.contains("seed") ? e.at("seed").get<std::uint64_t>() : seed});
    } else {
      out.emplace_back(ensemble_from_json(e, seed));
    }
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

}  // namespace freespec::cli
