#pragma once

// JSON and CSV plumbing for the command-line tool.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "freespec/deteq.hpp"
#include "freespec/measure.hpp"
#include "freespec/rmt.hpp"
#include "freespec/transforms.hpp"

namespace freespec::cli {

using nlohmann::json;

/// Bad command-line input or input file. Maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a JSON document. A file holding JSON lines yields its first line.
/// Parse errors name the file and line.
json load_json_file(const std::string& path);

json to_json(Complex z);
Complex complex_from_json(const json& j, const std::string& what);

/// "re,im" or "re" (imaginary part 0).
Complex parse_complex(const std::string& s);
std::vector<double> parse_doubles(const std::string& csv);
/// "a,b,step".
GridSpec parse_grid(const std::string& s);

/// {"atoms": {"support": [...], "weights": [...]}},
/// {"grid": {"t_min": a, "step": h, "values": [...]}} or
/// {"semicircle": {"variance": s}}.
SpectralMeasure measure_from_json(const json& j);
/// Cauchy transform of a measure document; the semicircle form keeps the
/// analytic transform.
CauchyTransform transform_from_json(const json& j);

/// {"rows": N, "cols": M, "sigma": [[...], ...]}.
VarianceProfile profile_from_json(const json& j);
/// {"rows": N, "cols": M, "entries": [[x, ...], ...]} with x a number or a
/// [re, im] pair.
CMatrix matrix_from_json(const json& j);
json matrix_to_json(const CMatrix& A);

/// {"kind": "gue" | "wigner_real" | "complex_iid" | "haar_unitary" |
///  "profile_gaussian", "n": N, "m": M, "entry": "gaussian" | "rademacher"
///  | "uniform", "profile": {...}, "mean": {...}, "hermitian": bool,
///  "seed": s}.
EnsembleSpec ensemble_from_json(const json& j, std::uint64_t default_seed);

/// Sources for mixed traces: {"matrices": [...]} where each entry is an
/// ensemble, {"kind": "fixed", "matrix": {...}} or
/// {"kind": "haar_conjugated", "matrix": {...}, "seed": s}.
std::vector<MatrixSource> sources_from_json(const json& j, std::uint64_t base_seed);

/// Locale-independent shortest round-trip formatting.
std::string format_double(double x);

}  // namespace freespec::cli
