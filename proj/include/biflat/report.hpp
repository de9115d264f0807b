#pragma once

// Report and manifest plumbing: the residual-report JSON schema, strict
// manifest validation, and atomic file writes for reports and CSV bodies.

#include <optional>
#include <string>
#include <vector>

// vendored single header
#include "json.hpp"

#include "biflat/common.hpp"

namespace biflat {

using Json = nlohmann::json;

struct ResidualReport {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Vec point;

  static ResidualReport make(std::string name, double value, double tolerance,
                             const Point& p) {
    ResidualReport r;
    r.name = std::move(name);
    r.value = value;
    r.tolerance = tolerance;
    r.pass = value <= tolerance;
    r.point = p.u;
    return r;
  }
};

Json to_json(const ResidualReport& r);

struct ReportHeader {
  std::string command;
  std::string model_provenance;
  Tolerances tolerances;
  std::optional<uint64_t> seed;
};

Json make_report(const ReportHeader& header,
                 const std::vector<ResidualReport>& checks);

bool report_passes(const Json& report);

// Write-to-temp-then-rename in the target directory.
void write_text_atomic(const std::string& path, const std::string& body);
void write_report_atomic(const std::string& path, const Json& report);

std::string format_double(double v);  // "%.17g", locale-free
std::string csv_line(const std::vector<double>& row);

// ---------------------------------------------------------------------------
// Manifest validation: unknown keys are rejected, required keys and types
// are enforced before anything runs.
// ---------------------------------------------------------------------------

struct ManifestField {
  std::string key;
  enum Kind { Number, Integer, String, Array, Object, Boolean } kind;
  bool required = false;
};

void validate_manifest(const Json& manifest,
                       const std::vector<ManifestField>& schema,
                       const std::string& context);

Json load_manifest(const std::string& path);

// Tolerance defaults with environment overrides (BIFLAT_TOL_FD,
// BIFLAT_TOL_ALGEBRAIC).
Tolerances tolerances_from_env();

}  // namespace biflat
