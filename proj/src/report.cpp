#include "biflat/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "biflat/version.hpp"

namespace biflat {

Json to_json(const ResidualReport& r) {
  Json j;
  j["name"] = r.name;
  j["value"] = r.value;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["point"] = r.point;
  return j;
}

Json make_report(const ReportHeader& header,
                 const std::vector<ResidualReport>& checks) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = header.command;
  j["model"] = header.model_provenance;
  j["tolerances"] = {{"fd", header.tolerances.fd},
                     {"algebraic", header.tolerances.algebraic}};
  if (header.seed) j["seed"] = *header.seed;
  bool all = true;
  Json arr = Json::array();
  for (const ResidualReport& r : checks) {
    all = all && r.pass;
    arr.push_back(to_json(r));
  }
  j["checks"] = std::move(arr);
  j["pass"] = all;
  return j;
}

bool report_passes(const Json& report) {
  return report.value("pass", false);
}

void write_text_atomic(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot open " + tmp + " for writing");
    out << body;
    out.flush();
    if (!out) throw NumericError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw NumericError("atomic rename failed for " + path);
}

void write_report_atomic(const std::string& path, const Json& report) {
  write_text_atomic(path, report.dump(2) + "\n");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_line(const std::vector<double>& row) {
  std::string s;
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) s += ',';
    s += format_double(row[i]);
  }
  return s;
}

void validate_manifest(const Json& manifest,
                       const std::vector<ManifestField>& schema,
                       const std::string& context) {
  if (!manifest.is_object())
    throw ManifestError(context + ": manifest must be a JSON object");
  for (const auto& [key, value] : manifest.items()) {
    const ManifestField* field = nullptr;
    for (const ManifestField& f : schema)
      if (f.key == key) {
        field = &f;
        break;
      }
    if (!field)
      throw ManifestError(context + ": unknown key '" + key + "'");
    bool ok = false;
    switch (field->kind) {
      case ManifestField::Number:
        ok = value.is_number();
        break;
      case ManifestField::Integer:
        ok = value.is_number_integer();
        break;
      case ManifestField::String:
        ok = value.is_string();
        break;
      case ManifestField::Array:
        ok = value.is_array();
        break;
      case ManifestField::Object:
        ok = value.is_object();
        break;
      case ManifestField::Boolean:
        ok = value.is_boolean();
        break;
    }
    if (!ok)
      throw ManifestError(context + ": key '" + key + "' has the wrong type");
  }
  for (const ManifestField& f : schema) {
    if (f.required && !manifest.contains(f.key))
      throw ManifestError(context + ": missing required key '" + f.key + "'");
  }
}

Json load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ManifestError("manifest parse error in " + path + ": " + e.what());
  }
  return j;
}

Tolerances tolerances_from_env() {
  Tolerances t;
  if (const char* v = std::getenv("BIFLAT_TOL_FD")) t.fd = std::atof(v);
  if (const char* v = std::getenv("BIFLAT_TOL_ALGEBRAIC"))
    t.algebraic = std::atof(v);
  return t;
}

}  // namespace biflat
