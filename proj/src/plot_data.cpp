#include <sstream>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/scenario_io.hpp"

namespace cifs {

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "orbit_histogram") return PlotKind::orbit_histogram;
  if (s == "interval_diagram") return PlotKind::interval_diagram;
  if (s == "derivative_profile") return PlotKind::derivative_profile;
  throw InvalidArgument("unknown plot kind '" + s + "'");
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::orbit_histogram: return "orbit_histogram";
    case PlotKind::interval_diagram: return "interval_diagram";
    case PlotKind::derivative_profile: return "derivative_profile";
  }
  return "?";
}

namespace {

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  return to_decimal(v.get<double>());
}

const Json& section(const Json& report, const char* key, PlotKind k) {
  const Json* data = report.contains("data") ? &report["data"] : nullptr;
  if (!data || !data->is_object() || !data->contains(key) || (*data)[key].is_null())
    throw MissingSection("report has no " + std::string(key) + " section for " + to_string(k));
  return (*data)[key];
}

}  // namespace

// Headers:
//   orbit_histogram     bin_center,count
//   interval_diagram    kind,a,b           (a == b for fixed points)
//   derivative_profile  x,DR               (DR of the power R^N in the report)
std::string emit_plot_data(const Json& report, PlotKind kind) {
  std::ostringstream out;
  switch (kind) {
    case PlotKind::orbit_histogram: {
      const Json& h = section(report, "histogram", kind);
      out << "bin_center,count\n";
      for (std::size_t i = 0; i < h["centers"].size(); ++i)
        out << cell(h["centers"][i]) << ',' << cell(h["counts"][i]) << '\n';
      break;
    }
    case PlotKind::interval_diagram: {
      const Json& p = section(report, "pieces", kind);
      if (report.value("kind", "") != "decompose")
        throw MissingSection("interval_diagram needs a decompose report");
      out << "kind,a,b\n";
      for (const Json& row : p) out << cell(row["kind"]) << ',' << cell(row["a"]) << ',' << cell(row["b"]) << '\n';
      break;
    }
    case PlotKind::derivative_profile: {
      const Json& d = section(report, "derivative_profile", kind);
      out << "x,DR\n";
      for (const Json& row : d["points"]) out << cell(row["x"]) << ',' << cell(row["dr"]) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace cifs
