#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cifs/circle_map.hpp"
#include "cifs/errors.hpp"

namespace cifs {

using Json = nlohmann::json;

inline constexpr const char* kReportSchemaVersion = "circle-ifs/report/1";

struct MapSpec {
  FamilyId family = FamilyId::rotation;
  std::vector<std::string> params;  // decimal strings, kept verbatim
};

struct Scenario {
  std::string name = "scenario";
  std::array<MapSpec, 2> maps;
  Tolerances tol;
  std::vector<double> deltas{1e-3};  // orbit-statistics resolutions; certify runs at each
  double epsilon_minimality = 0.38;
  double epsilon_decomposition = 0.30;
  long orbit_steps = 1000000;
  int seeds = 32;
  int atlas_depth = 12;
  long piece_budget = 200000;
  bool witnesses = true;
  std::uint64_t seed = 1;
  std::string seed_text = "1";  // as written, echoed into every report
  std::vector<std::string> analyses;  // classify, cycle, return-map, decompose, certify, denjoy
  Json source;                        // the parsed document

  MapPair build() const;
};

/// All analyses in dependency order.
const std::vector<std::string>& analysis_names();

/// Throws ScenarioInvalid listing every offending field.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::filesystem::path& path);
/// Replaces the seed, keeping the text verbatim.
void override_seed(Scenario& s, const std::string& text);

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 2 hypothesis failure, 3 numerical error
  std::map<std::string, Json> reports;  // by analysis name
  Json summary;
};

/// Runs the requested analyses (all when `only` and the scenario list are empty).
PipelineResult run_pipeline(const Scenario& s, const std::vector<std::string>& only = {});
/// Error class name as written into reports.
std::string error_name(const std::exception& e);
/// 2 for hypothesis failures, 3 for every other library error.
int exit_code_for(const Error& e);

/// Omega-limit report of a single point.
Json orbit_report(const Scenario& s, double x, long budget);

/// Writes <name>.json per report plus summary.json; bytes depend only on the inputs.
void write_reports(const PipelineResult& r, const std::filesystem::path& dir);
std::string dump_report(const Json& report);

const Json& report_schema();
/// Empty when the report validates; otherwise one message per violation.
std::vector<std::string> validate_report(const Json& report);
std::vector<std::string> validate(const Json& value, const Json& schema);

enum class PlotKind { orbit_histogram, interval_diagram, derivative_profile };
PlotKind plot_kind_from_string(const std::string& s);
std::string to_string(PlotKind k);
/// CSV text with a header row; throws MissingSection.
std::string emit_plot_data(const Json& report, PlotKind kind);

}  // namespace cifs
