// circle_ifs: scenario-driven analyses of two-generator circle IFS.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 1;

cifs::Scenario load(const std::string& path, const std::string& seed) {
  if (path.empty()) throw cifs::ScenarioInvalid({"--scenario: required by this subcommand"});
  cifs::Scenario s = cifs::load_scenario(path);
  if (!seed.empty()) cifs::override_seed(s, seed);
  return s;
}

int run(const cifs::Scenario& s, const fs::path& out, const std::vector<std::string>& only) {
  cifs::PipelineResult r = cifs::run_pipeline(s, only);
  cifs::write_reports(r, out);
  for (const auto& [name, rep] : r.reports) {
    std::cout << name << ": " << rep["status"].get<std::string>();
    if (rep["status"] == "error") std::cout << " (" << rep["error"]["type"].get<std::string>() << ")";
    std::cout << '\n';
  }
  std::cout << "reports written to " << out.string() << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimality, spectral decomposition and return maps of circle IFS"};
  std::string scenario, out = "out", seed;
  bool schema = false;
  app.add_option("--scenario", scenario, "scenario JSON file");
  app.add_option("--out", out, "directory for reports and CSV files")->capture_default_str();
  app.add_option("--seed", seed, "u64 seed replacing the scenario seed");
  app.add_flag("--json-schema", schema, "print the report JSON schema and exit");
  app.require_subcommand(0, 1);

  auto* analyze = app.add_subcommand("analyze", "run the analyses listed in the scenario");
  auto* decompose = app.add_subcommand("decompose", "spectral decomposition report");
  auto* certify = app.add_subcommand("certify", "minimality certificate report");
  auto* retmap = app.add_subcommand("return-map", "return-map atlas report");
  auto* orbit = app.add_subcommand("orbit", "omega-limit approximation of one point");
  std::string x = "0";
  long budget = 100000;
  orbit->add_option("--x", x, "starting point (decimal string)")->capture_default_str();
  orbit->add_option("--budget", budget, "word steps over all seeds")->capture_default_str();
  auto* plot = app.add_subcommand("plot-data", "CSV for external plotting");
  std::string report, kind;
  plot->add_option("--report", report, "report JSON file")->required();
  plot->add_option("--kind", kind, "orbit_histogram, interval_diagram or derivative_profile")
      ->required()
      ->check(CLI::IsMember({"orbit_histogram", "interval_diagram", "derivative_profile"}));
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (schema) {
    std::cout << cifs::report_schema().dump(2) << '\n';
    return 0;
  }
  try {
    if (*analyze) return run(load(scenario, seed), out, {});
    if (*decompose) return run(load(scenario, seed), out, {"decompose"});
    if (*certify) return run(load(scenario, seed), out, {"certify"});
    if (*retmap) return run(load(scenario, seed), out, {"return-map"});
    if (*orbit) {
      cifs::Scenario s = load(scenario, seed);
      cifs::Json rep = cifs::orbit_report(s, cifs::parse_decimal(x), budget);
      fs::create_directories(out);
      std::ofstream(fs::path(out) / "orbit.json", std::ios::binary) << cifs::dump_report(rep);
      std::cout << "orbit: " << rep["status"].get<std::string>() << '\n';
      return rep["status"] == "ok" ? 0 : rep["error"]["exit_code"].get<int>();
    }
    if (*plot) {
      std::ifstream in(report);
      if (!in) throw cifs::MissingSection("cannot open " + report);
      cifs::Json doc = cifs::Json::parse(in);
      std::string csv = cifs::emit_plot_data(doc, cifs::plot_kind_from_string(kind));
      fs::create_directories(out);
      fs::path file = fs::path(out) / (kind + ".csv");
      std::ofstream(file, std::ios::binary) << csv;
      std::cout << "wrote " << file.string() << '\n';
      return 0;
    }
  } catch (const cifs::ScenarioInvalid& e) {
    for (const std::string& f : e.fields) std::cerr << "scenario: " << f << '\n';
    return kUsage;
  } catch (const cifs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const cifs::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::cerr << app.help();
  return kUsage;
}
