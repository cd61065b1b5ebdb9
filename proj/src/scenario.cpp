#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/scenario_io.hpp"

namespace cifs {

const std::vector<std::string>& analysis_names() {
  static const std::vector<std::string> names{"classify", "cycle",   "return-map",
                                              "decompose", "certify", "denjoy"};
  return names;
}

MapPair Scenario::build() const {
  auto one = [&](const MapSpec& m) { return CircleMap(make_family(m.family, m.params), tol); };
  return {one(maps[0]), one(maps[1])};
}

namespace {

struct Checker {
  std::vector<std::string> problems;
  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  // Positive decimal string.
  void tolerance(const Json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_string()) return fail(path, "expected a decimal string");
    try {
      double x = parse_decimal(v.get<std::string>());
      if (!(x > 0.0) || !std::isfinite(x)) return fail(path, "must be positive");
      out = x;
    } catch (const InvalidArgument&) {
      fail(path, "'" + v.get<std::string>() + "' is not a decimal string");
    }
  }

  template <class Int>
  void count(const Json& obj, const char* key, const std::string& path, Int& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_number_integer() || v.get<long long>() < 1) return fail(path, "must be a positive integer");
    out = static_cast<Int>(v.get<long long>());
  }

  void keys(const Json& obj, const std::string& path, std::set<std::string> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key()))
        fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
};

std::optional<std::uint64_t> parse_u64(const std::string& s) {
  if (s.empty() || s.size() > 20) return std::nullopt;
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Scenario parse_scenario(const Json& doc) {
  Scenario s;
  Checker c;
  if (!doc.is_object()) throw ScenarioInvalid({"(root): expected an object"});
  s.source = doc;
  c.keys(doc, "", {"name", "maps", "tolerances", "epsilon", "budgets", "witnesses", "seed", "analyses"});

  if (doc.contains("name")) {
    if (doc["name"].is_string())
      s.name = doc["name"].get<std::string>();
    else
      c.fail("name", "expected a string");
  }

  if (!doc.contains("maps") || !doc["maps"].is_array() || doc["maps"].size() != 2) {
    c.fail("maps", "expected an array of two map specs");
  } else {
    for (int i = 0; i < 2; ++i) {
      const Json& m = doc["maps"][i];
      std::string path = "maps[" + std::to_string(i) + "]";
      if (!m.is_object()) {
        c.fail(path, "expected an object");
        continue;
      }
      c.keys(m, path, {"family", "params"});
      bool ok = true;
      if (!m.contains("family") || !m["family"].is_string()) {
        c.fail(path + ".family", "expected a family name");
        ok = false;
      } else {
        try {
          s.maps[i].family = family_from_string(m["family"].get<std::string>());
        } catch (const Error& e) {
          c.fail(path + ".family", e.what());
          ok = false;
        }
      }
      if (!m.contains("params") || !m["params"].is_array()) {
        c.fail(path + ".params", "expected an array of decimal strings");
        ok = false;
      } else {
        for (std::size_t k = 0; k < m["params"].size(); ++k) {
          const Json& v = m["params"][k];
          std::string pp = path + ".params[" + std::to_string(k) + "]";
          if (!v.is_string()) {
            c.fail(pp, "expected a decimal string");
            ok = false;
            continue;
          }
          try {
            if (!std::isfinite(parse_decimal(v.get<std::string>()))) throw InvalidArgument("");
          } catch (const InvalidArgument&) {
            c.fail(pp, "'" + v.get<std::string>() + "' is not a decimal string");
            ok = false;
          }
          s.maps[i].params.push_back(v.is_string() ? v.get<std::string>() : "");
        }
      }
      if (ok) {
        try {
          make_family(s.maps[i].family, s.maps[i].params);
        } catch (const Error& e) {
          c.fail(path, e.what());
        }
      }
    }
    if (c.problems.empty() && make_family(s.maps[0].family, s.maps[0].params)->domain() !=
                                  make_family(s.maps[1].family, s.maps[1].params)->domain())
      c.fail("maps", "both maps must act on the same space");
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    if (!t.is_object()) {
      c.fail("tolerances", "expected an object");
    } else {
      c.keys(t, "tolerances", {"point", "inversion", "classification_margin", "delta"});
      c.tolerance(t, "point", "tolerances.point", s.tol.point);
      c.tolerance(t, "inversion", "tolerances.inversion", s.tol.inversion);
      c.tolerance(t, "classification_margin", "tolerances.classification_margin",
                  s.tol.classification_margin);
      if (t.contains("delta")) {
        const Json& d = t["delta"];
        if (!d.is_array() || d.empty()) {
          c.fail("tolerances.delta", "expected a non-empty array of decimal strings");
        } else {
          s.deltas.assign(d.size(), 0.0);
          for (std::size_t k = 0; k < d.size(); ++k) {
            Json wrap = {{"v", d[k]}};
            std::string pp = "tolerances.delta[" + std::to_string(k) + "]";
            c.tolerance(wrap, "v", pp, s.deltas[k]);
            if (s.deltas[k] >= 0.5) c.fail(pp, "must be below 1/2");
          }
        }
      }
    }
  }

  if (doc.contains("epsilon")) {
    const Json& e = doc["epsilon"];
    if (!e.is_object()) {
      c.fail("epsilon", "expected an object");
    } else {
      c.keys(e, "epsilon", {"minimality", "decomposition"});
      c.tolerance(e, "minimality", "epsilon.minimality", s.epsilon_minimality);
      c.tolerance(e, "decomposition", "epsilon.decomposition", s.epsilon_decomposition);
      if (s.epsilon_minimality >= 1.0) c.fail("epsilon.minimality", "must be below 1");
      if (s.epsilon_decomposition >= 1.0) c.fail("epsilon.decomposition", "must be below 1");
    }
  }

  if (doc.contains("budgets")) {
    const Json& b = doc["budgets"];
    if (!b.is_object()) {
      c.fail("budgets", "expected an object");
    } else {
      c.keys(b, "budgets", {"orbit_steps", "seeds", "atlas_depth", "piece_budget"});
      c.count(b, "orbit_steps", "budgets.orbit_steps", s.orbit_steps);
      c.count(b, "seeds", "budgets.seeds", s.seeds);
      c.count(b, "atlas_depth", "budgets.atlas_depth", s.atlas_depth);
      c.count(b, "piece_budget", "budgets.piece_budget", s.piece_budget);
      if (s.orbit_steps < 10000) c.fail("budgets.orbit_steps", "must be at least 10000");
    }
  }

  if (doc.contains("witnesses")) {
    if (doc["witnesses"].is_boolean())
      s.witnesses = doc["witnesses"].get<bool>();
    else
      c.fail("witnesses", "expected true or false");
  }

  if (doc.contains("seed")) {
    const Json& v = doc["seed"];
    std::string text = v.is_string() ? v.get<std::string>()
                       : v.is_number_unsigned() ? v.dump()
                                                : std::string();
    if (auto u = parse_u64(text)) {
      s.seed = *u;
      s.seed_text = text;
    } else {
      c.fail("seed", "expected an unsigned 64-bit integer");
    }
  }

  if (doc.contains("analyses")) {
    const Json& a = doc["analyses"];
    if (!a.is_array()) {
      c.fail("analyses", "expected an array");
    } else {
      const auto& names = analysis_names();
      for (std::size_t k = 0; k < a.size(); ++k) {
        std::string pp = "analyses[" + std::to_string(k) + "]";
        if (!a[k].is_string() ||
            std::find(names.begin(), names.end(), a[k].get<std::string>()) == names.end())
          c.fail(pp, "unknown analysis " + a[k].dump());
        else
          s.analyses.push_back(a[k].get<std::string>());
      }
    }
  }

  if (!c.problems.empty()) throw ScenarioInvalid(c.problems);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioInvalid({path.string() + ": cannot open"});
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ScenarioInvalid({path.string() + ": " + e.what()});
  }
  return parse_scenario(doc);
}

void override_seed(Scenario& s, const std::string& text) {
  auto u = parse_u64(text);
  if (!u) throw ScenarioInvalid({"seed: expected an unsigned 64-bit integer"});
  s.seed = *u;
  s.seed_text = text;
}

}  // namespace cifs
