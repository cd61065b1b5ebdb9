#include <algorithm>
#include <regex>

#include "cifs/errors.hpp"
#include "cifs/scenario_io.hpp"

namespace cifs {

namespace {

const char* kSchemaText = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "circle-ifs/report/1",
  "title": "circle_ifs analysis report",
  "type": "object",
  "required": ["schema_version", "kind", "scenario", "seed", "status", "error", "data"],
  "additionalProperties": false,
  "properties": {
    "schema_version": {"const": "circle-ifs/report/1"},
    "kind": {"enum": ["classify", "cycle", "return-map", "decompose", "certify", "denjoy", "orbit", "summary"]},
    "scenario": {"type": "string"},
    "seed": {"type": "string", "pattern": "^[0-9]+$"},
    "status": {"enum": ["ok", "error"]},
    "error": {"oneOf": [{"type": "null"}, {"$ref": "#/$defs/error"}]},
    "data": {"type": ["object", "null"]}
  },
  "allOf": [
    {"if": {"properties": {"status": {"const": "error"}}},
     "then": {"properties": {"error": {"$ref": "#/$defs/error"}}}},
    {"if": {"properties": {"kind": {"const": "classify"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/classify"}}}},
    {"if": {"properties": {"kind": {"const": "cycle"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/cycle_report"}}}},
    {"if": {"properties": {"kind": {"const": "return-map"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/return_map"}}}},
    {"if": {"properties": {"kind": {"const": "decompose"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/decompose"}}}},
    {"if": {"properties": {"kind": {"const": "certify"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/certify"}}}},
    {"if": {"properties": {"kind": {"const": "denjoy"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/denjoy"}}}},
    {"if": {"properties": {"kind": {"const": "orbit"}, "status": {"const": "ok"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/orbit"}}}},
    {"if": {"properties": {"kind": {"const": "summary"}}},
     "then": {"properties": {"data": {"$ref": "#/$defs/summary"}}}}
  ],
  "$defs": {
    "real": {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]},
    "interval": {"type": "array", "items": {"$ref": "#/$defs/real"}, "minItems": 2, "maxItems": 2},
    "error": {
      "type": "object",
      "required": ["type", "message", "exit_code"],
      "properties": {
        "type": {"type": "string"},
        "message": {"type": "string"},
        "exit_code": {"enum": [2, 3]}
      }
    },
    "word": {
      "type": "object",
      "required": ["text", "letters"],
      "properties": {
        "text": {"type": "string"},
        "letters": {"type": "array",
                    "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}
      }
    },
    "witness": {
      "type": "object",
      "required": ["word", "translation", "J", "contraction", "point", "inverse"],
      "properties": {
        "word": {"$ref": "#/$defs/word"},
        "translation": {"type": "integer"},
        "J": {"$ref": "#/$defs/interval"},
        "contraction": {"$ref": "#/$defs/real"},
        "point": {"$ref": "#/$defs/real"},
        "inverse": {"type": "boolean"}
      }
    },
    "closeness": {
      "type": "object",
      "required": ["certified", "measured_v", "epsilon"],
      "properties": {
        "certified": {"type": "boolean"},
        "measured_v": {"$ref": "#/$defs/real"},
        "epsilon": {"$ref": "#/$defs/real"}
      }
    },
    "fixed_point": {
      "type": "object",
      "required": ["location", "period", "map", "stability", "derivative", "translation"],
      "properties": {
        "location": {"$ref": "#/$defs/real"},
        "period": {"type": "integer", "minimum": 1},
        "map": {"enum": [0, 1]},
        "stability": {"enum": ["attracting", "repelling", "semi_attracting_left",
                               "semi_attracting_right", "parabolic_unresolved"]},
        "derivative": {"$ref": "#/$defs/real"},
        "translation": {"type": "integer"}
      }
    },
    "star_interval": {
      "type": "object",
      "required": ["kind", "a", "b", "owners", "mirrored", "covering_slack", "warnings"],
      "properties": {
        "kind": {"enum": ["ss", "su", "uu", "s", "u"]},
        "a": {"$ref": "#/$defs/real"},
        "b": {"$ref": "#/$defs/real"},
        "owners": {"type": "array", "items": {"enum": [-1, 0, 1]}, "minItems": 2, "maxItems": 2},
        "mirrored": {"type": "boolean"},
        "covering_slack": {"$ref": "#/$defs/real"},
        "warnings": {"type": "array", "items": {"type": "string"}}
      }
    },
    "histogram": {
      "type": "object",
      "required": ["delta", "bins", "centers", "counts"],
      "properties": {
        "delta": {"$ref": "#/$defs/real"},
        "bins": {"type": "array", "items": {"type": "integer"}},
        "centers": {"type": "array", "items": {"$ref": "#/$defs/real"}},
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 0}}
      }
    },
    "cycle": {
      "type": "object",
      "required": ["attractors", "parities", "length", "winding", "mirrored", "order_certificate"],
      "properties": {
        "attractors": {"type": "array", "items": {"$ref": "#/$defs/real"}},
        "parities": {"type": "array", "items": {"enum": [0, 1]}},
        "length": {"type": "integer"},
        "winding": {"type": "integer"},
        "mirrored": {"type": "boolean"},
        "order_certificate": {"type": "array"}
      }
    },
    "classify": {
      "type": "object",
      "required": ["maps", "star_intervals", "counts", "has_ss", "has_uu"],
      "properties": {
        "maps": {
          "type": "array", "minItems": 2, "maxItems": 2,
          "items": {
            "type": "object",
            "required": ["family", "params", "domain", "rotation", "reduced", "closeness",
                         "derivative_bounds", "fixed_points"],
            "properties": {
              "family": {"type": "string"},
              "params": {"type": "array", "items": {"type": "string"}},
              "domain": {"enum": ["circle", "line"]},
              "fixed_points": {"type": "array", "items": {"$ref": "#/$defs/fixed_point"}}
            }
          }
        },
        "star_intervals": {"type": "array", "items": {"$ref": "#/$defs/star_interval"}},
        "counts": {"type": "object", "required": ["ss", "su", "uu", "s", "u"]},
        "has_ss": {"type": "boolean"},
        "has_uu": {"type": "boolean"}
      }
    },
    "cycle_report": {
      "type": "object",
      "required": ["found", "cycle"],
      "properties": {
        "found": {"type": "boolean"},
        "cycle": {"oneOf": [{"type": "null"}, {"$ref": "#/$defs/cycle"}]}
      }
    },
    "return_map": {
      "type": "object",
      "required": ["construction", "derivative_profile"],
      "properties": {
        "construction": {"enum": ["local", "global", "none"]},
        "domain": {"$ref": "#/$defs/interval"},
        "tail_mass": {"$ref": "#/$defs/real"},
        "pieces_total": {"type": "integer", "minimum": 0},
        "derivative_profile": {
          "oneOf": [
            {"type": "null"},
            {"type": "object",
             "required": ["power", "certified", "points"],
             "properties": {
               "power": {"type": "integer", "minimum": 1},
               "certified": {"type": "boolean"},
               "points": {"type": "array",
                          "items": {"type": "object", "required": ["x", "dr"],
                                    "properties": {"x": {"$ref": "#/$defs/real"},
                                                   "dr": {"$ref": "#/$defs/real"}}}}
             }}
          ]
        }
      }
    },
    "decompose": {
      "type": "object",
      "required": ["status", "reason", "closeness", "pieces", "overlap", "unclassified_mass", "notes"],
      "properties": {
        "status": {"enum": ["decomposed", "minimal", "unknown"]},
        "reason": {"type": "string"},
        "closeness": {"type": "array", "items": {"$ref": "#/$defs/closeness"}},
        "pieces": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["type", "kind", "a", "b", "owner", "witnesses", "transitivity", "maximality"],
            "properties": {
              "type": {"enum": ["fixed_point", "star_interval"]},
              "kind": {"enum": ["fixed_point", "ss", "su", "uu", "s", "u"]},
              "a": {"$ref": "#/$defs/real"},
              "b": {"$ref": "#/$defs/real"},
              "witnesses": {"type": "array", "items": {"$ref": "#/$defs/witness"}},
              "maximality": {"enum": ["theorem-implied", "not established"]}
            }
          }
        },
        "overlap": {"type": "boolean"},
        "unclassified_mass": {"$ref": "#/$defs/real"},
        "notes": {"type": "array", "items": {"type": "string"}}
      }
    },
    "certificate": {
      "type": "object",
      "required": ["verdict", "reason", "closeness", "delta", "forward", "backward", "bins",
                   "attractor_bins", "repeller_bins", "histogram"],
      "properties": {
        "verdict": {"enum": ["MinimalCertified", "NotMinimal", "Unknown"]},
        "reason": {"type": "string"},
        "closeness": {"type": "array", "items": {"$ref": "#/$defs/closeness"}},
        "bins": {"type": "integer", "minimum": 0},
        "histogram": {"$ref": "#/$defs/histogram"}
      }
    },
    "certify": {
      "type": "object",
      "required": ["verdict", "certificates", "histogram"],
      "properties": {
        "verdict": {"enum": ["MinimalCertified", "NotMinimal", "Unknown"]},
        "certificates": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/certificate"}},
        "histogram": {"$ref": "#/$defs/histogram"}
      }
    },
    "denjoy": {
      "type": "object",
      "required": ["verdict", "in_scope", "label", "intervals"],
      "properties": {
        "verdict": {"enum": ["NoCantorFound", "CantorSuspected"]},
        "in_scope": {"type": "boolean"},
        "label": {"enum": ["certified", "outside theorem scope"]},
        "intervals": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["a", "b", "trace", "monotone", "taxonomy", "verdict"],
            "properties": {
              "trace": {"type": "array",
                        "items": {"type": "object", "required": ["steps", "largest_gap", "coverage"]}},
              "monotone": {"type": "boolean"},
              "taxonomy": {"enum": ["finite orbit", "nonempty interior", "cantor"]}
            }
          }
        }
      }
    },
    "orbit": {
      "type": "object",
      "required": ["x", "steps", "recorded", "plus_infinity", "minus_infinity", "clusters", "histogram"],
      "properties": {
        "clusters": {"type": "array", "items": {"$ref": "#/$defs/interval"}},
        "histogram": {"$ref": "#/$defs/histogram"}
      }
    },
    "summary": {
      "type": "object",
      "required": ["exit_code", "maps", "tolerances", "epsilon", "budgets", "analyses"],
      "properties": {
        "exit_code": {"enum": [0, 2, 3]},
        "analyses": {
          "type": "object",
          "additionalProperties": {
            "type": "object",
            "required": ["status", "error", "headline"],
            "properties": {"status": {"enum": ["ok", "error"]}}
          }
        }
      }
    }
  }
})json";

bool type_matches(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

// Draft 2020-12 keywords used by the report schema.
class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void check(const Json& v, const Json& s, const std::string& at, std::vector<std::string>& out) const {
    if (s.is_boolean()) {
      if (!s.get<bool>()) out.push_back(at + ": not allowed");
      return;
    }
    if (s.contains("$ref")) {
      check(v, resolve(s["$ref"].get<std::string>()), at, out);
    }
    if (s.contains("type")) {
      const Json& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = type_matches(v, t.get<std::string>());
      for (const Json& x : t.is_array() ? t : Json::array()) ok = ok || type_matches(v, x.get<std::string>());
      if (!ok) return out.push_back(at + ": expected type " + t.dump());
    }
    if (s.contains("const") && v != s["const"]) out.push_back(at + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
      const Json& e = s["enum"];
      if (std::find(e.begin(), e.end(), v) == e.end())
        out.push_back(at + ": " + v.dump() + " not in " + e.dump());
    }
    if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
      out.push_back(at + ": below minimum " + s["minimum"].dump());
    if (s.contains("pattern") && v.is_string() &&
        !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
      out.push_back(at + ": does not match " + s["pattern"].get<std::string>());
    if (v.is_object()) {
      for (const Json& r : s.value("required", Json::array()))
        if (!v.contains(r.get<std::string>())) out.push_back(at + ": missing " + r.get<std::string>());
      const Json props = s.value("properties", Json::object());
      for (auto it = v.begin(); it != v.end(); ++it) {
        std::string sub = at + "." + it.key();
        if (props.contains(it.key()))
          check(it.value(), props[it.key()], sub, out);
        else if (s.contains("additionalProperties"))
          check(it.value(), s["additionalProperties"], sub, out);
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        out.push_back(at + ": fewer than " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
        out.push_back(at + ": more than " + s["maxItems"].dump() + " items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i)
          check(v[i], s["items"], at + "[" + std::to_string(i) + "]", out);
    }
    if (s.contains("oneOf")) {
      int hits = 0;
      for (const Json& alt : s["oneOf"]) hits += passes(v, alt);
      if (hits != 1) out.push_back(at + ": matches " + std::to_string(hits) + " alternatives of oneOf");
    }
    for (const Json& sub : s.value("allOf", Json::array())) check(v, sub, at, out);
    if (s.contains("if") && passes(v, s["if"]) && s.contains("then")) check(v, s["then"], at, out);
  }

 private:
  bool passes(const Json& v, const Json& s) const {
    std::vector<std::string> tmp;
    check(v, s, "", tmp);
    return tmp.empty();
  }
  const Json& resolve(const std::string& ref) const {
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw Error("unsupported $ref " + ref);
    return root_["$defs"].at(ref.substr(prefix.size()));
  }
  const Json& root_;
};

}  // namespace

const Json& report_schema() {
  static const Json schema = Json::parse(kSchemaText);
  return schema;
}

std::vector<std::string> validate(const Json& value, const Json& schema) {
  std::vector<std::string> out;
  Validator(schema).check(value, schema, "$", out);
  return out;
}

std::vector<std::string> validate_report(const Json& report) { return validate(report, report_schema()); }

}  // namespace cifs
