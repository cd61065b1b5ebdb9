#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/limit_sets.hpp"
#include "cifs/scenario_io.hpp"

namespace cifs {

namespace {

// JSON has no infinities: non-finite values travel as "inf", "-inf", "nan".
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(to_decimal(v)); }

Json to_json(const Word& w) {
  Json letters = Json::array();
  for (const Letter& l : w) letters.push_back({l.map, l.exp});
  return {{"text", to_string(w)}, {"letters", letters}};
}

Json to_json(const Interval& I) { return {num(I.lo), num(I.hi)}; }

Json to_json(const FixedPointRecord& r) {
  return {{"location", num(r.location)},   {"period", r.period},
          {"map", r.map_tag},              {"stability", to_string(r.stability)},
          {"derivative", num(r.derivative)}, {"translation", r.translation}};
}

Json to_json(const ClosenessCertificate& c) {
  return {{"certified", c.certified}, {"measured_v", num(c.measured_v)}, {"epsilon", num(c.epsilon)}};
}

Json to_json(const StarInterval& k) {
  Json warnings = k.warnings;
  return {{"kind", to_string(k.kind)},
          {"a", num(k.a)},
          {"b", num(k.b)},
          {"owners", {k.owner_a, k.owner_b}},
          {"mirrored", k.mirrored},
          {"normalization",
           {{"invert", k.normalization.invert},
            {"reflect", k.normalization.reflect},
            {"swap", k.normalization.swap}}},
          {"covering_samples", k.covering_samples},
          {"covering_slack", num(k.covering_slack)},
          {"overlap", k.has_overlap ? num(k.overlap_witness) : Json(nullptr)},
          {"warnings", warnings}};
}

Json to_json(const DuminyResult& d) {
  return {{"holds", d.holds},     {"epsilon", num(d.epsilon)}, {"epsilon_eff", num(d.epsilon_eff)},
          {"v0", num(d.v0)},      {"v1", num(d.v1)},           {"window", num(d.window)},
          {"v", num(d.v)},        {"factor", num(d.factor)},   {"margin", num(d.margin)},
          {"witness", d.witness}};
}

Json to_json(const Cycle& c) {
  Json att = Json::array(), cert = Json::array();
  for (double s : c.attractors) att.push_back(num(s));
  for (const OrderCheck& o : c.certificate)
    cert.push_back({{"k", o.k},
                    {"s_k", num(o.s_k)},
                    {"preimage", num(o.preimage)},
                    {"s_next", num(o.s_next)},
                    {"s_plus", num(o.s_plus)},
                    {"margin", num(o.margin)}});
  return {{"attractors", att},
          {"parities", c.parities},
          {"length", c.length},
          {"winding", c.winding},
          {"mirrored", c.mirrored},
          {"order_verified", c.winding != 0},
          {"order_certificate", cert}};
}

Json to_json(const ExpansionCertificate& e) {
  return {{"N", e.N},
          {"lambda", num(e.lambda)},
          {"method", e.method},
          {"measured_min", num(e.measured_min)},
          {"samples", e.samples},
          {"tail_hits", e.tail_hits},
          {"kappa", num(e.kappa)},
          {"epsilon", num(e.epsilon)},
          {"v", num(e.v)},
          {"v0", num(e.v0)},
          {"v1", num(e.v1)},
          {"c_f0", num(e.c_f0)},
          {"factor", num(e.factor)},
          {"cycle_length", e.cycle_length}};
}

Json to_json(const PeriodicWitness& w) {
  return {{"word", to_json(w.word)},
          {"translation", w.translation},
          {"J", to_json(w.J)},
          {"contraction", num(w.contraction)},
          {"point", num(w.point)},
          {"inverse", w.inverse}};
}

Json to_json(const BinSet& b) {
  Json centers = Json::array();
  for (long k : b.bins) centers.push_back(num((double(k) + 0.5) * b.delta));
  return {{"delta", num(b.delta)}, {"bins", b.bins}, {"centers", centers}, {"counts", b.counts}};
}

Json to_json(const CoverageStats& c) {
  return {{"seeds", c.seeds},
          {"seeds_full", c.seeds_full},
          {"min_coverage", num(c.min_coverage)},
          {"max_steps", c.max_steps}};
}

Json to_json(const DecompositionReport& r) {
  Json pieces = Json::array();
  for (const DecompositionPiece& p : r.pieces) {
    Json ws = Json::array();
    for (const PeriodicWitness& w : p.witnesses) ws.push_back(to_json(w));
    pieces.push_back(
        {{"type", p.type == PieceType::fixed_point ? "fixed_point" : "star_interval"},
         {"kind", p.type == PieceType::fixed_point ? "fixed_point" : to_string(p.kind)},
         {"a", num(p.a)},
         {"b", num(p.b)},
         {"owner", p.owner},
         {"stability", p.type == PieceType::fixed_point ? Json(to_string(p.stability))
                                                        : Json(nullptr)},
         {"witnesses", ws},
         {"transitivity",
          {{"inverse", p.transitivity_inverse},
           {"coverage", num(p.transitivity_coverage)},
           {"steps", p.transitivity_steps},
           {"exits", p.exits}}},
         // Maximality follows from the theorem once its hypotheses are certified.
         {"maximality", r.closeness[0].certified && r.closeness[1].certified
                            ? "theorem-implied"
                            : "not established"}});
  }
  return {{"status", to_string(r.status)},
          {"reason", r.reason},
          {"closeness", {to_json(r.closeness[0]), to_json(r.closeness[1])}},
          {"q", r.q},
          {"p", r.p},
          {"pieces", pieces},
          {"overlap", r.overlap},
          {"unclassified_mass", num(r.unclassified_mass)},
          {"notes", r.notes}};
}

Json to_json(const MinimalityCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"reason", c.reason},
          {"ss_witness", c.ss_witness ? to_json(*c.ss_witness) : Json(nullptr)},
          {"closeness", {to_json(c.closeness[0]), to_json(c.closeness[1])}},
          {"common_point", c.common_point},
          {"periodic_points", {c.periodic_points[0], c.periodic_points[1]}},
          {"q", c.q},
          {"delta", num(c.delta)},
          {"forward", to_json(c.forward)},
          {"backward", to_json(c.backward)},
          {"bins", c.bins},
          {"attractor_bins", c.attractor_bins},
          {"repeller_bins", c.repeller_bins},
          {"histogram", to_json(c.histogram)}};
}

Json to_json(const DenjoyResult& d) {
  Json ivs = Json::array();
  for (const DenjoyInterval& iv : d.intervals) {
    Json trace = Json::array();
    for (const GapTrace& g : iv.trace)
      trace.push_back({{"steps", g.steps},
                       {"largest_gap", num(g.largest_gap)},
                       {"coverage", {num(g.coverage[0]), num(g.coverage[1]), num(g.coverage[2])}}});
    ivs.push_back({{"a", num(iv.a)},
                   {"b", num(iv.b)},
                   {"trace", trace},
                   {"monotone", iv.monotone},
                   {"taxonomy", iv.taxonomy},
                   {"verdict", to_string(iv.verdict)}});
  }
  return {{"verdict", to_string(d.verdict)},
          {"in_scope", d.in_scope},
          {"label", d.label},
          {"coverage_deltas", {1e-2, 1e-3, 1e-4}},
          {"intervals", ivs}};
}

Json map_spec_json(const MapSpec& m) { return {{"family", to_string(m.family)}, {"params", m.params}}; }

Json envelope(const Scenario& s, const std::string& kind) {
  return {{"schema_version", kReportSchemaVersion},
          {"kind", kind},
          {"scenario", s.name},
          {"seed", s.seed_text},
          {"status", "ok"},
          {"error", nullptr},
          {"data", Json::object()}};
}

constexpr double kKappa = 2.0;
constexpr int kProfilePoints = 256;
constexpr std::size_t kMaxListedPieces = 4096;

struct Context {
  const Scenario& s;
  MapPair maps;
  std::optional<ReducedPair> sys;
  std::exception_ptr sys_error;
  std::optional<std::optional<Cycle>> cycle;

  const ReducedPair& reduced() {
    if (!sys && !sys_error) {
      try {
        sys = reduce(maps);
      } catch (const Error&) {
        sys_error = std::current_exception();
      }
    }
    if (sys_error) std::rethrow_exception(sys_error);
    return *sys;
  }

  const std::optional<Cycle>& the_cycle() {
    if (!cycle) {
      const ReducedPair& r = reduced();
      // Cycles wind around the circle; line systems have none.
      std::optional<Cycle> c = maps.is_circle() ? find_cycle(r) : std::nullopt;
      // A loop closing on an ss-interval (winding 0) has no order to verify.
      if (c && c->winding != 0) c->certificate = verify_cycle_order(*c, r);
      cycle = std::move(c);
    }
    return *cycle;
  }
};

Json run_classify(Context& ctx) {
  const Scenario& s = ctx.s;
  const ReducedPair& sys = ctx.reduced();
  Json maps = Json::array();
  for (int i = 0; i < 2; ++i) {
    const CircleMap& f = ctx.maps[i];
    Json m = map_spec_json(s.maps[i]);
    m["domain"] = f.is_circle() ? "circle" : "line";
    if (f.is_circle()) {
      RotationResult rho = rotation_number(f);
      m["rotation"] = {{"estimate", num(rho.estimate)},
                       {"error_bound", num(rho.error_bound)},
                       {"rational", rho.rational},
                       {"p", rho.p},
                       {"q", rho.q}};
    } else {
      m["rotation"] = nullptr;
    }
    m["reduced"] = {{"q", sys.q[i]}, {"p", sys.p[i]}, {"has_fixed_points", sys.has_fixed_points[i]}};
    m["closeness"] = {{"minimality", to_json(closeness_certificate(f, s.epsilon_minimality))},
                      {"decomposition", to_json(closeness_certificate(f, s.epsilon_decomposition))}};
    if (f.is_circle() && sys.has_fixed_points[i]) {
      DerivativeBounds db = power_derivative_bounds(f, sys.q[i]);
      m["derivative_bounds"] = {{"period", db.period},
                                {"v", num(db.v)},
                                {"envelope", {num(db.envelope_lo), num(db.envelope_hi)}},
                                {"measured", {num(db.measured_lo), num(db.measured_hi)}}};
    } else {
      m["derivative_bounds"] = nullptr;
    }
    Json fps = Json::array();
    for (const FixedPointRecord& r : sys.fixed[i]) fps.push_back(to_json(r));
    m["fixed_points"] = fps;
    maps.push_back(m);
  }

  Json intervals = Json::array();
  Json counts = {{"ss", 0}, {"su", 0}, {"uu", 0}, {"s", 0}, {"u", 0}};
  for (const StarInterval& k : enumerate_star_intervals(sys)) {
    Json j = to_json(k);
    counts[to_string(k.kind)] = counts[to_string(k.kind)].get<int>() + 1;
    if (k.kind == StarKind::ss || k.kind == StarKind::su || k.kind == StarKind::s) {
      try {
        j["duminy"] = to_json(duminy_condition(sys.maps, k, s.epsilon_minimality));
      } catch (const Error& e) {
        j["duminy"] = {{"holds", false}, {"witness", e.what()}};
      }
    } else {
      j["duminy"] = nullptr;
    }
    intervals.push_back(j);
  }
  return {{"maps", maps},
          {"star_intervals", intervals},
          {"counts", counts},
          {"has_ss", counts["ss"].get<int>() > 0},
          {"has_uu", counts["uu"].get<int>() > 0}};
}

Json run_cycle(Context& ctx) {
  const auto& c = ctx.the_cycle();
  if (!c) return {{"found", false}, {"cycle", nullptr}};
  return {{"found", true}, {"cycle", to_json(*c)}};
}

// DR^N at x, walking the construction directly where the atlas has a tail.
std::optional<double> power_derivative(const ReturnMapAtlas& at, double x, int N) {
  double d = 1.0;
  for (int k = 0; k < N; ++k) {
    auto j = return_jet(at, x);
    if (!j) {
      auto w = return_word(at, x);
      if (!w) return std::nullopt;
      j = apply(at.maps, *w, x);
      j->value -= at.shift;
    }
    d *= j->d1;
    x = j->value;
  }
  return d;
}

Json run_return_map(Context& ctx) {
  const Scenario& s = ctx.s;
  const ReducedPair& sys = ctx.reduced();
  const auto& cycle = ctx.the_cycle();
  Json data;
  std::optional<ReturnMapAtlas> at;
  if (cycle && cycle->winding != 0) {
    at = build_global_return_map(*cycle, sys, s.atlas_depth, s.piece_budget);
    data["construction"] = "global";
    data["cycle"] = to_json(*cycle);
    data["duminy"] = nullptr;
  } else {
    std::optional<StarInterval> chosen;
    auto intervals = enumerate_star_intervals(sys);
    for (StarKind want : {StarKind::ss, StarKind::su, StarKind::s}) {
      for (const StarInterval& k : intervals)
        if (k.kind == want) {
          chosen = k;
          break;
        }
      if (chosen) break;
    }
    if (!chosen) {
      return {{"construction", "none"},
              {"reason", "no cycle and no ss, su or s interval"},
              {"derivative_profile", nullptr}};
    }
    at = build_local_return_map(sys.maps, *chosen, s.atlas_depth, s.epsilon_minimality);
    data["construction"] = "local";
    data["interval"] = to_json(*chosen);
    data["duminy"] = to_json(duminy_condition(sys.maps, *chosen, s.epsilon_minimality));
  }

  data["domain"] = to_json(at->domain);
  data["shift"] = num(at->shift);
  data["depth"] = at->depth;
  data["ell"] = at->ell;
  data["tail_mass"] = num(at->tail_mass);
  Json tail = Json::array();
  for (const Interval& I : at->tail) tail.push_back(to_json(I));
  data["tail"] = tail;
  Json base = Json::array();
  for (double b : at->base_points) base.push_back(num(b));
  data["base_points"] = base;
  data["constants"] = {{"epsilon", num(at->epsilon)}, {"v0", num(at->v0)},
                       {"v1", num(at->v1)},           {"v", num(at->v)},
                       {"factor", num(at->factor)},   {"hypothesis_holds", at->hypothesis_holds}};
  data["pieces_total"] = at->pieces.size();
  Json pieces = Json::array();
  for (std::size_t i = 0; i < at->pieces.size() && i < kMaxListedPieces; ++i) {
    const Piece& p = at->pieces[i];
    pieces.push_back(
        {{"I", to_json(p.I)}, {"word", to_json(p.word)}, {"index", p.index}, {"image", to_json(p.image)}});
  }
  data["pieces"] = pieces;
  data["discontinuities_total"] = at->discontinuities.size();

  int N = 1;
  if (at->hypothesis_holds) {
    ExpansionCertificate ec = expansion_certificate(*at, kKappa);
    data["expansion"] = to_json(ec);
    N = ec.N;
  } else {
    data["expansion"] = nullptr;
  }
  Json pts = Json::array();
  for (int i = 0; i < kProfilePoints; ++i) {
    double x = at->domain.lo + at->domain.length() * (double(i) + 0.5) / kProfilePoints;
    if (auto d = power_derivative(*at, x, N)) pts.push_back({{"x", num(x)}, {"dr", num(*d)}});
  }
  data["derivative_profile"] = {{"power", N}, {"certified", at->hypothesis_holds}, {"points", pts}};
  return data;
}

Json run_decompose(Context& ctx) {
  const Scenario& s = ctx.s;
  DecompositionOptions opt;
  opt.epsilon = s.epsilon_decomposition;
  opt.orbit_budget = s.orbit_steps;
  opt.delta = s.deltas.front();
  opt.seed = s.seed;
  return to_json(spectral_decomposition(ctx.maps.f0, ctx.maps.f1, opt));
}

Json run_certify(Context& ctx) {
  const Scenario& s = ctx.s;
  Json certs = Json::array();
  for (double delta : s.deltas) {
    MinimalityOptions opt;
    opt.delta = delta;
    opt.seeds = s.seeds;
    opt.budget = s.orbit_steps;
    opt.witnesses = s.witnesses;
    opt.seed = s.seed;
    certs.push_back(to_json(minimality_certificate(ctx.maps.f0, ctx.maps.f1, s.epsilon_minimality, opt)));
  }
  Json data = {{"verdict", certs.front()["verdict"]}, {"certificates", certs}};
  data["histogram"] = certs.front()["histogram"];
  return data;
}

Json run_denjoy(Context& ctx) {
  const Scenario& s = ctx.s;
  return to_json(denjoy_check(ctx.maps.f0, ctx.maps.f1, s.orbit_steps, s.seed, s.epsilon_decomposition));
}

Json headline(const std::string& name, const Json& data) {
  if (name == "classify") return data["counts"];
  if (name == "cycle") return {{"found", data["found"]}};
  if (name == "return-map")
    return {{"construction", data["construction"]},
            {"expansion_N", data.contains("expansion") && data["expansion"].is_object()
                                ? data["expansion"]["N"]
                                : Json(nullptr)}};
  if (name == "decompose") return {{"status", data["status"]}, {"pieces", data["pieces"].size()}};
  if (name == "certify") return {{"verdict", data["verdict"]}};
  if (name == "denjoy") return {{"verdict", data["verdict"]}, {"label", data["label"]}};
  return nullptr;
}

}  // namespace

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const CommonFixedPoint*>(&e)) return "CommonFixedPoint";
  if (dynamic_cast<const OverlapEmpty*>(&e)) return "OverlapEmpty";
  if (dynamic_cast<const HypothesisFailure*>(&e)) return "HypothesisFailure";
  if (dynamic_cast<const OrderViolation*>(&e)) return "OrderViolation";
  if (dynamic_cast<const EnvelopeViolation*>(&e)) return "EnvelopeViolation";
  if (dynamic_cast<const UnresolvedTangency*>(&e)) return "UnresolvedTangency";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const AmbiguousKind*>(&e)) return "AmbiguousKind";
  if (dynamic_cast<const NoCoveringBasins*>(&e)) return "NoCoveringBasins";
  if (dynamic_cast<const StageOrderViolation*>(&e)) return "StageOrderViolation";
  if (dynamic_cast<const BoundNotExceeded*>(&e)) return "BoundNotExceeded";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const BudgetExhausted*>(&e)) return "BudgetExhausted";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const InvalidMap*>(&e)) return "InvalidMap";
  return "Error";
}

int exit_code_for(const Error& e) { return dynamic_cast<const HypothesisFailure*>(&e) ? 2 : 3; }

PipelineResult run_pipeline(const Scenario& s, const std::vector<std::string>& only) {
  const std::vector<std::string>& wanted = !only.empty() ? only : s.analyses;
  Context ctx{s, s.build(), {}, {}, {}};
  std::map<std::string, std::function<Json(Context&)>> stages{
      {"classify", run_classify}, {"cycle", run_cycle},     {"return-map", run_return_map},
      {"decompose", run_decompose}, {"certify", run_certify}, {"denjoy", run_denjoy}};

  PipelineResult out;
  Json sections = Json::object();
  for (const std::string& name : analysis_names()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    Json rep = envelope(s, name);
    try {
      rep["data"] = stages.at(name)(ctx);
    } catch (const Error& e) {
      rep["status"] = "error";
      rep["error"] = {{"type", error_name(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
      rep["data"] = nullptr;
      if (out.exit_code == 0) out.exit_code = exit_code_for(e);
    }
    sections[name] = {{"status", rep["status"]},
                      {"error", rep["error"]},
                      {"headline", rep["status"] == "ok" ? headline(name, rep["data"]) : Json(nullptr)}};
    out.reports[name] = std::move(rep);
  }

  out.summary = envelope(s, "summary");
  if (out.exit_code != 0) {
    out.summary["status"] = "error";
    for (const std::string& name : analysis_names())
      if (sections.contains(name) && sections[name]["status"] == "error") {
        out.summary["error"] = sections[name]["error"];
        break;
      }
  }
  Json maps = {map_spec_json(s.maps[0]), map_spec_json(s.maps[1])};
  Json deltas = Json::array();
  for (double d : s.deltas) deltas.push_back(num(d));
  out.summary["data"] = {{"exit_code", out.exit_code},
                         {"maps", maps},
                         {"tolerances",
                          {{"point", num(s.tol.point)},
                           {"inversion", num(s.tol.inversion)},
                           {"classification_margin", num(s.tol.classification_margin)},
                           {"delta", deltas}}},
                         {"epsilon",
                          {{"minimality", num(s.epsilon_minimality)},
                           {"decomposition", num(s.epsilon_decomposition)}}},
                         {"budgets",
                          {{"orbit_steps", s.orbit_steps},
                           {"seeds", s.seeds},
                           {"atlas_depth", s.atlas_depth},
                           {"piece_budget", s.piece_budget}}},
                         {"analyses", sections}};
  return out;
}

Json orbit_report(const Scenario& s, double x, long budget) {
  Json rep = envelope(s, "orbit");
  OmegaOptions opt;
  opt.budget = budget;
  opt.delta = s.deltas.front();
  opt.seed = s.seed;
  try {
    OmegaApprox om = omega_limit(x, s.build(), opt);
    Json clusters = Json::array();
    for (const Interval& I : om.cells.clusters()) clusters.push_back(to_json(I));
    rep["data"] = {{"x", num(x)},
                   {"steps", om.steps},
                   {"recorded", om.recorded},
                   {"plus_infinity", om.plus_infinity},
                   {"minus_infinity", om.minus_infinity},
                   {"clusters", clusters},
                   {"histogram", to_json(om.cells)}};
  } catch (const Error& e) {
    rep["status"] = "error";
    rep["error"] = {{"type", error_name(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
    rep["data"] = nullptr;
  }
  return rep;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

void write_reports(const PipelineResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const Json& j) {
    std::ofstream f(dir / (name + ".json"), std::ios::binary);
    f << dump_report(j);
    if (!f) throw Error("cannot write " + (dir / (name + ".json")).string());
  };
  for (const auto& [name, rep] : r.reports) put(name, rep);
  put("summary", r.summary);
}

}  // namespace cifs
