#include <algorithm>
#include <cmath>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/limit_sets.hpp"
#include "parallel.hpp"

namespace cifs {

std::string to_string(DecompositionStatus s) {
  switch (s) {
    case DecompositionStatus::decomposed: return "decomposed";
    case DecompositionStatus::minimal: return "minimal";
    case DecompositionStatus::unknown: return "unknown";
  }
  return "?";
}

std::string to_string(MinimalityVerdict v) {
  switch (v) {
    case MinimalityVerdict::minimal_certified: return "MinimalCertified";
    case MinimalityVerdict::not_minimal: return "NotMinimal";
    case MinimalityVerdict::unknown: return "Unknown";
  }
  return "?";
}

std::string to_string(DenjoyVerdict v) {
  return v == DenjoyVerdict::no_cantor_found ? "NoCantorFound" : "CantorSuspected";
}

namespace {

struct Point {
  double x;
  int owner;
  Stability stability;
};

std::string closeness_text(const std::array<ClosenessCertificate, 2>& c) {
  return "V0 = " + to_decimal(c[0].measured_v) + ", V1 = " + to_decimal(c[1].measured_v) +
         ", epsilon = " + to_decimal(c[0].epsilon);
}

// y moved into [a, a + 1) when the interval lives on the circle.
double into(double y, double a, bool circle) { return circle ? a + wrap01(y - a) : y; }

void sample_transitivity(const MapPair& maps, DecompositionPiece& pc, long budget, double delta,
                         std::uint64_t seed, std::uint64_t stream) {
  if (!std::isfinite(pc.a) || !std::isfinite(pc.b) || budget <= 0) return;
  const bool circle = maps.is_circle();
  const MapPair m = pc.transitivity_inverse ? maps.inverse() : maps;
  const double len = pc.b - pc.a;
  const long nb = std::max(1L, long(std::ceil(len / delta)));
  std::vector<char> seen(std::size_t(nb), 0);
  long hit = 0;
  WordSampler ws(seed, stream);
  auto fresh = [&] { return pc.a + len * (0.05 + 0.9 * double(ws.rng()() >> 11) * 0x1.0p-53); };
  double y = pc.a + 0.5 * len;
  for (long t = 0; t < budget; ++t) {
    y = into(m[ws.next()].lift(y), pc.a, circle);
    ++pc.transitivity_steps;
    if (!(y >= pc.a && y <= pc.b)) {
      ++pc.exits;
      y = fresh();
      continue;
    }
    const long b = std::min(nb - 1, long((y - pc.a) / delta));
    if (!seen[std::size_t(b)]) {
      seen[std::size_t(b)] = 1;
      ++hit;
    }
  }
  pc.transitivity_coverage = double(hit) / double(nb);
}

}  // namespace

DecompositionReport spectral_decomposition(const CircleMap& f0, const CircleMap& f1,
                                           const DecompositionOptions& opt) {
  DecompositionReport r;
  r.seed = opt.seed;
  r.closeness = {closeness_certificate(f0, opt.epsilon), closeness_certificate(f1, opt.epsilon)};
  ReducedPair sys = reduce({f0, f1});
  for (int i = 0; i < 2; ++i)
    if (!sys.has_fixed_points[std::size_t(i)])
      throw HypothesisFailure("f" + std::to_string(i) + " has no periodic points");
  r.q = sys.q;
  r.p = sys.p;
  if (!r.closeness[0].certified || !r.closeness[1].certified) {
    r.status = DecompositionStatus::unknown;
    r.reason = "epsilon-closeness refuted: " + closeness_text(r.closeness);
    return r;
  }
  const bool circle = sys.maps.is_circle();

  std::vector<Point> pts;
  for (int i = 0; i < 2; ++i)
    for (const auto& fp : sys.fixed[std::size_t(i)]) pts.push_back({fp.location, i, fp.stability});
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });

  std::vector<StarInterval> stars;
  auto consider = [&](double a, double b) {
    try {
      if (auto k = classify_interval(sys, a, b)) stars.push_back(*k);
    } catch (const NumericalError& e) {
      if (std::isfinite(a) && std::isfinite(b)) r.unclassified_mass += b - a;
      r.notes.push_back("gap [" + to_decimal(a) + ", " + to_decimal(b) + "] unclassified: " + e.what());
    }
  };
  if (circle) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) consider(pts[i].x, pts[i + 1].x);
    consider(pts.back().x, pts.front().x + 1.0);
  } else {
    consider(-INFINITY, pts.front().x);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) consider(pts[i].x, pts[i + 1].x);
    consider(pts.back().x, INFINITY);
  }
  const bool has_ss = std::any_of(stars.begin(), stars.end(),
                                  [](const StarInterval& k) { return k.kind == StarKind::ss; });
  if (!has_ss) {
    r.status = DecompositionStatus::minimal;
    r.reason = "no ss-interval: the circle is minimal, no decomposition";
    return r;
  }
  r.status = DecompositionStatus::decomposed;
  r.reason = "not minimal";

  const double tol = 1e-9;
  for (const StarInterval& k : stars) {
    DecompositionPiece pc;
    pc.type = PieceType::star_interval;
    pc.kind = k.kind;
    pc.a = k.a;
    pc.b = k.b;
    pc.transitivity_inverse = k.kind == StarKind::uu || k.kind == StarKind::u;
    r.pieces.push_back(pc);
  }
  for (const Point& p : pts) {
    bool covered = false;
    for (const StarInterval& k : stars)
      for (double x : {p.x, p.x + 1.0})
        covered = covered || (x >= k.a - tol && x <= k.b + tol);
    if (covered) continue;
    DecompositionPiece pc;
    pc.a = pc.b = p.x;
    pc.owner = p.owner;
    pc.stability = p.stability;
    r.pieces.push_back(pc);
  }
  std::sort(r.pieces.begin(), r.pieces.end(),
            [](const DecompositionPiece& x, const DecompositionPiece& y) { return x.a < y.a; });
  for (std::size_t i = 0; i + 1 < r.pieces.size(); ++i)
    if (r.pieces[i + 1].a <= r.pieces[i].b + tol) r.overlap = true;
  if (circle && r.pieces.size() > 1 && r.pieces.front().a + 1.0 <= r.pieces.back().b + tol)
    r.overlap = true;
  if (r.overlap) r.notes.push_back("pieces overlap");

  const WitnessSearch fwd(sys.maps, false, opt.seed);
  const WitnessSearch inv(sys.maps, true, opt.seed);
  detail::parallel_for(r.pieces.size(), [&](std::size_t i) {
    DecompositionPiece& pc = r.pieces[i];
    auto take = [&](const WitnessSearch& ws, Interval J) {
      if (auto w = ws.find(J, i); w && verify_witness(sys.maps, *w)) pc.witnesses.push_back(*w);
    };
    if (pc.type == PieceType::fixed_point) {
      double gap = 1.0;
      for (const Point& q : pts)
        if (q.x != pc.a) gap = std::min(gap, std::abs(circle ? circle_delta(q.x, pc.a) : q.x - pc.a));
      const double rad = std::min(1e-3, 0.25 * gap);
      const Interval J{pc.a - rad, pc.a + rad};
      if (pc.stability != Stability::repelling) take(fwd, J);
      if (pc.stability != Stability::attracting) take(inv, J);
      pc.transitivity_coverage = 1.0;
      return;
    }
    Interval J;
    if (std::isfinite(pc.a) && std::isfinite(pc.b)) {
      const double w = std::min((pc.b - pc.a) / 8.0, 1e-2), m = 0.5 * (pc.a + pc.b);
      J = {m - 0.5 * w, m + 0.5 * w};
    } else {
      J = std::isfinite(pc.a) ? Interval{pc.a + 0.1, pc.a + 0.11} : Interval{pc.b - 0.11, pc.b - 0.1};
    }
    // Phi^-1 first on intervals repelling for Phi.
    const bool back = pc.kind == StarKind::uu || pc.kind == StarKind::u;
    take(back ? inv : fwd, J);
    if (pc.witnesses.empty()) take(back ? fwd : inv, J);
    sample_transitivity(sys.maps, pc, opt.orbit_budget, opt.delta, opt.seed, 1000 + i);
  });
  for (const auto& pc : r.pieces)
    if (pc.witnesses.empty())
      r.notes.push_back("piece at " + to_decimal(pc.a) + " has no verified witness");
  return r;
}

MinimalityCertificate minimality_certificate(const CircleMap& f0, const CircleMap& f1,
                                             double epsilon, const MinimalityOptions& opt) {
  MinimalityCertificate c;
  c.seed = opt.seed;
  c.delta = opt.delta;
  c.closeness = {closeness_certificate(f0, epsilon), closeness_certificate(f1, epsilon)};
  ReducedPair sys;
  std::vector<StarInterval> stars;
  try {
    sys = reduce({f0, f1});
    stars = enumerate_star_intervals(sys);
  } catch (const CommonFixedPoint&) {
    c.common_point = true;
    c.reason = "generators share a periodic point";
    return c;
  } catch (const NumericalError& e) {
    c.reason = std::string("classification failed: ") + e.what();
    return c;
  }
  c.periodic_points = sys.has_fixed_points;
  c.q = sys.q;
  for (const StarInterval& k : stars)
    if (k.kind == StarKind::ss) {
      c.verdict = MinimalityVerdict::not_minimal;
      c.ss_witness = k;
      c.reason = "ss-interval [" + to_decimal(k.a) + ", " + to_decimal(k.b) + "]";
      return c;
    }
  if (!c.closeness[0].certified || !c.closeness[1].certified) {
    c.reason = "epsilon-closeness refuted: " + closeness_text(c.closeness);
    return c;
  }
  if (!c.periodic_points[0] || !c.periodic_points[1]) {
    c.reason = "a generator has no periodic points";
    return c;
  }
  c.verdict = MinimalityVerdict::minimal_certified;
  c.reason = "no ss-interval under certified hypotheses";
  c.bins = long(std::ceil(1.0 / opt.delta - 1e-9));
  c.forward = orbit_coverage(sys.maps, opt.delta, opt.seeds, opt.budget, opt.seed, &c.histogram);
  c.backward = orbit_coverage(sys.maps.inverse(), opt.delta, opt.seeds, opt.budget,
                              detail::stream_seed(opt.seed, 7), nullptr);
  if (opt.witnesses) {
    for (bool inverse : {false, true}) {
      const WitnessSearch ws(sys.maps, inverse, opt.seed);
      long n = 0;
      for (const auto& w : ws.per_bin(opt.delta))
        if (w && verify_witness(sys.maps, *w, 8)) ++n;
      (inverse ? c.repeller_bins : c.attractor_bins) = n;
    }
  }
  return c;
}

DenjoyResult denjoy_check(const CircleMap& f0, const CircleMap& f1, long budget,
                          std::uint64_t seed, double epsilon) {
  DenjoyResult r;
  r.seed = seed;
  const ReducedPair sys = reduce({f0, f1});
  const bool certified =
      closeness_certificate(f0, epsilon).certified && closeness_certificate(f1, epsilon).certified;
  std::vector<StarInterval> ss;
  for (const StarInterval& k : enumerate_star_intervals(sys))
    if (k.kind == StarKind::ss) ss.push_back(k);
  r.in_scope = certified && !ss.empty();
  r.label = r.in_scope ? "certified" : "outside theorem scope";
  const bool circle = sys.maps.is_circle();
  const std::array<double, 3> res{1e-2, 1e-3, 1e-4};
  r.intervals.resize(ss.size());
  detail::parallel_for(ss.size(), [&](std::size_t i) {
    DenjoyInterval& di = r.intervals[i];
    di.a = ss[i].a;
    di.b = ss[i].b;
    const double len = di.b - di.a;
    std::vector<long> checkpoints;
    for (long b = budget; b >= 1000 && checkpoints.size() < 7; b /= 2) checkpoints.push_back(b);
    std::reverse(checkpoints.begin(), checkpoints.end());
    std::vector<double> visited;
    visited.reserve(std::size_t(budget));
    // Runs up to budget / 16 letters, so one generator can cross a slow interval.
    const int run_log2 = std::clamp(int(std::lround(std::log2(double(budget) / 16.0))), 12, 20);
    WordSampler ws(seed, i, WordStrategy::mixed, nullptr, run_log2);
    double y = di.a + 0.5 * len;
    std::size_t next = 0;
    for (long t = 1; t <= budget && next < checkpoints.size(); ++t) {
      y = into(sys.maps[ws.next()].lift(y), di.a, circle);
      visited.push_back(y);
      if (t != checkpoints[next]) continue;
      ++next;
      std::vector<double> s = visited;
      s.push_back(di.a);
      s.push_back(di.b);
      std::sort(s.begin(), s.end());
      GapTrace g;
      g.steps = t;
      for (std::size_t j = 0; j + 1 < s.size(); ++j)
        if (s[j] >= di.a && s[j + 1] <= di.b) g.largest_gap = std::max(g.largest_gap, s[j + 1] - s[j]);
      for (std::size_t k = 0; k < res.size(); ++k) {
        const long nb = std::max(1L, long(std::ceil(len / res[k])));
        std::vector<char> seen(std::size_t(nb), 0);
        long hit = 0;
        for (double v : visited) {
          if (v < di.a || v > di.b) continue;
          const long b = std::min(nb - 1, long((v - di.a) / res[k]));
          if (!seen[std::size_t(b)]) {
            seen[std::size_t(b)] = 1;
            ++hit;
          }
        }
        g.coverage[k] = double(hit) / double(nb);
      }
      if (!di.trace.empty() && g.largest_gap > di.trace.back().largest_gap) di.monotone = false;
      di.trace.push_back(g);
    }
    const GapTrace& last = di.trace.back();
    if (last.coverage[2] >= 0.99 || last.largest_gap < 1e-3) {
      di.taxonomy = "nonempty interior";
    } else {
      long occupied = long(std::llround(last.coverage[2] * std::ceil(len / res[2])));
      di.taxonomy = occupied <= 64 ? "finite orbit" : "cantor";
    }
    bool stable = di.trace.size() >= 3;
    for (std::size_t k = 0; k < res.size() && stable; ++k) {
      const std::size_t n = di.trace.size();
      for (std::size_t j = n - 3; j + 1 < n; ++j)
        stable = stable && std::abs(di.trace[j + 1].coverage[k] - di.trace[j].coverage[k]) < 1e-3 &&
                 di.trace[j + 1].coverage[k] < 1.0;
    }
    if (di.taxonomy == "cantor" && stable) di.verdict = DenjoyVerdict::cantor_suspected;
  });
  for (const auto& di : r.intervals)
    if (di.verdict == DenjoyVerdict::cantor_suspected) r.verdict = DenjoyVerdict::cantor_suspected;
  return r;
}

}  // namespace cifs
