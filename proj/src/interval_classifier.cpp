#include "cifs/interval_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"

namespace cifs {

std::string to_string(StarKind k) {
  switch (k) {
    case StarKind::ss: return "ss";
    case StarKind::su: return "su";
    case StarKind::uu: return "uu";
    case StarKind::s: return "s";
    case StarKind::u: return "u";
  }
  return "?";
}

namespace {

void guard_common(const ReducedPair& r, double tol) {
  for (const auto& x : r.fixed[0])
    for (const auto& y : r.fixed[1]) {
      double d = r.maps.is_circle() ? circle_delta(x.location, y.location) : y.location - x.location;
      if (std::abs(d) < tol) throw CommonFixedPoint(x.location, y.location);
    }
}

std::vector<FixedPointRecord> fixed_of(const CircleMap& g, int tag) {
  FixedPointOptions opt;
  opt.strict = false;
  if (g.is_circle()) opt.translations = {0};
  return fixed_points(g, 1, tag, opt);
}

// Which generator fixes x (-1 if none); x is a lift coordinate.
int owner(const ReducedPair& sys, double x) {
  const double tol = 10.0 * sys.maps.f0.tolerances().point;
  for (int i = 0; i < 2; ++i)
    for (const auto& r : sys.fixed[i]) {
      double d = sys.maps.is_circle() ? circle_delta(r.location, x) : x - r.location;
      if (std::abs(d) <= tol) return i;
    }
  return -1;
}

const FixedPointRecord* record_at(const ReducedPair& sys, int i, double x) {
  const double tol = 10.0 * sys.maps.f0.tolerances().point;
  for (const auto& r : sys.fixed[i]) {
    double d = sys.maps.is_circle() ? circle_delta(r.location, x) : x - r.location;
    if (std::abs(d) <= tol) return &r;
  }
  return nullptr;
}

std::vector<double> interior_samples(double a, double b) {
  std::vector<double> xs;
  if (std::isinf(b)) {
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) xs.push_back(a + t);
  } else if (std::isinf(a)) {
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) xs.push_back(b - t);
  } else {
    for (int k = 1; k < 8; ++k) xs.push_back(a + (b - a) * k / 8.0);
  }
  return xs;
}

// Sign of g - id on the open gap; throws when the samples disagree.
int gap_sign(const CircleMap& g, double a, double b) {
  int s = 0;
  for (double x : interior_samples(a, b)) {
    double d = g.lift(x) - x;
    if (std::abs(d) < g.tolerances().point) continue;
    int t = d > 0 ? 1 : -1;
    if (s != 0 && t != s)
      throw AmbiguousKind("sign of f - id changes inside [" + to_decimal(a) + ", " + to_decimal(b) +
                          "]: missed fixed point");
    s = t;
  }
  return s;
}

bool interior_fixed_point(const ReducedPair& sys, double a, double b) {
  const double tol = sys.maps.f0.tolerances().point;
  for (int i = 0; i < 2; ++i)
    for (const auto& r : sys.fixed[i]) {
      for (int k = -1; k <= 2; ++k) {
        double x = r.location + (sys.maps.is_circle() ? k : 0);
        if (x > a + tol && x < b - tol) return true;
        if (!sys.maps.is_circle()) break;
      }
    }
  return false;
}

void attach_witnesses(const MapPair& m, StarInterval& k) {
  double a = k.a, b = k.b;
  if (std::isinf(b)) b = a + 10.0;
  if (std::isinf(a)) a = b - 10.0;
  double lo0 = m.f0.lift(a), hi0 = m.f0.lift(b), lo1 = m.f1.lift(a), hi1 = m.f1.lift(b);
  const int n = 129;
  double slack = INFINITY;
  for (int i = 0; i < n; ++i) {
    double x = a + (b - a) * i / (n - 1);
    double s0 = std::min(x - lo0, hi0 - x), s1 = std::min(x - lo1, hi1 - x);
    slack = std::min(slack, std::max(s0, s1));
  }
  k.covering_samples = n;
  k.covering_slack = slack;
  if (slack < -m.f0.tolerances().point) k.warnings.push_back("covering check failed on samples");
  double lo = std::max(lo0, lo1), hi = std::min(hi0, hi1);
  if (std::isinf(k.b)) hi = std::max(hi0, hi1);
  k.has_overlap = lo <= hi;
  if (k.has_overlap) k.overlap_witness = std::isinf(k.b) ? lo : 0.5 * (lo + hi);
}

void endpoint_warnings(const ReducedPair& sys, StarInterval& k) {
  for (auto [x, o] : {std::pair{k.a, k.owner_a}, std::pair{k.b, k.owner_b}}) {
    if (o < 0) continue;
    const FixedPointRecord* r = record_at(sys, o, x);
    if (r && r->stability == Stability::parabolic_unresolved)
      k.warnings.push_back("endpoint " + to_decimal(x) + " has unresolved stability");
  }
}

}  // namespace

ReducedPair inventory(const MapPair& maps) {
  ReducedPair r;
  r.maps = maps;
  for (int i = 0; i < 2; ++i) {
    r.fixed[i] = fixed_of(maps[i], i);
    r.has_fixed_points[i] = !r.fixed[i].empty();
  }
  guard_common(r, maps.f0.tolerances().point);
  return r;
}

ReducedPair reduce(const MapPair& maps, int q_max) {
  ReducedPair r;
  r.maps = maps;
  for (int i = 0; i < 2; ++i) {
    if (maps[i].is_circle()) {
      RotationResult rot = rotation_number(maps[i], 10000, q_max);
      if (rot.rational) {
        r.q[i] = rot.q;
        r.p[i] = rot.p;
      }
    }
    CircleMap g = maps[i].powered(r.q[i]).shifted(r.p[i]);
    (i == 0 ? r.maps.f0 : r.maps.f1) = g;
    r.fixed[i] = fixed_of(g, i);
    r.has_fixed_points[i] = !r.fixed[i].empty();
  }
  guard_common(r, maps.f0.tolerances().point);
  return r;
}

std::optional<StarInterval> classify_interval(const ReducedPair& sys, double a, double b) {
  if (!(a < b)) throw InvalidArgument("classify_interval: need a < b");
  const MapPair& m = sys.maps;
  int oa = std::isinf(a) ? -1 : owner(sys, a);
  int ob = std::isinf(b) ? -1 : owner(sys, b);
  if ((oa < 0 && !std::isinf(a)) || (ob < 0 && !std::isinf(b))) return std::nullopt;
  if (oa < 0 && ob < 0) return std::nullopt;
  if (interior_fixed_point(sys, a, b)) return std::nullopt;
  const int s0 = gap_sign(m.f0, a, b), s1 = gap_sign(m.f1, a, b);
  if (s0 == 0 || s1 == 0) return std::nullopt;
  auto sigma = [&](int i) { return i == 0 ? s0 : s1; };

  StarInterval k;
  k.a = a;
  k.b = b;
  k.owner_a = oa;
  k.owner_b = ob;
  bool found = false;
  const double margin = m.f0.tolerances().classification_margin;

  if (std::isinf(b) || std::isinf(a)) {
    const bool right = std::isinf(b);
    const int g = right ? oa : ob, h = 1 - g;
    // Towards +inf: s if g < id and h > id; mirrored towards -inf.
    int sg = right ? sigma(g) : -sigma(g), sh = right ? sigma(h) : -sigma(h);
    if (sg < 0 && sh > 0) {
      k.kind = StarKind::s;
      found = true;
    } else if (sg > 0 && sh < 0) {
      k.kind = StarKind::u;
      k.normalization.invert = true;
      found = true;
    }
    k.mirrored = !right;
    k.normalization.reflect = !right;
    k.normalization.swap = g == 1;
  } else if (oa != ob) {
    const int g = oa, h = ob;
    const CircleMap &G = m[g], &H = m[h];
    if (sigma(g) < 0 && sigma(h) > 0) {
      double gap = G.lift(b) - H.lift(a);
      if (gap >= 0) {
        k.kind = StarKind::ss;
        found = true;
        if (gap < margin) k.warnings.push_back("covering holds within the classification margin");
      }
    } else if (sigma(g) > 0 && sigma(h) < 0) {
      double gap = G.lift_inverse(b) - H.lift_inverse(a);
      if (gap >= 0) {
        k.kind = StarKind::uu;
        k.normalization.invert = true;
        found = true;
        if (gap < margin) k.warnings.push_back("covering holds within the classification margin");
      }
    }
    k.normalization.swap = g == 1;
  } else {
    const int g = oa, h = 1 - g;
    const CircleMap& H = m[h];
    if (sigma(g) < 0 && sigma(h) > 0 && H.lift(a) < b) {
      k.kind = StarKind::su;
      found = true;
    } else if (sigma(g) > 0 && sigma(h) < 0 && H.lift(b) > a) {
      k.kind = StarKind::su;
      k.mirrored = true;
      k.normalization.reflect = true;
      found = true;
    }
    k.normalization.swap = g == 1;
  }
  if (!found) return std::nullopt;
  attach_witnesses(m, k);
  endpoint_warnings(sys, k);
  return k;
}

std::optional<StarInterval> classify_interval(const CircleMap& f0, const CircleMap& f1, double a,
                                              double b) {
  return classify_interval(inventory({f0, f1}), a, b);
}

std::vector<StarInterval> enumerate_star_intervals(const ReducedPair& sys) {
  std::vector<double> pts;
  for (int i = 0; i < 2; ++i)
    for (const auto& r : sys.fixed[i]) pts.push_back(r.location);
  std::sort(pts.begin(), pts.end());
  std::vector<StarInterval> out;
  if (pts.empty()) return out;
  auto consider = [&](double a, double b) {
    if (auto k = classify_interval(sys, a, b)) out.push_back(*k);
  };
  if (sys.maps.is_circle()) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) consider(pts[i], pts[i + 1]);
    consider(pts.back(), pts.front() + 1.0);
  } else {
    consider(-INFINITY, pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) consider(pts[i], pts[i + 1]);
    consider(pts.back(), INFINITY);
  }
  return out;
}

std::vector<StarInterval> enumerate_star_intervals(const CircleMap& f0, const CircleMap& f1) {
  return enumerate_star_intervals(inventory({f0, f1}));
}

NormalizedInterval normalize(const MapPair& maps, const StarInterval& k) {
  NormalizedInterval n;
  n.how = k.normalization;
  n.maps = maps;
  n.a = k.a;
  n.b = k.b;
  if (n.how.invert) n.maps = n.maps.inverse();
  if (n.how.reflect) {
    n.maps = n.maps.reflected();
    n.a = -k.b;
    n.b = -k.a;
  }
  if (n.how.swap) n.maps = n.maps.swapped();
  return n;
}

bool Basin::contains(double x) const {
  const double s = attractor.location;
  if (!circle) return (left && x > lo && x < s) || (right && x > s && x < hi);
  double y = s + wrap01(x - s);  // in [s, s + 1)
  if (y == s) return false;
  if (right && y > s && y < hi) return true;
  if (left && y - 1.0 > lo && y - 1.0 < s) return true;
  return false;
}

std::optional<Basin> basin_of(const FixedPointRecord& attractor,
                              const std::vector<FixedPointRecord>& pts, bool circle) {
  if (!attractor.has_basin()) return std::nullopt;
  Basin b;
  b.attractor = attractor;
  b.circle = circle;
  b.left = attractor.stability != Stability::semi_attracting_right;
  b.right = attractor.stability != Stability::semi_attracting_left;
  const double s = attractor.location;
  auto it = std::find_if(pts.begin(), pts.end(), [&](const FixedPointRecord& r) {
    return std::abs(circle ? circle_delta(r.location, s) : r.location - s) <= 1e-9;
  });
  if (it == pts.end()) throw InvalidArgument("basin_of: attractor not in the inventory");
  std::size_t i = std::size_t(it - pts.begin()), n = pts.size();
  if (circle) {
    b.lo = n == 1 ? s - 1.0 : (i == 0 ? pts[n - 1].location - 1.0 : pts[i - 1].location);
    b.hi = n == 1 ? s + 1.0 : (i == n - 1 ? pts[0].location + 1.0 : pts[i + 1].location);
  } else {
    b.lo = i == 0 ? -INFINITY : pts[i - 1].location;
    b.hi = i == n - 1 ? INFINITY : pts[i + 1].location;
  }
  return b;
}

std::optional<Basin> basin_of(const FixedPointRecord& attractor, const CircleMap& map) {
  return basin_of(attractor, fixed_of(map, attractor.map_tag), map.is_circle());
}

}  // namespace cifs
