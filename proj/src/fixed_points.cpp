#include "cifs/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cifs/errors.hpp"

namespace cifs {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::attracting: return "attracting";
    case Stability::repelling: return "repelling";
    case Stability::semi_attracting_left: return "semi_attracting_left";
    case Stability::semi_attracting_right: return "semi_attracting_right";
    case Stability::parabolic_unresolved: return "parabolic_unresolved";
  }
  return "?";
}

namespace {

double root_in(const CircleMap& g, double p, double a, double b, double fa, double fb) {
  auto G = [&](double x) { return g.lift(x) - x - p; };
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t it = 200;
  auto tol = [](double l, double r) { return std::abs(r - l) <= 1e-15 * std::max(1.0, std::abs(l)); };
  auto [l, r] = boost::math::tools::toms748_solve(G, a, b, fa, fb, tol, it);
  return 0.5 * (l + r);
}

Stability classify(const CircleMap& g, double p, double x, double d, double margin) {
  if (d < 1.0 - margin) return Stability::attracting;
  if (d > 1.0 + margin) return Stability::repelling;
  int sl = 0, sr = 0;
  for (double h : {1e-3, 1e-4}) {
    double gl = g.lift(x - h) - (x - h) - p;
    double gr = g.lift(x + h) - (x + h) - p;
    int l = gl > 0 ? 1 : (gl < 0 ? -1 : 0);
    int r = gr > 0 ? 1 : (gr < 0 ? -1 : 0);
    if ((sl && l != sl) || (sr && r != sr)) return Stability::parabolic_unresolved;
    sl = l;
    sr = r;
  }
  if (sl > 0 && sr > 0) return Stability::semi_attracting_left;
  if (sl < 0 && sr < 0) return Stability::semi_attracting_right;
  return Stability::parabolic_unresolved;
}

}  // namespace

std::vector<FixedPointRecord> fixed_points(const CircleMap& f, int period, int map_tag,
                                           const FixedPointOptions& opt) {
  if (period < 1) throw InvalidArgument("fixed_points: period must be positive");
  const CircleMap g = f.powered(period);
  const Tolerances& tol = f.tolerances();
  const bool circle = f.is_circle();
  double lo = 0.0, hi = 1.0;
  if (!circle) {
    auto r = f.family().scan_range();
    // Reflection maps the scan window to its mirror image.
    if (f.is_reflected()) r = {-r.second, -r.first};
    lo = r.first;
    hi = r.second;
  }
  const int n = opt.grid;
  std::vector<double> xs(n + 1), gs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = lo + (hi - lo) * i / n;
    gs[i] = g.lift(xs[i]) - xs[i];
  }
  std::vector<long> ps = opt.translations;
  if (ps.empty()) {
    if (circle) {
      auto [mn, mx] = std::minmax_element(gs.begin(), gs.end());
      for (long p = long(std::ceil(*mn - 1e-9)); p <= long(std::floor(*mx + 1e-9)); ++p)
        ps.push_back(p);
    } else {
      ps.push_back(0);
    }
  }

  std::vector<FixedPointRecord> out;
  auto add = [&](double x, long p) {
    if (circle) x = wrap01(x);
    if (!(std::abs(g.lift(x) - x - double(p)) <= tol.point)) return;
    FixedPointRecord r;
    r.location = x;
    r.period = period;
    r.map_tag = map_tag;
    r.translation = p;
    r.derivative = g.derivative(x);
    r.stability = classify(g, double(p), x, r.derivative, tol.classification_margin);
    out.push_back(r);
  };

  for (long p : ps) {
    const double pd = double(p);
    // f^q - p = id: every point is periodic and none is isolated.
    if (std::all_of(gs.begin(), gs.end(), [&](double v) { return std::abs(v - pd) <= tol.point; }))
      continue;
    for (int i = 0; i < n; ++i) {
      double a = gs[i] - pd, b = gs[i + 1] - pd;
      if (a == 0.0) {
        add(xs[i], p);
      } else if ((a < 0) != (b < 0) && b != 0.0) {
        add(root_in(g, pd, xs[i], xs[i + 1], a, b), p);
      } else if (i > 0) {
        // Near-tangency: a local minimum of |G| without a sign change.
        double c = gs[i - 1] - pd;
        if (std::abs(a) <= std::abs(c) && std::abs(a) <= std::abs(b) && (a < 0) == (c < 0) &&
            (a < 0) == (b < 0) && std::abs(a) < 1e-3) {
          double sgn = a < 0 ? -1.0 : 1.0;
          auto H = [&](double x) { return sgn * (g.lift(x) - x - pd); };
          auto m = boost::math::tools::brent_find_minima(H, xs[i - 1], xs[i + 1], 52);
          if (std::abs(m.second) <= tol.point) add(m.first, p);
        }
      }
    }
  }

  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });
  std::vector<FixedPointRecord> uniq;
  for (const auto& r : out) {
    if (!uniq.empty() && std::abs(r.location - uniq.back().location) < tol.point) continue;
    uniq.push_back(r);
  }
  if (circle && uniq.size() > 1 && uniq.front().location + 1.0 - uniq.back().location < tol.point)
    uniq.pop_back();
  if (opt.strict)
    for (const auto& r : uniq)
      if (r.stability == Stability::parabolic_unresolved) throw UnresolvedTangency(r.location);
  return uniq;
}

RotationResult rotation_number(const CircleMap& f, long budget, int q_max) {
  if (budget < 1000) throw InvalidArgument("rotation_number: budget must be >= 1000");
  RotationResult r;
  FixedPointOptions opt;
  opt.strict = false;
  if (!f.is_circle()) {
    r.error_bound = 0.0;
    r.rational = !fixed_points(f, 1, 0, opt).empty();
    r.q = r.rational ? 1 : 0;
    return r;
  }
  double x = 0.0;
  for (long i = 0; i < budget; ++i) x = f.lift(x);
  r.estimate = x / double(budget);
  r.error_bound = 1.0 / double(budget);
  for (int q = 1; q <= q_max; ++q) {
    double qr = q * r.estimate;
    long p = std::lround(qr);
    if (std::abs(qr - double(p)) > 2.0 * q / double(budget) + 1e-12) continue;
    opt.translations = {p};
    const CircleMap g = f.powered(q);
    bool identity = true;
    for (int i = 0; i < 64 && identity; ++i)
      identity = std::abs(g.lift(i / 64.0) - i / 64.0 - double(p)) <= f.tolerances().point;
    if (identity || !fixed_points(f, q, 0, opt).empty()) {
      r.rational = true;
      r.p = p;
      r.q = q;
      break;
    }
  }
  return r;
}

}  // namespace cifs
