#include <algorithm>
#include <cmath>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/return_maps.hpp"

namespace cifs {

DuminyResult duminy_condition(const NormalizedInterval& n, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("duminy_condition: epsilon must be positive");
  DuminyResult r;
  r.epsilon = epsilon;
  const CircleMap& g0 = n.maps.f0;
  const CircleMap& g1 = n.maps.f1;
  const double a = n.a;
  const double u = g1.lift(a);
  const double w = g0.lift_inverse(u);
  r.window = w - a;
  if (!(u < w) || w > n.b) {
    r.witness = "overlap empty: f0^-1 f1(a) = " + to_decimal(w) + " outside the interval";
    return r;
  }
  const int M = 4096;
  for (int i = 0; i <= M; ++i) {
    double x = a + r.window * (i == 0 ? 1e-9 : double(i) / M);
    Jet j0 = g0.jet(x), j1 = g1.jet(x);
    if (i < M) r.epsilon_eff = std::max(r.epsilon_eff, std::abs(j0.d1 - 1.0));
    r.v0 = std::max(r.v0, std::abs(j0.d2 / j0.d1));
    r.v1 = std::max(r.v1, std::abs(j1.d2 / j1.d1));
  }
  r.v = (r.v0 + r.v1) * r.window;
  const double e = std::max(r.epsilon_eff, 1e-12);
  r.factor = (1.0 - e) / e * std::exp(-r.v);
  r.margin = r.factor - 1.0;
  if (!(r.epsilon_eff < epsilon))
    r.witness = "|Df0 - 1| reaches " + to_decimal(r.epsilon_eff) + " on the window";
  else if (!(r.factor > 1.0))
    r.witness = "(1 - eps) / eps * exp(-V) = " + to_decimal(r.factor);
  else
    r.holds = true;
  return r;
}

double proximity_chain(double eps) {
  return (1.0 - eps) / eps * std::exp(-2.0 * eps * eps / (1.0 - eps));
}

double periodic_chain(double eps) {
  const double d = std::expm1(eps);
  return (1.0 - d) / d * std::exp(-2.0 * eps);
}

double cycle_chain(double eps) { return std::exp(-2.0 * eps) / std::expm1(eps); }

DuminyResult duminy_condition(const MapPair& maps, const StarInterval& k, double epsilon) {
  return duminy_condition(normalize(maps, k), epsilon);
}

ReturnMapAtlas build_local_return_map(const MapPair& maps, const StarInterval& k, int depth,
                                      double epsilon) {
  if (depth < 1) throw InvalidArgument("build_local_return_map: depth must be positive");
  ReturnMapAtlas at;
  at.chart = normalize(maps, k);
  at.maps = at.chart.maps;
  at.depth = depth;
  const CircleMap& g0 = at.maps.f0;
  const CircleMap& g1 = at.maps.f1;
  const double a = at.chart.a;
  const double u = g1.lift(a);
  const double w = g0.lift_inverse(u);
  if (!(u < w) || w > at.chart.b)
    throw OverlapEmpty("f0(K) and f1(K) do not overlap: f0^-1 f1(a) = " + to_decimal(w));
  at.domain = {u, w};
  at.base_points = {a};

  DuminyResult d = duminy_condition(at.chart, epsilon);
  at.epsilon = d.epsilon_eff;
  at.v0 = d.v0;
  at.v1 = d.v1;
  at.v = d.v;
  at.factor = d.factor;
  at.hypothesis_holds = d.holds;

  // t_m = f1^m(u); I_m = (t_{m-1}, min(t_m, w)].
  std::vector<double> t{u};
  while (t.back() <= w) {
    if (t.size() > 1000000) throw NonConvergence("f1-orbit of f1(a) does not leave A");
    t.push_back(g1.lift(t.back()));
  }
  at.ell = long(t.size()) - 2;
  // q_n = f0^n(u), decreasing to a.
  std::vector<double> q{u};
  for (int n = 1; n <= depth; ++n) q.push_back(g0.lift(q.back()));

  for (long m = 1; m <= at.ell + 1; ++m) {
    const double lo_m = t[std::size_t(m - 1)];
    const double hi_m = std::min(t[std::size_t(m)], w);
    std::vector<double> p(q.size());
    for (std::size_t n = 0; n < q.size(); ++n) {
      double x = q[n];
      for (long i = 0; i < m; ++i) x = g1.lift(x);
      p[n] = x;
    }
    p[0] = t[std::size_t(m)];
    for (int n = 1; n <= depth; ++n) {
      double lo = p[std::size_t(n)], hi = std::min(p[std::size_t(n - 1)], hi_m);
      if (!(lo < hi)) continue;
      Piece pc;
      pc.I = {lo, hi};
      pc.index = {m, n};
      pc.word = {{1, -m}, {0, -n}};
      pc.image = {apply_value(at.maps, pc.word, lo), apply_value(at.maps, pc.word, hi)};
      at.pieces.push_back(pc);
      if (hi < w) {
        Discontinuity d{hi, 0, {}};
        push(d.expr, {1, 1});
        if (n > 1) push(d.expr, {0, n - 1});
        push(d.expr, {1, m});
        at.discontinuities.push_back(d);
      }
    }
    double tail_hi = std::min(p[std::size_t(depth)], hi_m);
    if (tail_hi > lo_m) {
      at.tail.push_back({lo_m, tail_hi});
      at.tail_mass += tail_hi - lo_m;
    }
  }
  std::sort(at.pieces.begin(), at.pieces.end(),
            [](const Piece& x, const Piece& y) { return x.I.lo < y.I.lo; });
  std::sort(at.discontinuities.begin(), at.discontinuities.end(),
            [](const Discontinuity& x, const Discontinuity& y) { return x.x < y.x; });
  return at;
}

double auxiliary_map(const ReturnMapAtlas& at, double x) {
  if (at.global) throw InvalidArgument("auxiliary_map: local atlas only");
  const double u = at.domain.lo;
  return x <= u ? at.maps.f0.lift_inverse(x) : at.maps.f1.lift_inverse(x);
}

std::optional<double> extended_return(const ReturnMapAtlas& at, double x, long budget) {
  if (!(x > at.chart.a && x < at.chart.b)) return std::nullopt;
  long k = 0;
  while (!at.domain.contains(x)) {
    if (++k > budget) return std::nullopt;
    x = auxiliary_map(at, x);
  }
  // The return enters A from (a, f1(a)].
  bool below = false;
  do {
    if (++k > budget) return std::nullopt;
    below = below || x <= at.domain.lo;
    x = auxiliary_map(at, x);
  } while (!(below && at.domain.contains(x)));
  return x;
}

}  // namespace cifs
