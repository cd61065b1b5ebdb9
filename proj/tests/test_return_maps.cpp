#include <cmath>
#include <random>

#include "doctest.h"
#include "cifs/errors.hpp"
#include "cifs/return_maps.hpp"
#include "test_support.hpp"

using namespace cifs;

namespace {

CircleMap pr(double a, double b, int k, double phi) { return CircleMap::perturbed_rotation(a, b, k, phi); }

// Strongly contracting pairs with one ss-interval each.
std::vector<MapPair> strong_ss() {
  return {{pr(0, 0.7, 1, 0), pr(0, 0.7, 1, 0.3)},
          {pr(0, 0.7, 1, 0), pr(0, 0.2, 1, 0.3)},
          {pr(0, 0.75, 1, 0), pr(0, 0.75, 1, 0.25)},
          {pr(0, 0.8, 1, 0.05), pr(0, 0.5, 1, 0.3)},
          MapPair{pr(0, 0.7, 1, 0), pr(0, 0.7, 1, 0.3)}.reflected()};
}

// Close to rotations: the local hypothesis holds.
std::vector<MapPair> weak_ss() {
  return {{pr(0, 0.2, 1, 0), pr(0, 0.2, 1, 0.3)},
          {pr(0, 0.1, 1, 0), pr(0, 0.15, 1, 0.2)},
          {pr(0, 0.05, 1, 0.1), pr(0, 0.05, 1, 0.35)}};
}

// Saddle-node-like pairs: A0 < R1 < A1 < R0 in each period of 1/h.
MapPair cycle_pair(int h, double beta, double d0, double d1) {
  const double k = 2 * M_PI * h;
  return {pr(beta * std::sin(k * d0) / k, beta, h, 0), pr(-beta * std::sin(k * d1) / k, beta, h, 0.5 / h)};
}

StarInterval the(const ReducedPair& sys, StarKind kind) {
  for (const auto& k : enumerate_star_intervals(sys))
    if (k.kind == kind) return k;
  FAIL("no interval of the requested kind");
  return {};
}

double unif(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * support::uniform01(rng); }

// Return to A under F = f0^{-1} on (a, u], f1^{-1} on (u, b], entering
// from (a, u]; counts the f1 and f0 steps.
struct Walk {
  double y;
  long m, n;
};
Walk f_walk(const MapPair& g, double u, double w, double x) {
  Walk r{x, 0, 0};
  do {
    if (r.y > u) {
      r.y = g.f1.lift_inverse(r.y);
      ++r.m;
    } else {
      r.y = g.f0.lift_inverse(r.y);
      ++r.n;
    }
  } while (!(r.n > 0 && r.y > u && r.y <= w));
  return r;
}

// Stagewise attraction: at stage k pull with the owner of s_k until the
// point passes s_{k+1}.
std::pair<double, std::vector<long>> stage_walk(const ReturnMapAtlas& at, double x) {
  std::vector<long> ex;
  const auto& s = at.cycle.attractors;
  for (int k = 0; k < at.cycle.length; ++k) {
    const CircleMap& f = at.maps[at.cycle.parities[std::size_t(k)]];
    long m = 0;
    while (x <= s[std::size_t(k + 1)]) {
      x = f.lift_inverse(x);
      ++m;
    }
    ex.push_back(m);
  }
  return {x - (s.back() - s.front()), ex};
}

void check_partition(const ReturnMapAtlas& at) {
  double total = at.tail_mass;
  for (std::size_t i = 0; i < at.pieces.size(); ++i) {
    const auto& p = at.pieces[i];
    CHECK(p.I.lo < p.I.hi);
    CHECK(p.I.lo >= at.domain.lo);
    CHECK(p.I.hi <= at.domain.hi);
    if (i + 1 < at.pieces.size()) CHECK(p.I.hi <= at.pieces[i + 1].I.lo);
    total += p.I.length();
  }
  for (const auto& t : at.tail)
    for (const auto& p : at.pieces) CHECK_FALSE((t.lo < p.I.hi && p.I.lo < t.hi));
  CHECK(total == doctest::Approx(at.domain.length()).epsilon(1e-12));
  // Returns land in A (right-closed, at point tolerance).
  for (const auto& p : at.pieces) {
    double x = 0.5 * (p.I.lo + p.I.hi);
    double r = apply_value(at.maps, p.word, x) - at.shift;
    CHECK(r > at.domain.lo - 1e-10);
    CHECK(r <= at.domain.hi + 1e-10);
  }
  for (const auto& d : at.discontinuities)
    CHECK(std::abs(apply_value(at.maps, d.expr, at.base_points[std::size_t(d.base)]) - d.x) < 1e-10);
}

}  // namespace

TEST_CASE("closed-form thresholds") {
  CHECK(proximity_chain(0.38) == doctest::Approx(1.024).epsilon(1e-3));
  CHECK(proximity_chain(0.38) > 1.0);
  CHECK(proximity_chain(0.41) <= 1.0);
  CHECK(proximity_chain(0.5) < 1.0);
  CHECK(periodic_chain(0.30) == doctest::Approx(1.02).epsilon(1e-3));
  CHECK(cycle_chain(0.38) == doctest::Approx(1.012).epsilon(1e-3));
  CHECK(cycle_chain(0.38) > 1.0);
}

TEST_CASE("duminy condition on near-rotation and strong pairs") {
  for (const auto& m : weak_ss()) {
    auto sys = inventory(m);
    auto d = duminy_condition(sys.maps, the(sys, StarKind::ss), 0.38);
    CHECK(d.holds);
    CHECK(d.epsilon_eff < 0.38);
    CHECK(d.factor == doctest::Approx((1 - d.epsilon_eff) / d.epsilon_eff * std::exp(-d.v)));
    CHECK(d.margin > 0.0);
  }
  auto sys = inventory(strong_ss()[0]);
  auto d = duminy_condition(sys.maps, the(sys, StarKind::ss), 0.38);
  CHECK_FALSE(d.holds);
  CHECK_FALSE(d.witness.empty());
  // Requested epsilon below the measured |Df0 - 1|.
  auto w = inventory(weak_ss()[2]);
  CHECK_FALSE(duminy_condition(w.maps, the(w, StarKind::ss), 0.025).holds);
}

TEST_CASE("local atlas replays the first return of F") {
  std::mt19937_64 rng(12);
  for (const auto& m : strong_ss()) {
    auto sys = inventory(m);
    auto k = the(sys, StarKind::ss);
    auto at = build_local_return_map(sys.maps, k, 12);
    check_partition(at);
    CHECK(at.tail_mass < 1e-6);
    const double u = at.domain.lo, w = at.domain.hi;
    CHECK(u == doctest::Approx(at.maps.f1.lift(at.chart.a)));
    int resolved = 0;
    for (int i = 0; i < 10000; ++i) {
      double x = unif(rng, u, w);
      if (x == u) continue;
      auto want = f_walk(at.maps, u, w, x);
      auto got = return_jet(at, x);
      if (!got) continue;
      ++resolved;
      CHECK(std::abs(got->value - want.y) < 1e-9);
      const Piece* p = locate(at, x);
      CHECK(p->index[0] == want.m);
      CHECK(p->index[1] == want.n);
      auto ext = extended_return(at, x);
      REQUIRE(ext.has_value());
      CHECK(std::abs(*ext - want.y) < 1e-9);
    }
    CHECK(resolved > 9990);
    // Discontinuities: d = f1^m f0^{n-1} f1(a) with (m, n) the piece of d.
    for (const auto& d : at.discontinuities) {
      const Piece* p = locate(at, d.x);
      REQUIRE(p);
      Word e;
      push(e, {1, 1});
      if (p->index[1] > 1) push(e, {0, p->index[1] - 1});
      push(e, {1, p->index[0]});
      CHECK(std::abs(apply_value(at.maps, e, at.chart.a) - d.x) < 1e-10);
      // R(d) is the right end of A, up to rounding of d magnified by DR.
      auto rj = return_jet(at, d.x);
      CHECK(std::abs(rj->value - w) < 1e-9 + 1e-15 * rj->d1);
    }
  }
}

TEST_CASE("extension of the return map to the whole interval") {
  auto sys = inventory(strong_ss()[1]);
  auto at = build_local_return_map(sys.maps, the(sys, StarKind::ss), 12);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    double x = unif(rng, at.chart.a + 1e-3, at.chart.b - 1e-3);
    double y = x;
    while (!at.domain.contains(y)) y = auxiliary_map(at, y);
    auto want = f_walk(at.maps, at.domain.lo, at.domain.hi, y);
    auto got = extended_return(at, x);
    REQUIRE(got.has_value());
    CHECK(std::abs(*got - want.y) < 1e-9);
  }
  CHECK_FALSE(extended_return(at, at.chart.b + 0.01).has_value());
}

TEST_CASE("single fundamental piece when f1^2(a) leaves A") {
  auto sys = inventory(weak_ss()[0]);
  auto at = build_local_return_map(sys.maps, the(sys, StarKind::ss), 40);
  CHECK(at.maps.f1.lift(at.domain.lo) > at.domain.hi);
  CHECK(at.ell == 0);
  for (const auto& p : at.pieces) CHECK(p.index[0] == 1);
  check_partition(at);
}

TEST_CASE("depth refines without moving emitted pieces") {
  auto sys = inventory(strong_ss()[3]);
  auto k = the(sys, StarKind::ss);
  auto a8 = build_local_return_map(sys.maps, k, 8);
  auto a12 = build_local_return_map(sys.maps, k, 12);
  CHECK(a12.tail_mass < a8.tail_mass);
  for (const auto& p : a8.pieces) {
    const Piece* q = locate(a12, p.I.hi);
    REQUIRE(q);
    CHECK(q->I.lo == p.I.lo);
    CHECK(q->I.hi == p.I.hi);
    CHECK(q->word == p.word);
  }
}

TEST_CASE("overlap condition") {
  auto m = strong_ss()[0];
  auto sys = inventory(m);
  StarInterval k = the(sys, StarKind::ss);
  k.b = k.a + 0.05;  // f1(a) lies beyond this b
  CHECK_THROWS_AS(build_local_return_map(sys.maps, k, 4), OverlapEmpty);
}

TEST_CASE("derivative estimate on local pieces") {
  std::mt19937_64 rng(31);
  auto all = strong_ss();
  for (const auto& m : weak_ss()) all.push_back(m);
  for (const auto& m : all) {
    auto sys = inventory(m);
    auto at = build_local_return_map(sys.maps, the(sys, StarKind::ss), 400);
    REQUIRE_FALSE(at.pieces.empty());
    for (int i = 0; i < 1000; ++i) {
      const Piece& p = at.pieces[rng() % at.pieces.size()];
      double x = unif(rng, p.I.lo, p.I.hi), y = unif(rng, p.I.lo, p.I.hi);
      if (x > y) std::swap(x, y);
      if (x == y) continue;
      auto r = derivative_ratio_bound(at, x, y);
      CHECK(r.measured >= r.analytic - 1e-6);
      // Direct imaging of the end points.
      double direct = (apply_value(at.maps, p.word, y) - apply_value(at.maps, p.word, x)) / (y - x);
      if (!r.extended) CHECK(r.measured == doctest::Approx(direct));
    }
    const Piece& p = at.pieces.back();
    double y = p.I.hi, x = std::nextafter(y, 0.0);
    auto thin = derivative_ratio_bound(at, x, y);
    CHECK(thin.extended);
    CHECK(thin.measured == doctest::Approx(apply(at.maps, p.word, y).d1).epsilon(1e-6));
  }
}

TEST_CASE("expansion certificate") {
  CHECK(expansion_power(1.02, 0.5, 1.1) == 40);
  CHECK_THROWS_AS(expansion_power(0.99, 0.5, 1.1), BoundNotExceeded);
  for (const auto& m : weak_ss()) {
    auto sys = inventory(m);
    for (StarKind kind : {StarKind::ss, StarKind::uu}) {
      auto k = the(sys, kind);
      auto at = build_local_return_map(sys.maps, k, 40);
      CHECK(at.chart.how.invert == (kind == StarKind::uu));
      if (!at.hypothesis_holds) continue;
      auto ec = expansion_certificate(at, 1.1);
      CHECK(ec.N >= 1);
      CHECK(std::pow(ec.factor, ec.N) * ec.c_f0 > ec.kappa);
      if (ec.N > 1) CHECK(std::pow(ec.factor, ec.N - 1) * ec.c_f0 <= ec.kappa);
      CHECK(ec.lambda == doctest::Approx(std::pow(ec.factor, ec.N) * ec.c_f0));
      CHECK(ec.measured_min > 1.0);
      CHECK(ec.samples == 1000);
    }
  }
  auto sys = inventory(strong_ss()[0]);
  auto at = build_local_return_map(sys.maps, the(sys, StarKind::ss), 12);
  CHECK_THROWS_AS(expansion_certificate(at, 1.1), HypothesisFailure);
}

TEST_CASE("global atlas on a cycle of length 4") {
  for (auto m : {cycle_pair(2, 0.7, 0.08, 0.04), cycle_pair(2, 0.02, 0.08, 0.04)}) {
    auto sys = reduce(m);
    auto c = find_cycle(sys);
    REQUIRE(c.has_value());
    REQUIRE(c->length == 4);
    auto at = build_global_return_map(*c, sys, 6);
    CHECK(at.global);
    check_partition(at);
    const auto& s = at.cycle.attractors;
    // Word shape f_{n-1}^{-m} ... f_0^{-m}, one letter per stage.
    for (const auto& p : at.pieces) {
      REQUIRE(p.word.size() == 4);
      for (int k = 0; k < 4; ++k) {
        CHECK(p.word[std::size_t(k)].map == c->parities[std::size_t(k)]);
        CHECK(p.word[std::size_t(k)].exp < 0);
      }
      // i_n > 0: the branch maps the piece onto the whole fundamental domain.
      auto lo = apply(at.maps, p.word, p.I.lo), hi = apply(at.maps, p.word, p.I.hi);
      // Rounding in the piece endpoints is magnified by the branch.
      if (p.index.back() > 0) {
        CHECK(std::abs(lo.value - s[4]) < 1e-9 * std::max(1.0, lo.d1));
        CHECK(std::abs(hi.value - at.maps.f1.lift_inverse(s[4])) < 1e-9 * std::max(1.0, hi.d1));
      } else {
        CHECK(lo.value > s[4] - 1e-9 * std::max(1.0, lo.d1));
        CHECK(hi.value <= at.maps.f1.lift_inverse(s[4]) + 1e-9 * std::max(1.0, hi.d1));
      }
    }
    std::mt19937_64 rng(4);
    int resolved = 0;
    for (int i = 0; i < 10000; ++i) {
      // Half uniform in A, half inside random pieces (thin near the tail).
      const Piece& q = at.pieces[rng() % at.pieces.size()];
      double x = i % 2 ? unif(rng, at.domain.lo, at.domain.hi) : unif(rng, q.I.lo, q.I.hi);
      auto got = return_jet(at, x);
      if (!got) continue;
      ++resolved;
      auto [y, ex] = stage_walk(at, x);
      CHECK(std::abs(got->value - y) < 1e-9);
      const Piece* p = locate(at, x);
      for (int k = 0; k < 4; ++k) CHECK(-p->word[std::size_t(k)].exp == ex[std::size_t(k)]);
      auto rw = return_word(at, x);
      REQUIRE(rw.has_value());
      CHECK(*rw == p->word);
    }
    CHECK(resolved >= 5000);
    // Two-by-two and full estimates on random sub-intervals.
    for (int i = 0; i < 1000; ++i) {
      const Piece& p = at.pieces[rng() % at.pieces.size()];
      double x = unif(rng, p.I.lo, p.I.hi), y = unif(rng, p.I.lo, p.I.hi);
      if (x > y) std::swap(x, y);
      if (x == y) continue;
      for (int j = 0; j + 2 <= 4; j += 2) {
        auto r = two_by_two_bound(at, x, y, j);
        CHECK(r.measured >= r.analytic - 1e-6);
      }
      auto r = derivative_ratio_bound(at, x, y);
      CHECK(r.measured >= r.analytic - 1e-6);
    }
  }
}

TEST_CASE("global expansion along a cycle") {
  auto sys = reduce(cycle_pair(2, 0.02, 0.08, 0.04));
  auto c = find_cycle(sys);
  REQUIRE(c.has_value());
  auto at = build_global_return_map(*c, sys, 6);
  REQUIRE(at.hypothesis_holds);
  auto ec = expansion_certificate(at, 1.1);
  CHECK(ec.cycle_length == 4);
  CHECK(ec.lambda > 1.1);
  CHECK(ec.measured_min > 1.0);
}

TEST_CASE("global refinement and budget") {
  auto sys = reduce(cycle_pair(1, 0.7, 0.2, 0.1));
  auto c = find_cycle(sys);
  REQUIRE(c.has_value());
  auto a3 = build_global_return_map(*c, sys, 3);
  auto a5 = build_global_return_map(*c, sys, 5);
  CHECK(a5.tail_mass < a3.tail_mass);
  for (const auto& p : a3.pieces) {
    const Piece* q = locate(a5, p.I.hi);
    REQUIRE(q);
    CHECK(q->I.lo == p.I.lo);
    CHECK(q->word == p.word);
  }
  auto small = build_global_return_map(*c, sys, 12, 50);
  CHECK(small.pieces.size() <= 50);
  check_partition(small);
}

TEST_CASE("wrong chart breaks the stage order") {
  auto sys = reduce(cycle_pair(2, 0.7, 0.08, 0.04));
  auto c = find_cycle(sys);
  REQUIRE(c.has_value());
  Cycle bad = *c;
  std::swap(bad.attractors[1], bad.attractors[3]);
  CHECK_THROWS_AS(build_global_return_map(bad, sys, 4), NumericalError);
}

TEST_CASE("a cycle closing on an ss-interval gives the local atlas") {
  MapPair m{pr(0, 0.7, 1, 0), pr(0, 0.7, 1, 0.3)};
  auto sys = reduce(m);
  auto c = find_cycle(sys);
  REQUIRE(c.has_value());
  REQUIRE(c->winding == 0);
  auto g = build_global_return_map(*c, sys, 12);
  auto l = build_local_return_map(sys.maps, the(sys, StarKind::ss), 12);
  REQUIRE(g.pieces.size() == l.pieces.size());
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    CHECK(g.pieces[i].I.lo == doctest::Approx(l.pieces[i].I.lo).epsilon(1e-12));
    CHECK(g.pieces[i].I.hi == doctest::Approx(l.pieces[i].I.hi).epsilon(1e-12));
    CHECK(g.pieces[i].word == l.pieces[i].word);
  }
}
