#include "cifs/cycle_finder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"

namespace cifs {
namespace {

struct Node {
  FixedPointRecord rec;
  Basin basin;
};

std::vector<Node> attractors_of(const ReducedPair& sys, int i) {
  std::vector<Node> out;
  for (const auto& r : sys.fixed[i])
    if (auto b = basin_of(r, sys.fixed[i], sys.maps.is_circle())) out.push_back({r, *b});
  return out;
}

// Lift of location x lying in the basin of the node, nearest to its attractor.
double lift_into(const Basin& b, double x) {
  const double s = b.attractor.location;
  double best = NAN;
  for (int j = -2; j <= 2; ++j) {
    double y = x + j;
    bool in = (b.left && y > b.lo && y < s) || (b.right && y > s && y < b.hi);
    if (in && (std::isnan(best) || std::abs(y - s) < std::abs(best - s))) best = y;
  }
  return best;
}

}  // namespace

bool precedes(const FixedPointRecord& si, const FixedPointRecord& sj, const ReducedPair& sys) {
  auto b = basin_of(sj, sys.fixed[sj.map_tag], sys.maps.is_circle());
  return b && b->contains(si.location);
}

std::optional<Cycle> find_cycle(const ReducedPair& sys) {
  if (!sys.has_fixed_points[0] || !sys.has_fixed_points[1]) return std::nullopt;
  if (!sys.maps.is_circle()) throw InvalidArgument("find_cycle: circle maps only");
  std::vector<Node> att[2] = {attractors_of(sys, 0), attractors_of(sys, 1)};
  // Every fixed point of one map must sit in a basin of the other.
  for (int i = 0; i < 2; ++i)
    for (const auto& r : sys.fixed[i]) {
      bool covered = std::any_of(att[1 - i].begin(), att[1 - i].end(),
                                 [&](const Node& n) { return n.basin.contains(r.location); });
      if (!covered)
        throw NoCoveringBasins("fixed point " + to_decimal(r.location) + " of f" +
                               std::to_string(i) + " lies in no basin of f" +
                               std::to_string(1 - i));
    }
  if (att[0].empty() || att[1].empty())
    throw NoCoveringBasins("a generator has fixed points but no attractor");

  auto succ = [&](int map, std::size_t idx) -> std::size_t {
    double x = att[map][idx].rec.location;
    for (std::size_t j = 0; j < att[1 - map].size(); ++j)
      if (att[1 - map][j].basin.contains(x)) return j;
    throw NoCoveringBasins("attractor " + to_decimal(x) + " lies in no basin");
  };

  // Walk x_0 -> x_1 with x_0 in B(x_1) until a node repeats.
  std::vector<std::pair<int, std::size_t>> walk{{0, 0}};
  std::map<std::pair<int, std::size_t>, std::size_t> seen{{{0, 0}, 0}};
  std::size_t start = 0;
  for (;;) {
    auto [m, i] = walk.back();
    std::pair<int, std::size_t> nxt{1 - m, succ(m, i)};
    if (auto it = seen.find(nxt); it != seen.end()) {
      start = it->second;
      break;
    }
    seen[nxt] = walk.size();
    walk.push_back(nxt);
  }
  std::vector<std::pair<int, std::size_t>> loop(walk.begin() + long(start), walk.end());
  // The order of the cycle is s_{k+1} in B(s_k): reverse the walk.
  std::reverse(loop.begin(), loop.end());
  // s_0: lowest f0 attractor of the loop.
  std::size_t first = 0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    if (loop[k].first != 0) continue;
    if (loop[first].first != 0 ||
        att[0][loop[k].second].rec.location < att[0][loop[first].second].rec.location)
      first = k;
  }
  std::rotate(loop.begin(), loop.begin() + long(first), loop.end());

  Cycle c;
  c.length = int(loop.size());
  double s = att[0][loop[0].second].rec.location;
  c.attractors.push_back(s);
  c.parities.push_back(0);
  for (int k = 1; k <= c.length; ++k) {
    auto [pm, pi] = loop[std::size_t(k - 1)];
    auto [m, i] = loop[std::size_t(k % c.length)];
    // Re-anchor the previous basin at the current lift.
    Basin b = att[pm][pi].basin;
    double shift = c.attractors.back() - b.attractor.location;
    b.attractor.location += shift;
    b.lo += shift;
    b.hi += shift;
    double y = lift_into(b, att[m][i].rec.location);
    if (std::isnan(y)) throw NumericalError("cycle lift failed");
    c.attractors.push_back(y);
    c.parities.push_back(m);
  }
  c.winding = int(std::lround(c.attractors.back() - c.attractors.front()));
  if (c.winding < 0) {
    // Other combinatorial case: work in the reflected chart.
    c.mirrored = true;
    c.winding = -c.winding;
    for (double& x : c.attractors) x = -x;
    double off = std::floor(c.attractors.front());
    for (double& x : c.attractors) x -= off;
  }
  return c;
}

std::optional<Cycle> find_cycle(const CircleMap& f0, const CircleMap& f1) {
  return find_cycle(reduce({f0, f1}));
}

MapPair chart_maps(const Cycle& c, const MapPair& maps) {
  return c.mirrored ? maps.reflected() : maps;
}

std::vector<OrderCheck> verify_cycle_order(const Cycle& c, const ReducedPair& sys) {
  const MapPair m = chart_maps(c, sys.maps);
  const double tol = sys.maps.f0.tolerances().point;
  // Right neighbour of s_k among the fixed points of its own map, in the chart.
  auto s_plus = [&](int map, double s) {
    double best = INFINITY;
    for (const auto& r : sys.fixed[map]) {
      double x = c.mirrored ? -r.location : r.location;
      double y = s + wrap01(x - s);
      if (y <= s + tol) y += 1.0;
      best = std::min(best, y);
    }
    return best;
  };
  std::vector<OrderCheck> out;
  for (int k = 0; k < c.length; ++k) {
    OrderCheck oc;
    oc.k = k;
    oc.s_k = c.attractors[std::size_t(k)];
    oc.s_next = c.attractors[std::size_t(k + 1)];
    oc.preimage = m[(k + 1) % 2].lift_inverse(oc.s_k);
    oc.s_plus = s_plus(c.parities[std::size_t(k)], oc.s_k);
    double g1 = oc.preimage - oc.s_k, g2 = oc.s_next - oc.preimage, g3 = oc.s_plus - oc.s_next;
    if (!(g1 > tol)) throw OrderViolation(k, "s_k < f_{k+1}^-1(s_k)");
    if (!(g2 > tol)) throw OrderViolation(k, "f_{k+1}^-1(s_k) < s_{k+1}");
    if (!(g3 > tol)) throw OrderViolation(k, "s_{k+1} < s_k^+");
    oc.margin = std::min({g1, g2, g3});
    out.push_back(oc);
  }
  return out;
}

}  // namespace cifs
