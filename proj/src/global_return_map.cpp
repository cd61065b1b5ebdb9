#include <algorithm>
#include <cmath>
#include <map>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"
#include "cifs/return_maps.hpp"

namespace cifs {
namespace {

struct Node {
  Interval I;
  Word hinv;               // h^{-1}, application order
  std::vector<long> index;
  double c = 0.0;          // h^{-1}(I) = (s_k, c]
};

ReturnMapAtlas local_fallback(const Cycle& cyc, const ReducedPair& sys, int depth) {
  double x0 = cyc.attractors[0], x1 = cyc.attractors[1];
  if (cyc.mirrored) {
    x0 = -x0;
    x1 = -x1;
  }
  double lo = std::min(x0, x1), hi = std::max(x0, x1);
  auto k = classify_interval(sys, lo, hi);
  if (!k || k->kind != StarKind::ss)
    throw StageOrderViolation("cycle of winding 0 does not close on an ss-interval");
  ReturnMapAtlas at = build_local_return_map(sys.maps, *k, depth);
  at.cycle = cyc;
  return at;
}

}  // namespace

ReturnMapAtlas build_global_return_map(const Cycle& cyc, const ReducedPair& sys, int depth,
                                       long piece_budget) {
  if (depth < 1) throw InvalidArgument("build_global_return_map: depth must be positive");
  if (cyc.winding == 0) return local_fallback(cyc, sys, depth);

  ReturnMapAtlas at;
  at.global = true;
  at.cycle = cyc;
  at.maps = chart_maps(cyc, sys.maps);
  at.depth = depth;
  at.base_points = cyc.attractors;
  const auto& s = cyc.attractors;
  const int n = cyc.length;
  const double tol = sys.maps.f0.tolerances().point;
  const double w = at.maps.f1.lift_inverse(s[0]);
  at.domain = {s[0], w};
  at.shift = s[std::size_t(n)] - s[0];

  std::vector<Node> nodes{{at.domain, {}, {}, w}};
  std::map<double, Discontinuity> disc;
  for (int k = 0; k < n; ++k) {
    const int own = cyc.parities[std::size_t(k)];
    const CircleMap& f = at.maps[own];
    const double sk = s[std::size_t(k)], sn = s[std::size_t(k + 1)];
    const double ck_max = at.maps[own + 1].lift_inverse(sk);
    long per = depth;
    if (long(nodes.size()) * (depth + 1) > piece_budget)
      per = std::max(0L, piece_budget / long(nodes.size()) - 1);
    // Orbit of s_{k+1} under the owner of s_k, decreasing to s_k.
    std::vector<double> o{sn};
    std::vector<Node> next;
    for (const Node& nd : nodes) {
      if (!(nd.c > sk + tol && nd.c <= ck_max + tol))
        throw StageOrderViolation("stage " + std::to_string(k) + ": c = " + to_decimal(nd.c) +
                                  " escapes (s_k, f_{k+1}^-1(s_k)]");
      std::size_t j = 1;
      for (;; ++j) {
        while (o.size() <= j) {
          if (o.size() > 1000000) throw NonConvergence("orbit of s_{k+1} does not reach c");
          o.push_back(f.lift(o.back()));
        }
        if (o[j] < nd.c) break;
      }
      while (o.size() <= j + std::size_t(per)) o.push_back(f.lift(o.back()));
      const Word h = inverse(nd.hinv);
      std::vector<double> hs(std::size_t(per) + 1);
      for (long l = 0; l <= per; ++l) hs[std::size_t(l)] = apply_value(at.maps, h, o[j + std::size_t(l)]);
      for (long l = 0; l <= per; ++l) {
        Node ch;
        ch.I = {hs[std::size_t(l)], l == 0 ? nd.I.hi : hs[std::size_t(l - 1)]};
        ch.hinv = nd.hinv;
        push(ch.hinv, {own, -long(j + std::size_t(l))});
        ch.index = nd.index;
        ch.index.push_back(l);
        if (l == 0) {
          ch.c = nd.c;
          for (std::size_t i = 0; i < j; ++i) ch.c = f.lift_inverse(ch.c);
        } else {
          ch.c = f.lift_inverse(sn);
        }
        Word expr{{own, long(j + std::size_t(l))}};
        disc[ch.I.lo] = {ch.I.lo, k + 1, concat(expr, h)};
        if (ch.I.lo < ch.I.hi) next.push_back(std::move(ch));
      }
      // Unresolved part next to h(s_k) = I.lo.
      if (hs.back() > nd.I.lo) {
        at.tail.push_back({nd.I.lo, hs.back()});
        at.tail_mass += hs.back() - nd.I.lo;
      }
    }
    nodes = std::move(next);
  }
  const double cn_max = at.maps.f1.lift_inverse(s[std::size_t(n)]);
  for (const Node& nd : nodes) {
    if (!(nd.c <= cn_max + tol))
      throw StageOrderViolation("final stage: image leaves A_n at c = " + to_decimal(nd.c));
    Piece pc;
    pc.I = nd.I;
    pc.word = nd.hinv;
    pc.index = nd.index;
    pc.image = {apply_value(at.maps, pc.word, nd.I.lo), apply_value(at.maps, pc.word, nd.I.hi)};
    at.pieces.push_back(std::move(pc));
  }
  std::sort(at.pieces.begin(), at.pieces.end(),
            [](const Piece& x, const Piece& y) { return x.I.lo < y.I.lo; });
  std::sort(at.tail.begin(), at.tail.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const Piece& pc : at.pieces)
    if (pc.I.hi < w) {
      auto it = disc.find(pc.I.hi);
      if (it != disc.end()) at.discontinuities.push_back(it->second);
    }

  at.v0 = distortion(at.maps.f0).total_variation_log_df;
  at.v1 = distortion(at.maps.f1).total_variation_log_df;
  at.v = at.v0 + at.v1;
  at.epsilon = std::max(at.v0, at.v1);
  const double two = std::exp(-(at.v0 + at.v1)) / std::max(std::expm1(at.v1), 1e-300);
  at.factor = std::pow(two, 0.5 * n);
  at.hypothesis_holds = two > 1.0;
  return at;
}

}  // namespace cifs
