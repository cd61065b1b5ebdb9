#include <algorithm>
#include <array>
#include <cmath>

#include "cifs/errors.hpp"
#include "cifs/limit_sets.hpp"
#include "parallel.hpp"

namespace cifs {
namespace {

bool basin_holds(const Basin& b, const Interval& J) {
  for (double t : {0.0, 0.25, 0.75, 1.0}) {
    double x = J.lo + t * J.length();
    double d = b.circle ? circle_delta(x, b.attractor.location) : x - b.attractor.location;
    if (std::abs(d) < 1e-15) continue;
    if (!b.contains(x)) return false;
  }
  return true;
}

// Root of P(x) - k - x in J by safeguarded Newton; the sign changes across J.
double fixed_point(const MapPair& maps, const Word& w, long k, Interval J) {
  double lo = J.lo, hi = J.hi;
  const bool falling = apply_value(maps, w, lo) - double(k) - lo > 0.0;
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const WordJet j = apply(maps, w, x);
    const double f = j.value - double(k) - x;
    if (f == 0.0) return x;
    ((f > 0.0) == falling ? lo : hi) = x;
    double nx = x - f / (j.d1 - 1.0);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-16 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
  }
  return x;
}

// Range of |DP| over a grid of J.
std::pair<double, double> derivative_range(const MapPair& maps, const Word& w, Interval J, int grid) {
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double d = std::abs(apply(maps, w, J.lo + J.length() * i / grid).d1);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

}  // namespace

WitnessSearch::WitnessSearch(const MapPair& maps, bool inverse, std::uint64_t seed,
                             long walk_budget)
    : maps_(maps), walk_(inverse ? maps.inverse() : maps), inverse_(inverse), seed_(seed),
      walk_budget_(walk_budget) {
  ReducedPair sys = inventory(walk_);
  for (int i = 0; i < 2; ++i)
    for (const auto& r : sys.fixed[std::size_t(i)]) {
      if (r.stability != Stability::attracting) continue;
      if (auto b = basin_of(r, sys.fixed[std::size_t(i)], walk_.is_circle())) {
        basins_.push_back(*b);
        owners_.push_back(i);
      }
    }
}

std::optional<PeriodicWitness> WitnessSearch::find(Interval J, std::uint64_t stream) const {
  // A witness in any part of J will do.
  std::vector<Interval> todo{J};
  for (int depth = 0; depth < 4; ++depth) {
    std::vector<Interval> halves;
    for (const Interval& I : todo) {
      if (auto w = attempt(I, stream)) return w;
      const double m = 0.5 * (I.lo + I.hi);
      halves.push_back({I.lo, m});
      halves.push_back({m, I.hi});
    }
    todo = std::move(halves);
  }
  return std::nullopt;
}

// Searched in the walk direction as h o g^l. A Phi^-1 word u is checked through
// P = u^-1, a positive word: u(J) inside J with |Du| < 1 iff P(J) covers J with
// |DP| > 1, and P only needs forward evaluations.
std::optional<PeriodicWitness> WitnessSearch::attempt(Interval J, std::uint64_t stream) const {
  const bool circle = maps_.is_circle();
  const Interval core{J.lo + 0.25 * J.length(), J.hi - 0.25 * J.length()};
  auto in_core = [&](double x) {
    double y = circle ? core.lo + wrap01(x - core.lo) : x;
    return y > core.lo && y < core.hi;
  };
  // Attractors inside J first (no transport word), then the strongest contractions.
  std::vector<std::size_t> order(basins_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const bool ii = in_core(basins_[i].attractor.location), jj = in_core(basins_[j].attractor.location);
    if (ii != jj) return ii;
    return std::abs(basins_[i].attractor.derivative) < std::abs(basins_[j].attractor.derivative);
  });
  for (std::size_t c : order) {
    const Basin& b = basins_[c];
    if (!basin_holds(b, J)) continue;
    const int own = owners_[c];
    const double s = b.attractor.location;
    Word h;  // walk letters, negative powers for Phi^-1
    if (!in_core(s)) {
      WordSampler ws(seed_, stream * 64 + c, WordStrategy::uniform);
      double x = s;
      bool hit = false;
      for (long t = 0; t < walk_budget_ && !hit; ++t) {
        const int i = ws.next();
        x = walk_[i].lift(x);
        if (circle) x = wrap01(x);
        push(h, {i, inverse_ ? -1L : 1L});
        hit = in_core(x);
      }
      if (!hit) continue;
    }
    // P = post o g^l o pre: forward uses (id, h), inverse uses (h^-1, id).
    const CircleMap& g = maps_[own];
    const Word hinv = inverse(h);
    const Word& pre = inverse_ ? hinv : Word{};
    const Word& post = inverse_ ? Word{} : h;
    constexpr int G = 8;
    std::array<double, G + 1> t{}, logd{};
    for (int j = 0; j <= G; ++j) {
      const WordJet pj = apply(maps_, pre, J.lo + J.length() * j / G);
      t[std::size_t(j)] = pj.value;
      logd[std::size_t(j)] = std::log(pj.d1);
    }
    for (long ell = 1; ell <= (1L << 16); ++ell) {
      for (std::size_t j = 0; j <= G; ++j) {
        const Jet gj = g.jet(t[j]);
        t[j] = gj.value;
        logd[j] += std::log(gj.d1);
      }
      if (ell & (ell - 1)) continue;  // check at powers of two
      const double pl = apply_value(maps_, post, t[0]), ph = apply_value(maps_, post, t[G]);
      const long k = circle ? long(std::lround(0.5 * (pl + ph) - 0.5 * (J.lo + J.hi))) : 0;
      const bool fits = inverse_ ? (pl - double(k) < J.lo && ph - double(k) > J.hi)
                                 : (pl - double(k) > J.lo && ph - double(k) < J.hi);
      if (!fits) continue;
      double dlo = INFINITY, dhi = 0.0;
      for (std::size_t j = 0; j <= G; ++j) {
        const double d = std::exp(logd[j]) * apply(maps_, post, t[j]).d1;
        dlo = std::min(dlo, d);
        dhi = std::max(dhi, d);
      }
      const double contraction = inverse_ ? 1.0 / dlo : dhi;
      if (!(contraction < 1.0)) continue;
      Word p = pre;
      push(p, {own, ell});
      p = concat(p, post);
      PeriodicWitness pw;
      pw.J = J;
      pw.inverse = inverse_;
      pw.contraction = contraction;
      pw.point = fixed_point(maps_, p, k, J);
      if (circle) pw.point = wrap01(pw.point);
      // Stored in the original generators; P(x) = x + k at the point, so u(x) = x - k.
      pw.word = inverse_ ? inverse(p) : p;
      pw.translation = inverse_ ? -k : k;
      return pw;
    }
  }
  return std::nullopt;
}

std::vector<std::optional<PeriodicWitness>> WitnessSearch::per_bin(double delta) const {
  const long nb = long(std::ceil(1.0 / delta - 1e-9));
  std::vector<std::optional<PeriodicWitness>> out(static_cast<std::size_t>(nb));
  detail::parallel_for(out.size(), [&](std::size_t b) {
    out[b] = find({double(b) * delta, std::min(1.0, double(b + 1) * delta)}, b);
  });
  return out;
}

bool verify_witness(const MapPair& maps, const PeriodicWitness& w, int grid) {
  if (w.inverse) {
    const Word p = inverse(w.word);
    const double lo = apply_value(maps, p, w.J.lo) + double(w.translation);
    const double hi = apply_value(maps, p, w.J.hi) + double(w.translation);
    if (!(lo <= w.J.lo && hi >= w.J.hi)) return false;
    return derivative_range(maps, p, w.J, grid).first > 1.0;
  }
  const double lo = apply_value(maps, w.word, w.J.lo) - double(w.translation);
  const double hi = apply_value(maps, w.word, w.J.hi) - double(w.translation);
  if (!(lo >= w.J.lo && hi <= w.J.hi)) return false;
  return derivative_range(maps, w.word, w.J, grid).second < 1.0;
}

}  // namespace cifs
