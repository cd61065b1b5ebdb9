#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "cifs/errors.hpp"
#include "cifs/limit_sets.hpp"
#include "parallel.hpp"

namespace cifs {

int worker_count() {
  int n = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("CIRCLE_IFS_THREADS")) {
    int c = std::atoi(cap);
    if (c > 0) n = std::min(n, c);
  }
  return n;
}

std::string to_string(WordStrategy s) {
  switch (s) {
    case WordStrategy::mixed: return "mixed";
    case WordStrategy::uniform: return "uniform";
    case WordStrategy::greedy: return "greedy";
    case WordStrategy::replay: return "replay";
  }
  return "?";
}

ReplayLibrary replay_library(const ReturnMapAtlas& at, std::size_t max_words) {
  ReplayLibrary lib;
  const bool swap = !at.global && at.chart.how.swap;
  lib.inverse = !at.global && at.chart.how.invert;
  const std::size_t n = at.pieces.size();
  const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(1, max_words));
  for (std::size_t i = 0; i < n; i += stride) {
    Word w;
    for (Letter l : inverse(at.pieces[i].word)) push(w, {swap ? 1 - l.map : l.map, l.exp});
    lib.words.push_back(std::move(w));
  }
  return lib;
}

WordSampler::WordSampler(std::uint64_t seed, std::uint64_t stream, WordStrategy s,
                         const std::vector<Word>* library, int max_run_log2)
    : rng_(detail::stream_seed(seed, stream)), strategy_(s), library_(library),
      max_run_log2_(max_run_log2) {}

int WordSampler::next() {
  if (pending_.empty()) refill();
  int i = pending_.back();
  pending_.pop_back();
  return i;
}

void WordSampler::refill() {
  WordStrategy s = strategy_;
  if (s == WordStrategy::mixed) {
    const auto r = rng_() % 4;
    s = r < 2 ? WordStrategy::uniform : r == 2 ? WordStrategy::greedy : WordStrategy::replay;
  }
  if (s == WordStrategy::replay && (!library_ || library_->empty())) s = WordStrategy::greedy;
  std::vector<int> seg;
  switch (s) {
    case WordStrategy::uniform:
      for (int k = 0; k < 16; ++k) seg.push_back(int(rng_() >> 63));
      break;
    case WordStrategy::greedy: {
      // Log-uniform run length in [1, 2^max_run_log2]: slow attractors need long runs.
      const int g = int(rng_() >> 63);
      const double u = double(rng_() >> 11) * 0x1.0p-53;
      seg.assign(std::size_t(std::exp2(max_run_log2_ * u)), g);
      break;
    }
    default: {
      const Word& w = (*library_)[rng_() % library_->size()];
      for (Letter l : w)
        for (long k = 0; k < std::min(l.exp, 4096L) && seg.size() < 65536; ++k) seg.push_back(l.map);
      if (seg.empty()) seg.push_back(int(rng_() >> 63));
    }
  }
  pending_.assign(seg.rbegin(), seg.rend());
}

long BinSet::bin_of(double x) const {
  if (!circle) return long(std::floor(x / delta));
  const long nb = long(std::ceil(1.0 / delta - 1e-9));
  return std::min(nb - 1, long(std::floor(wrap01(x) / delta)));
}

bool BinSet::has(long b) const { return std::binary_search(bins.begin(), bins.end(), b); }

std::vector<Interval> BinSet::clusters() const {
  std::vector<Interval> out;
  for (std::size_t i = 0; i < bins.size();) {
    std::size_t j = i;
    while (j + 1 < bins.size() && bins[j + 1] == bins[j] + 1) ++j;
    out.push_back({bins[i] * delta, (bins[j] + 1) * delta});
    i = j + 1;
  }
  if (circle && out.size() > 1 && out.front().lo <= 0.0 && out.back().hi >= 1.0 - 1e-12) {
    out.front().lo = out.back().lo - 1.0;
    out.pop_back();
  }
  return out;
}

bool BinSet::within(const BinSet& other, long slack) const {
  if (other.bins.empty()) return bins.empty();
  const long nb = long(std::ceil(1.0 / delta - 1e-9));
  for (long b : bins) {
    bool hit = false;
    for (long d = -slack; d <= slack && !hit; ++d) {
      long c = b + d;
      if (circle) c = ((c % nb) + nb) % nb;
      hit = other.has(c);
    }
    if (!hit) return false;
  }
  return true;
}

BinSet make_bins(const std::vector<double>& pts, double delta, bool circle) {
  BinSet s;
  s.delta = delta;
  s.circle = circle;
  std::vector<long> all;
  all.reserve(pts.size());
  for (double x : pts) all.push_back(s.bin_of(x));
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    s.bins.push_back(all[i]);
    s.counts.push_back(long(j - i));
    i = j;
  }
  return s;
}

OmegaApprox omega_limit(double x, const MapPair& maps, const OmegaOptions& opt) {
  if (opt.budget < 10000) throw InvalidArgument("omega_limit: budget must be at least 10^4");
  if (opt.seeds < 1 || !(opt.delta > 0.0)) throw InvalidArgument("omega_limit: bad options");
  const bool circle = maps.is_circle();
  const long T = opt.budget / opt.seeds;
  // On the line an orbit past every fixed point, where both maps push outwards,
  // can only go to infinity.
  double out_hi = INFINITY, out_lo = -INFINITY;
  if (!circle) {
    const ReducedPair inv = inventory(maps);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& side : inv.fixed)
      for (const auto& r : side) {
        lo = std::min(lo, r.location);
        hi = std::max(hi, r.location);
      }
    if (!std::isfinite(hi)) lo = hi = 0.0;
    const bool up = maps.f0.lift(hi + 1.0) > hi + 1.0 && maps.f1.lift(hi + 1.0) > hi + 1.0;
    const bool down = maps.f0.lift(lo - 1.0) < lo - 1.0 && maps.f1.lift(lo - 1.0) < lo - 1.0;
    if (up && std::isfinite(hi)) out_hi = hi;
    if (down && std::isfinite(lo)) out_lo = lo;
  }
  struct Run {
    std::vector<double> pts;
    int escaped = 0;
    long steps = 0;
  };
  std::vector<Run> runs(static_cast<std::size_t>(opt.seeds));
  detail::parallel_for(runs.size(), [&](std::size_t s) {
    WordSampler ws(opt.seed, s, opt.strategy, opt.library);
    Run& r = runs[s];
    double y = x;
    for (long t = 0; t < T; ++t) {
      y = maps[ws.next()].lift(y);
      ++r.steps;
      if (circle) {
        y = wrap01(y);
      } else if (std::abs(y) > opt.escape || y > out_hi || y < out_lo) {
        r.escaped = y > out_hi || y > opt.escape ? 1 : -1;
        return;
      }
      if (t >= T / 2) r.pts.push_back(y);
    }
  });
  OmegaApprox out;
  out.seed = opt.seed;
  std::vector<double> all;
  for (const Run& r : runs) {
    out.steps += r.steps;
    out.plus_infinity = out.plus_infinity || r.escaped > 0;
    out.minus_infinity = out.minus_infinity || r.escaped < 0;
    all.insert(all.end(), r.pts.begin(), r.pts.end());
  }
  out.recorded = long(all.size());
  out.cells = make_bins(all, opt.delta, circle);
  for (long b : out.cells.bins) out.points.push_back((double(b) + 0.5) * opt.delta);
  return out;
}

CoverageStats orbit_coverage(const MapPair& maps, double delta, int seeds, long budget,
                             std::uint64_t seed, BinSet* hist) {
  const long nb = long(std::ceil(1.0 / delta - 1e-9));
  struct Run {
    long hit = 0, steps = 0, full_at = 0;
  };
  std::vector<Run> runs(static_cast<std::size_t>(seeds));
  std::vector<long> counts(hist ? std::size_t(nb) : 0, 0);
  BinSet grid;
  grid.delta = delta;
  detail::parallel_for(runs.size(), [&](std::size_t s) {
    WordSampler ws(seed, s);
    std::vector<char> seen(std::size_t(nb), 0);
    Run& r = runs[s];
    double y = double(ws.rng()() >> 11) * 0x1.0p-53;
    const bool full_run = hist && s == 0;
    for (long t = 0; t < budget; ++t) {
      y = wrap01(maps[ws.next()].lift(y));
      ++r.steps;
      const long b = grid.bin_of(y);
      if (full_run) ++counts[std::size_t(b)];
      if (!seen[std::size_t(b)]) {
        seen[std::size_t(b)] = 1;
        if (++r.hit == nb) {
          r.full_at = t + 1;
          if (!full_run) break;
        }
      }
    }
  });
  CoverageStats st;
  st.seeds = seeds;
  st.min_coverage = 1.0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const double cov = double(runs[s].hit) / double(nb);
    st.min_coverage = std::min(st.min_coverage, cov);
    if (runs[s].hit == nb) {
      ++st.seeds_full;
      st.max_steps = std::max(st.max_steps, runs[s].full_at);
    }
  }
  if (hist) {
    hist->delta = delta;
    hist->circle = true;
    hist->bins.clear();
    hist->counts.clear();
    for (long b = 0; b < nb; ++b)
      if (counts[std::size_t(b)]) {
        hist->bins.push_back(b);
        hist->counts.push_back(counts[std::size_t(b)]);
      }
  }
  return st;
}

namespace {

bool inside(const Interval& I, double x, bool circle) {
  if (!circle) return I.contains(x);
  if (I.length() >= 1.0) return true;
  const double y = I.lo + wrap01(x - I.lo);
  return y > I.lo && y <= I.hi;
}

}  // namespace

Word reach_interval(double x, Interval I, const MapPair& maps, long budget, std::uint64_t seed,
                    bool inverse) {
  const bool circle = maps.is_circle();
  Word w;
  if (inside(I, x, circle)) return w;
  const MapPair m = inverse ? maps.inverse() : maps;
  WordSampler ws(seed, 0);
  for (long t = 0; t < budget; ++t) {
    const int i = ws.next();
    x = m[i].lift(x);
    if (circle) x = wrap01(x);
    push(w, {i, inverse ? -1L : 1L});
    if (inside(I, x, circle)) return w;
  }
  throw BudgetExhausted("reach_interval: no word within " + std::to_string(budget) + " steps");
}

}  // namespace cifs
