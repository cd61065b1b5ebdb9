#include <algorithm>
#include <cmath>

#include "cifs/errors.hpp"
#include "cifs/return_maps.hpp"

namespace cifs {

const Piece* locate(const ReturnMapAtlas& at, double x) {
  auto it = std::upper_bound(at.pieces.begin(), at.pieces.end(), x,
                             [](double v, const Piece& p) { return v <= p.I.lo; });
  if (it == at.pieces.begin()) return nullptr;
  --it;
  return it->I.contains(x) ? &*it : nullptr;
}

std::optional<WordJet> return_jet(const ReturnMapAtlas& at, double x) {
  const Piece* p = locate(at, x);
  if (!p) return std::nullopt;
  WordJet j = apply(at.maps, p->word, x);
  j.value -= at.shift;
  return j;
}

std::optional<Word> return_word(const ReturnMapAtlas& at, double x, long budget) {
  if (!at.domain.contains(x)) return std::nullopt;
  Word w;
  if (!at.global) {
    const double u = at.domain.lo;
    long m = 0, n = 0;
    for (; x > u; ++m) {
      if (m > budget) return std::nullopt;
      x = at.maps.f1.lift_inverse(x);
    }
    for (; x <= u; ++n) {
      if (n > budget) return std::nullopt;
      x = at.maps.f0.lift_inverse(x);
    }
    return Word{{1, -m}, {0, -n}};
  }
  const auto& s = at.cycle.attractors;
  for (int k = 0; k < at.cycle.length; ++k) {
    const int own = at.cycle.parities[std::size_t(k)];
    long m = 0;
    do {
      if (++m > budget) return std::nullopt;
      x = at.maps[own].lift_inverse(x);
    } while (x <= s[std::size_t(k + 1)]);
    push(w, {own, -m});
  }
  return w;
}

double displacement(const ReturnMapAtlas& at, double y) { return std::abs(at.maps.f0.lift(y) - y); }

namespace {

// |W(J)| / |J| for J = [x, y]; the mean-value limit when J is too thin.
double image_ratio(const MapPair& maps, const Word& w, double x, double y, bool& extended) {
  if (y - x < 1e-14 * std::max(1.0, std::abs(y))) {
    extended = true;
    return apply(maps, w, 0.5 * (x + y)).d1;
  }
  return (apply_value(maps, w, y) - apply_value(maps, w, x)) / (y - x);
}

}  // namespace

RatioBound derivative_ratio_bound(const ReturnMapAtlas& at, double x, double y) {
  if (!(x < y)) throw InvalidArgument("derivative_ratio_bound: need x < y");
  const Piece* p = locate(at, y);
  if (!p || x < p->I.lo) throw InvalidArgument("derivative_ratio_bound: J not inside one piece");
  RatioBound r;
  r.measured = image_ratio(at.maps, p->word, x, y, r.extended);
  double ry = apply_value(at.maps, p->word, y);
  r.analytic = at.factor * displacement(at, ry) / displacement(at, y);
  return r;
}

RatioBound two_by_two_bound(const ReturnMapAtlas& at, double x, double y, int j) {
  if (!at.global) throw InvalidArgument("two_by_two_bound: global atlas only");
  if (j < 0 || j % 2 || j + 2 > at.cycle.length)
    throw InvalidArgument("two_by_two_bound: j must be even with j + 2 <= n");
  const Piece* p = locate(at, y);
  if (!p || x < p->I.lo) throw InvalidArgument("two_by_two_bound: J not inside one piece");
  Word rj(p->word.begin(), p->word.begin() + j);
  Word step(p->word.begin() + j, p->word.begin() + j + 2);
  double xj = apply_value(at.maps, rj, x), yj = apply_value(at.maps, rj, y);
  RatioBound r;
  r.measured = image_ratio(at.maps, step, xj, yj, r.extended);
  double y2 = apply_value(at.maps, step, yj);
  const double two = std::exp(-(at.v0 + at.v1)) / std::max(std::expm1(at.v1), 1e-300);
  r.analytic = two * displacement(at, y2) / displacement(at, yj);
  return r;
}

int expansion_power(double factor, double c, double kappa) {
  if (!(factor > 1.0) || !(c > 0.0))
    throw BoundNotExceeded("expansion needs factor > 1 and C(f0) > 0");
  double raw = std::log(kappa / c) / std::log(factor);
  if (raw > 1e7) throw BoundNotExceeded("expansion power beyond 10^7");
  int N = std::max(1, int(std::floor(raw)) + 1);
  while (std::pow(factor, N) * c <= kappa) ++N;
  while (N > 1 && std::pow(factor, N - 1) * c > kappa) --N;
  return N;
}

double displacement_ratio(const ReturnMapAtlas& at) {
  double lo = INFINITY, hi = 0.0;
  auto take = [&](double x) {
    double d = displacement(at, x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  };
  const int M = 8192;
  for (int i = 1; i <= M; ++i) {
    double x = at.domain.lo + at.domain.length() * i / M;
    // D vanishes at s_0, so the global ratio only sees resolved pieces.
    if (!at.global || locate(at, x)) take(x);
  }
  for (const Piece& p : at.pieces) {
    take(p.I.hi);
    take(p.I.lo);
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

ExpansionCertificate expansion_certificate(const ReturnMapAtlas& at, double kappa, long samples) {
  if (!(kappa > 1.0)) throw InvalidArgument("expansion_certificate: kappa must exceed 1");
  if (!at.hypothesis_holds)
    throw HypothesisFailure("expansion_certificate: distortion hypothesis does not hold");
  ExpansionCertificate ec;
  ec.kappa = kappa;
  ec.epsilon = at.epsilon;
  ec.v = at.v;
  ec.v0 = at.v0;
  ec.v1 = at.v1;
  ec.factor = at.factor;
  ec.cycle_length = at.global ? at.cycle.length : 2;
  ec.c_f0 = displacement_ratio(at);
  ec.N = expansion_power(at.factor, ec.c_f0, kappa);
  ec.lambda = std::pow(at.factor, ec.N) * ec.c_f0;
  if (!(ec.lambda > kappa)) throw BoundNotExceeded("analytic chain does not exceed kappa");

  double min_log = INFINITY;
  for (long i = 0; i < samples; ++i) {
    double x = at.domain.lo + at.domain.length() * (double(i) + 0.5) / double(samples);
    double lg = 0.0;
    bool ok = true;
    for (int k = 0; k < ec.N && ok; ++k) {
      auto j = return_jet(at, x);
      if (!j) {
        ++ec.tail_hits;
        auto w = return_word(at, x);
        if (!w) {
          ok = false;
          break;
        }
        j = apply(at.maps, *w, x);
        j->value -= at.shift;
      }
      lg += std::log(j->d1);
      x = j->value;
    }
    ++ec.samples;
    if (!ok) throw NonConvergence("expansion_certificate: return walk exceeded its budget");
    min_log = std::min(min_log, lg);
  }
  ec.measured_min = std::isfinite(min_log) ? std::exp(std::min(min_log, 690.0)) : 0.0;
  return ec;
}

}  // namespace cifs
