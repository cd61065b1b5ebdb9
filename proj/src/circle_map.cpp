#include "cifs/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"

namespace cifs {
namespace {

constexpr int kMaxBracket = 200;
constexpr int kMaxBisect = 400;
constexpr int kMaxNewton = 60;

std::vector<std::string> decimals(std::initializer_list<double> v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(to_decimal(x));
  return out;
}

// Solves F(x) = y for an increasing F: expanding bracket, bisection to
// width 10 * tol, then Newton polish kept inside the bracket.
template <class Fn>
double solve_increasing(const Fn& F, double y, double guess, double tol) {
  double lo = guess - 1.0, hi = guess + 1.0;
  double step = 1.0;
  int it = 0;
  while (F(lo).value > y) {
    lo -= (step *= 2.0);
    if (++it > kMaxBracket) throw NonConvergence("inverse: no lower bracket");
  }
  step = 1.0;
  it = 0;
  while (F(hi).value < y) {
    hi += (step *= 2.0);
    if (++it > kMaxBracket) throw NonConvergence("inverse: no upper bracket");
  }
  it = 0;
  while (hi - lo > 10.0 * tol) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (F(mid).value < y)
      lo = mid;
    else
      hi = mid;
    if (++it > kMaxBisect) throw NonConvergence("inverse: bisection budget exhausted");
  }
  double x = 0.5 * (lo + hi);
  for (int k = 0; k < kMaxNewton; ++k) {
    Jet j = F(x);
    double r = j.value - y;
    if (r == 0.0) return x;
    double nx = x - r / j.d1;
    nx = std::clamp(nx, lo, hi);
    if (r < 0)
      lo = x;
    else
      hi = x;
    if (std::abs(nx - x) <= 4e-16 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
  }
  if (std::abs(F(x).value - y) > tol) throw NonConvergence("inverse: Newton budget exhausted");
  return x;
}

// Safeguarded Newton for the inner loops: falls back to bisection whenever a
// step leaves the bracket collected so far.
template <class Fn>
double solve_fast(const Fn& F, double y, double x) {
  double lo = -INFINITY, hi = INFINITY;
  for (int k = 0; k < 200; ++k) {
    Jet j = F(x);
    double r = j.value - y;
    if (r == 0.0) return x;
    if (r < 0)
      lo = x;
    else
      hi = x;
    double nx = x - r / j.d1;
    if (!(nx > lo && nx < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi))
        nx = 0.5 * (lo + hi);
      else
        nx = r < 0 ? x + 2.0 * std::abs(r) + 1.0 : x - 2.0 * std::abs(r) - 1.0;
    }
    if (std::abs(nx - x) <= 2e-16 * std::max(1.0, std::abs(x))) return nx;
    if (std::isfinite(lo) && std::isfinite(hi) && std::nextafter(lo, hi) >= hi) return x;
    x = nx;
  }
  throw NonConvergence("inverse: iteration budget exhausted at y = " + to_decimal(y));
}

}  // namespace

double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double circle_delta(double a, double b) {
  double d = wrap01(b - a);
  return d >= 0.5 ? d - 1.0 : d;
}

CircleMap::CircleMap(std::shared_ptr<const MapFamily> base, Tolerances tol)
    : base_(std::move(base)), tol_(tol) {
  if (!base_) throw InvalidMap("null map family");
}

CircleMap CircleMap::rotation(double alpha) {
  return CircleMap(make_family(FamilyId::rotation, decimals({alpha})));
}

CircleMap CircleMap::perturbed_rotation(double alpha, double beta, int harmonic, double phase) {
  return CircleMap(make_family(FamilyId::perturbed_rotation,
                               decimals({alpha, beta, double(harmonic), phase})));
}

CircleMap CircleMap::morse_smale(double alpha, double amplitude, std::span<const double> points) {
  std::vector<std::string> p = decimals({alpha, amplitude});
  for (double x : points) p.push_back(to_decimal(x));
  return CircleMap(make_family(FamilyId::morse_smale, std::move(p)));
}

CircleMap CircleMap::line_morse_smale(double amplitude, std::span<const double> points) {
  std::vector<std::string> p = decimals({amplitude});
  for (double x : points) p.push_back(to_decimal(x));
  return CircleMap(make_family(FamilyId::line_morse_smale, std::move(p)));
}

CircleMap CircleMap::spline(std::span<const double> knots, std::span<const double> lift_values) {
  if (knots.size() != lift_values.size()) throw InvalidMap("spline: size mismatch");
  std::vector<std::string> p;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    p.push_back(to_decimal(knots[i]));
    p.push_back(to_decimal(lift_values[i]));
  }
  return CircleMap(make_family(FamilyId::spline, std::move(p)));
}

Domain CircleMap::domain() const { return base_->domain(); }

double CircleMap::base_inverse(double y) const {
  // Degree-one lifts move points by a bounded amount, so y is a good guess.
  return solve_fast([this](double x) { return base_->jet(x); }, y, y);
}

Jet CircleMap::core_jet(double x) const {
  Jet j{x, 1.0, 0.0};
  if (power_ >= 0) {
    for (int i = 0; i < power_; ++i) {
      Jet f = base_->jet(j.value);
      j = {f.value, f.d1 * j.d1, f.d2 * j.d1 * j.d1 + f.d1 * j.d2};
    }
  } else {
    for (int i = 0; i < -power_; ++i) {
      double y = base_inverse(j.value);
      Jet f = base_->jet(y);
      double g1 = 1.0 / f.d1;
      double g2 = -f.d2 * g1 * g1 * g1;
      j = {y, g1 * j.d1, g2 * j.d1 * j.d1 + g1 * j.d2};
    }
  }
  j.value -= double(shift_);
  return j;
}

Jet CircleMap::jet(double x) const {
  if (!reflected_) return core_jet(x);
  Jet j = core_jet(-x);
  return {-j.value, j.d1, -j.d2};
}

double CircleMap::lift(double x) const { return jet(x).value; }

double CircleMap::eval(double x) const {
  double v = lift(x);
  return is_circle() ? wrap01(v) : v;
}

double CircleMap::lift_inverse(double y) const { return inverse().lift(y); }

double CircleMap::invert(double y, double tol) const {
  if (!(tol > 0)) throw InvalidArgument("invert: tol must be positive");
  double x = solve_increasing([this](double t) { return jet(t); }, y, lift_inverse(y), tol);
  return is_circle() ? wrap01(x) : x;
}

CircleMap CircleMap::inverse() const {
  CircleMap m = *this;
  m.power_ = -power_;
  m.shift_ = -shift_;
  return m;
}

CircleMap CircleMap::powered(int q) const {
  CircleMap m = *this;
  m.power_ = power_ * q;
  m.shift_ = shift_ * q;
  return m;
}

CircleMap CircleMap::shifted(long extra) const {
  CircleMap m = *this;
  m.shift_ += reflected_ ? -extra : extra;
  return m;
}

CircleMap CircleMap::reflected() const {
  CircleMap m = *this;
  m.reflected_ = !reflected_;
  return m;
}

CircleMap CircleMap::base_map() const {
  CircleMap m = *this;
  m.power_ = 1;
  m.shift_ = 0;
  m.reflected_ = false;
  return m;
}

std::string CircleMap::describe() const {
  std::string s = to_string(base_->id()) + "(";
  const auto& p = base_->parameters();
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + p[i];
  s += ")";
  if (power_ != 1) s += "^" + std::to_string(power_);
  if (shift_ != 0) s += " - " + std::to_string(shift_);
  if (reflected_) s = "R o " + s + " o R";
  return s;
}

}  // namespace cifs
