#include "cifs/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <boost/math/tools/roots.hpp>

#include "cifs/errors.hpp"
#include "cifs/fixed_points.hpp"

namespace cifs {
namespace {

Interval whole_domain(const CircleMap& f) {
  if (f.is_circle()) return {0.0, 1.0};
  auto r = f.family().scan_range();
  if (f.is_reflected()) r = {-r.second, -r.first};
  return {r.first - 8.0, r.second + 8.0};
}

// Critical point of log Df inside [a, b] where D^2 f changes sign.
double critical_point(const CircleMap& f, double a, double b, double da, double db) {
  auto H = [&](double x) { return f.jet(x).d2; };
  std::uintmax_t it = 100;
  auto tol = [](double l, double r) { return std::abs(r - l) <= 1e-14 * std::max(1.0, std::abs(l)); };
  auto [l, r] = boost::math::tools::toms748_solve(H, a, b, da, db, tol, it);
  return 0.5 * (l + r);
}

}  // namespace

DistortionEstimate distortion(const CircleMap& f, std::optional<Interval> domain) {
  DistortionEstimate est;
  est.whole_domain = !domain.has_value();
  est.domain = domain ? *domain : whole_domain(f);
  const double a = est.domain.lo, b = est.domain.hi;
  if (!(b > a)) throw InvalidArgument("distortion: empty domain");
  int per_unit = 4096 * std::max(1, std::abs(f.power()));
  int n = std::max(64, int(std::ceil((b - a) * per_unit)));
  est.grid_resolution = n;

  std::vector<double> ext_x, ext_v;
  Jet prev = f.jet(a);
  double prev_x = a;
  ext_x.push_back(a);
  ext_v.push_back(std::log(prev.d1));
  for (int i = 1; i <= n; ++i) {
    double x = a + (b - a) * i / n;
    Jet j = f.jet(x);
    if ((prev.d2 < 0 && j.d2 > 0) || (prev.d2 > 0 && j.d2 < 0)) {
      double c = critical_point(f, prev_x, x, prev.d2, j.d2);
      ext_x.push_back(c);
      ext_v.push_back(std::log(f.jet(c).d1));
    } else if (j.d2 == 0.0 && i < n) {
      ext_x.push_back(x);
      ext_v.push_back(std::log(j.d1));
    }
    prev = j;
    prev_x = x;
  }
  ext_x.push_back(b);
  ext_v.push_back(std::log(prev.d1));

  double tv = 0.0;
  for (std::size_t i = 1; i < ext_v.size(); ++i) tv += std::abs(ext_v[i] - ext_v[i - 1]);
  auto [mn, mx] = std::minmax_element(ext_v.begin(), ext_v.end());
  est.total_variation_log_df = tv;
  est.sup_log_ratio = *mx - *mn;
  return est;
}

ClosenessCertificate closeness_certificate(const CircleMap& f, double epsilon) {
  if (!(epsilon > 0)) throw InvalidArgument("closeness_certificate: epsilon must be positive");
  ClosenessCertificate c;
  c.epsilon = epsilon;
  c.measured_v = distortion(f.base_map()).total_variation_log_df;
  c.certified = c.measured_v <= epsilon;
  return c;
}

DerivativeBounds power_derivative_bounds(const CircleMap& f, int period, double slack) {
  if (period < 1) throw InvalidArgument("power_derivative_bounds: period must be positive");
  if (!f.is_circle()) throw InvalidArgument("power_derivative_bounds: circle maps only");
  DerivativeBounds out;
  out.period = period;
  out.v = distortion(f.base_map()).total_variation_log_df;
  if (out.v > 0.0) {
    FixedPointOptions opt;
    opt.strict = false;
    if (fixed_points(f, period, 0, opt).empty())
      throw InvalidArgument("power_derivative_bounds: no periodic points of period " +
                            std::to_string(period));
  }
  out.envelope_lo = std::exp(-out.v);
  out.envelope_hi = std::exp(out.v);
  const CircleMap g = f.powered(period);
  Interval dom = whole_domain(f);
  const int n = 4096;
  out.measured_lo = INFINITY;
  out.measured_hi = -INFINITY;
  for (int i = 0; i < n; ++i) {
    double d = g.derivative(dom.lo + dom.length() * i / n);
    out.measured_lo = std::min(out.measured_lo, d);
    out.measured_hi = std::max(out.measured_hi, d);
  }
  if (out.measured_lo < out.envelope_lo - slack || out.measured_hi > out.envelope_hi + slack)
    throw EnvelopeViolation("Df^" + std::to_string(period) + " range [" +
                            std::to_string(out.measured_lo) + ", " +
                            std::to_string(out.measured_hi) + "] escapes [exp(-V), exp(V)]");
  return out;
}

}  // namespace cifs
