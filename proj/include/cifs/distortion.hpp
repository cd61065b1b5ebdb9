#pragma once

#include <optional>

#include "cifs/circle_map.hpp"

namespace cifs {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x > lo && x <= hi; }
};

struct DistortionEstimate {
  Interval domain;
  bool whole_domain = false;
  double sup_log_ratio = 0.0;          // max log Df - min log Df on the domain
  double total_variation_log_df = 0.0;  // V_f on the domain
  int grid_resolution = 0;
};

/// Distortion of f on a lift interval, or on one period of the circle when
/// no interval is given (the real line uses a window around the fixed points).
DistortionEstimate distortion(const CircleMap& f, std::optional<Interval> domain = std::nullopt);

struct ClosenessCertificate {
  bool certified = false;
  double measured_v = 0.0;
  double epsilon = 0.0;
};

ClosenessCertificate closeness_certificate(const CircleMap& f, double epsilon);

struct DerivativeBounds {
  int period = 1;
  double envelope_lo = 1.0, envelope_hi = 1.0;  // exp(-V), exp(V)
  double measured_lo = 1.0, measured_hi = 1.0;  // range of Df^period on a grid
  double v = 0.0;
};

/// The base generator's V_f gives the envelope; Df^period is measured on a
/// grid and must stay inside it (EnvelopeViolation otherwise).
DerivativeBounds power_derivative_bounds(const CircleMap& f, int period, double slack = 1e-9);

}  // namespace cifs
