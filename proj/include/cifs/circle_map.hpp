#pragma once

// Orientation-preserving diffeomorphisms of the circle (through their lifts)
// and of the real line. All maps are immutable after construction.

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cifs {

enum class Domain { circle, line };

enum class FamilyId {
  rotation,            // x + alpha
  perturbed_rotation,  // x + alpha + beta/(2 pi k) sin(2 pi k (x - phase))
  morse_smale,         // x + alpha + c * prod_i sin(pi (x - p_i)), even number of p_i
  spline,              // periodic monotone cubic Hermite lift through user knots
  line_morse_smale,    // x + c * P(x) / sqrt(1 + P(x)^2), P(x) = prod_i (x - p_i)
};

std::string to_string(FamilyId id);
FamilyId family_from_string(const std::string& name);

struct Tolerances {
  double point = 1e-10;
  double inversion = 1e-12;
  double classification_margin = 1e-6;
};

/// Value, first and second derivative of a map at a point.
struct Jet {
  double value;
  double d1;
  double d2;
};

/// Closed-form lift of a single generator with exact derivatives.
class MapFamily {
 public:
  virtual ~MapFamily() = default;
  virtual FamilyId id() const = 0;
  virtual Domain domain() const = 0;
  virtual Jet jet(double x) const = 0;
  /// Decimal-string parameters exactly as supplied at construction.
  virtual const std::vector<std::string>& parameters() const = 0;
  /// Region of the line that contains every fixed point (line maps only).
  virtual std::pair<double, double> scan_range() const { return {0.0, 1.0}; }
};

std::shared_ptr<const MapFamily> make_family(FamilyId id, std::vector<std::string> params);

/// A generator as used by the analyses: a power of a base family, shifted
/// by an integer translation of the lift and optionally conjugated by the
/// reflection x -> -x. Negative powers are inverses.
///
///   core(x) = base^power(x) - shift,  lift(x) = reflected ? -core(-x) : core(x)
class CircleMap {
 public:
  CircleMap() = default;
  explicit CircleMap(std::shared_ptr<const MapFamily> base, Tolerances tol = {});

  static CircleMap rotation(double alpha);
  static CircleMap perturbed_rotation(double alpha, double beta, int harmonic = 1,
                                      double phase = 0.0);
  static CircleMap morse_smale(double alpha, double amplitude, std::span<const double> points);
  static CircleMap line_morse_smale(double amplitude, std::span<const double> points);
  static CircleMap spline(std::span<const double> knots, std::span<const double> lift_values);

  double lift(double x) const;
  Jet jet(double x) const;
  double derivative(double x) const { return jet(x).d1; }

  /// Point on the circle in [0,1) (or the real value for line maps).
  double eval(double x) const;
  /// x with lift(x) = y, |lift(x) - y| <= tol; circle results reduced to [0,1).
  double invert(double y, double tol) const;
  /// x with lift(x) = y exactly in the lift (no reduction).
  double lift_inverse(double y) const;

  CircleMap inverse() const;
  CircleMap powered(int q) const;
  CircleMap shifted(long extra) const;
  CircleMap reflected() const;

  Domain domain() const;
  bool is_circle() const { return domain() == Domain::circle; }
  const MapFamily& family() const { return *base_; }
  const std::shared_ptr<const MapFamily>& family_ptr() const { return base_; }
  int power() const { return power_; }
  long shift() const { return shift_; }
  bool is_reflected() const { return reflected_; }
  const Tolerances& tolerances() const { return tol_; }
  /// The generator itself: power 1, no shift, no reflection.
  CircleMap base_map() const;
  std::string describe() const;

 private:
  Jet core_jet(double x) const;
  double base_inverse(double y) const;

  std::shared_ptr<const MapFamily> base_;
  int power_ = 1;
  long shift_ = 0;
  bool reflected_ = false;
  Tolerances tol_{};
};

/// The two generators f0, f1 of the iterated function system.
struct MapPair {
  CircleMap f0;
  CircleMap f1;

  const CircleMap& operator[](int i) const { return i % 2 == 0 ? f0 : f1; }
  MapPair inverse() const { return {f0.inverse(), f1.inverse()}; }
  MapPair reflected() const { return {f0.reflected(), f1.reflected()}; }
  MapPair swapped() const { return {f1, f0}; }
  bool is_circle() const { return f0.is_circle(); }
};

/// Reduces x to [0,1).
double wrap01(double x);
/// Shortest signed distance from a to b on the circle, in [-1/2, 1/2).
double circle_delta(double a, double b);

}  // namespace cifs
