#include <algorithm>
#include <cmath>
#include <numbers>

#include "cifs/circle_map.hpp"
#include "cifs/decimal.hpp"
#include "cifs/errors.hpp"

namespace cifs {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> parse_all(const std::vector<std::string>& p) {
  std::vector<double> v;
  v.reserve(p.size());
  for (const auto& s : p) v.push_back(parse_decimal(s));
  return v;
}

class FamilyBase : public MapFamily {
 public:
  explicit FamilyBase(std::vector<std::string> p) : params_(std::move(p)) {}
  const std::vector<std::string>& parameters() const override { return params_; }

 protected:
  // Reject parameters that do not give a diffeomorphism.
  void check_positive(double lo, double hi, int samples) const {
    for (int i = 0; i <= samples; ++i) {
      double x = lo + (hi - lo) * i / samples;
      double d = jet(x).d1;
      if (!(d > 0.0) || !std::isfinite(d))
        throw InvalidMap(to_string(id()) + ": derivative not positive at x = " + to_decimal(x));
    }
  }

  std::vector<std::string> params_;
};

class Rotation final : public FamilyBase {
 public:
  explicit Rotation(std::vector<std::string> p) : FamilyBase(std::move(p)) {
    if (params_.size() != 1) throw InvalidMap("rotation takes [alpha]");
    alpha_ = parse_decimal(params_[0]);
  }
  FamilyId id() const override { return FamilyId::rotation; }
  Domain domain() const override { return Domain::circle; }
  Jet jet(double x) const override { return {x + alpha_, 1.0, 0.0}; }

 private:
  double alpha_;
};

class PerturbedRotation final : public FamilyBase {
 public:
  explicit PerturbedRotation(std::vector<std::string> p) : FamilyBase(std::move(p)) {
    if (params_.size() < 2 || params_.size() > 4)
      throw InvalidMap("perturbed_rotation takes [alpha, beta, harmonic?, phase?]");
    auto v = parse_all(params_);
    alpha_ = v[0];
    beta_ = v[1];
    k_ = v.size() > 2 ? v[2] : 1.0;
    phase_ = v.size() > 3 ? v[3] : 0.0;
    if (k_ < 1 || k_ != std::floor(k_)) throw InvalidMap("harmonic must be a positive integer");
    if (std::abs(beta_) >= 1.0) throw InvalidMap("|beta| must be < 1");
  }
  FamilyId id() const override { return FamilyId::perturbed_rotation; }
  Domain domain() const override { return Domain::circle; }
  Jet jet(double x) const override {
    double w = 2 * kPi * k_;
    double t = w * (x - phase_);
    double s = std::sin(t), c = std::cos(t);
    return {x + alpha_ + beta_ / w * s, 1.0 + beta_ * c, -beta_ * w * s};
  }

 private:
  double alpha_, beta_, k_, phase_;
};

// x + alpha + c * prod sin(pi (x - p_i)); an even number of points keeps the
// product 1-periodic.
class MorseSmale final : public FamilyBase {
 public:
  explicit MorseSmale(std::vector<std::string> p) : FamilyBase(std::move(p)) {
    if (params_.size() < 4 || params_.size() % 2 != 0)
      throw InvalidMap("morse_smale takes [alpha, c, p_1..p_2m] with m >= 1");
    auto v = parse_all(params_);
    alpha_ = v[0];
    c_ = v[1];
    pts_.assign(v.begin() + 2, v.end());
    check_positive(0.0, 1.0, 4096);
  }
  FamilyId id() const override { return FamilyId::morse_smale; }
  Domain domain() const override { return Domain::circle; }
  Jet jet(double x) const override {
    // Product rule one factor at a time; derivatives are in units of pi.
    double P = 1.0, P1 = 0.0, P2 = 0.0;
    for (double q : pts_) {
      const double t = kPi * (x - q), s = std::sin(t), c = std::cos(t);
      P2 = P2 * s + 2.0 * P1 * c - P * s;
      P1 = P1 * s + P * c;
      P *= s;
    }
    P1 *= kPi;
    P2 *= kPi * kPi;
    return {x + alpha_ + c_ * P, 1.0 + c_ * P1, c_ * P2};
  }

 private:
  double alpha_, c_;
  std::vector<double> pts_;
};

// Fritsch-Carlson monotone cubic Hermite through (x_i, y_i), extended to a
// degree-one lift by F(x + 1) = F(x) + 1.
class Spline final : public FamilyBase {
 public:
  explicit Spline(std::vector<std::string> p) : FamilyBase(std::move(p)) {
    if (params_.size() < 4 || params_.size() % 2 != 0)
      throw InvalidMap("spline takes [x_0, y_0, x_1, y_1, ...] with >= 2 knots");
    auto v = parse_all(params_);
    for (std::size_t i = 0; i < v.size(); i += 2) {
      xs_.push_back(v[i]);
      ys_.push_back(v[i + 1]);
    }
    std::size_t n = xs_.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(xs_[i] < xs_[i + 1]) || !(ys_[i] < ys_[i + 1]))
        throw InvalidMap("spline knots must be strictly increasing");
    if (!(xs_.back() < xs_[0] + 1.0) || !(ys_.back() < ys_[0] + 1.0))
      throw InvalidMap("spline knots must span less than one period");
    // Close the period.
    xs_.push_back(xs_[0] + 1.0);
    ys_.push_back(ys_[0] + 1.0);
    n = xs_.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      delta[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    m_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double dl = delta[i == 0 ? n - 2 : i - 1];
      double dr = delta[i == n - 1 ? 0 : i];
      m_[i] = 2.0 / (1.0 / dl + 1.0 / dr);  // harmonic mean keeps monotonicity
    }
    m_[n - 1] = m_[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
      double r = a * a + b * b;
      if (r > 9.0) {
        double t = 3.0 / std::sqrt(r);
        m_[i] = t * a * delta[i];
        m_[i + 1] = t * b * delta[i];
      }
    }
    m_[0] = std::min(m_[0], m_[n - 1]);
    m_[n - 1] = m_[0];
    check_positive(xs_[0], xs_[0] + 1.0, 4096);
  }
  FamilyId id() const override { return FamilyId::spline; }
  Domain domain() const override { return Domain::circle; }
  Jet jet(double x) const override {
    double k = std::floor(x - xs_[0]);
    double u = x - k;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
    std::size_t i = std::clamp<std::size_t>(it - xs_.begin(), 1, xs_.size() - 1) - 1;
    double h = xs_[i + 1] - xs_[i];
    double t = (u - xs_[i]) / h;
    double y0 = ys_[i], y1 = ys_[i + 1], m0 = m_[i] * h, m1 = m_[i + 1] * h;
    double t2 = t * t, t3 = t2 * t;
    double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
               (t3 - t2) * m1;
    double d = (6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
               (3 * t2 - 2 * t) * m1;
    double dd = (12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1;
    return {v + k, d / h, dd / (h * h)};
  }

 private:
  std::vector<double> xs_, ys_, m_;
};

// Line diffeomorphism with fixed points exactly at p_i:
// x + c * P / sqrt(1 + P^2), P = prod (x - p_i).
class LineMorseSmale final : public FamilyBase {
 public:
  explicit LineMorseSmale(std::vector<std::string> p) : FamilyBase(std::move(p)) {
    if (params_.size() < 2) throw InvalidMap("line_morse_smale takes [c, p_1..p_m]");
    auto v = parse_all(params_);
    c_ = v[0];
    pts_.assign(v.begin() + 1, v.end());
    std::sort(pts_.begin(), pts_.end());
    auto [lo, hi] = scan_range();
    check_positive(lo - 4.0, hi + 4.0, 16384);
  }
  FamilyId id() const override { return FamilyId::line_morse_smale; }
  Domain domain() const override { return Domain::line; }
  std::pair<double, double> scan_range() const override {
    return {pts_.front() - 1.0, pts_.back() + 1.0};
  }
  Jet jet(double x) const override {
    const std::size_t n = pts_.size();
    double P = 1.0, P1 = 0.0, P2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) P *= x - pts_[i];
    for (std::size_t i = 0; i < n; ++i) {
      double r = 1.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) r *= x - pts_[k];
      P1 += r;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double r2 = 1.0;
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && k != j) r2 *= x - pts_[k];
        P2 += r2;
      }
    }
    double q = 1.0 + P * P;
    double g = P / std::sqrt(q);
    double g1 = 1.0 / (q * std::sqrt(q));
    double g2 = -3.0 * P / (q * q * std::sqrt(q));
    return {x + c_ * g, 1.0 + c_ * g1 * P1, c_ * (g1 * P2 + g2 * P1 * P1)};
  }

 private:
  double c_;
  std::vector<double> pts_;
};

}  // namespace

std::string to_string(FamilyId id) {
  switch (id) {
    case FamilyId::rotation: return "rotation";
    case FamilyId::perturbed_rotation: return "perturbed_rotation";
    case FamilyId::morse_smale: return "morse_smale";
    case FamilyId::spline: return "spline";
    case FamilyId::line_morse_smale: return "line_morse_smale";
  }
  return "unknown";
}

FamilyId family_from_string(const std::string& name) {
  for (auto id : {FamilyId::rotation, FamilyId::perturbed_rotation, FamilyId::morse_smale,
                  FamilyId::spline, FamilyId::line_morse_smale})
    if (to_string(id) == name) return id;
  throw InvalidArgument("unknown map family '" + name + "'");
}

std::shared_ptr<const MapFamily> make_family(FamilyId id, std::vector<std::string> params) {
  switch (id) {
    case FamilyId::rotation: return std::make_shared<Rotation>(std::move(params));
    case FamilyId::perturbed_rotation:
      return std::make_shared<PerturbedRotation>(std::move(params));
    case FamilyId::morse_smale: return std::make_shared<MorseSmale>(std::move(params));
    case FamilyId::spline: return std::make_shared<Spline>(std::move(params));
    case FamilyId::line_morse_smale: return std::make_shared<LineMorseSmale>(std::move(params));
  }
  throw InvalidArgument("unknown map family");
}

}  // namespace cifs
