#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mtc/quadrature.hpp"
#include "mtc/rng.hpp"

namespace mtc {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point2D a, Point2D b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Homogeneous planar Poisson field on a disk centered at the origin.
struct PoissonField {
  double density = 0.0;        // points per square meter
  double region_radius = 0.0;  // meters

  void validate() const {
    if (!(density > 0.0)) throw std::domain_error("PoissonField: density must be positive");
    if (!(region_radius > 0.0)) {
      throw std::domain_error("PoissonField: region_radius must be positive");
    }
  }

  double mean_count() const {
    return density * std::numbers::pi * region_radius * region_radius;
  }
};

// Non-increasing map from event distance to activation probability.
class InfluenceFunction {
 public:
  enum class Kind { HardDisk, ExponentialDecay, GaussianDecay };

  static InfluenceFunction hard_disk(double radius) { return {Kind::HardDisk, radius}; }
  static InfluenceFunction exponential_decay(double scale) {
    return {Kind::ExponentialDecay, scale};
  }
  static InfluenceFunction gaussian_decay(double scale) {
    return {Kind::GaussianDecay, scale};
  }

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }

  double operator()(double d) const {
    if (!(d >= 0.0)) throw std::domain_error("influence: distance must be non-negative");
    switch (kind_) {
      case Kind::HardDisk:
        return d <= scale_ ? 1.0 : 0.0;
      case Kind::ExponentialDecay:
        return std::exp(-d / scale_);
      case Kind::GaussianDecay:
        return std::exp(-0.5 * (d / scale_) * (d / scale_));
    }
    return 0.0;
  }

  // Closed forms of int_0^inf p(d) dd.
  double integral_linear() const {
    switch (kind_) {
      case Kind::HardDisk:
        return scale_;
      case Kind::ExponentialDecay:
        return scale_;
      case Kind::GaussianDecay:
        return scale_ * std::sqrt(std::numbers::pi / 2.0);
    }
    return 0.0;
  }

  // Closed forms of int_0^inf 2 pi d p(d) dd.
  double integral_radial() const {
    switch (kind_) {
      case Kind::HardDisk:
        return std::numbers::pi * scale_ * scale_;
      case Kind::ExponentialDecay:
        return 2.0 * std::numbers::pi * scale_ * scale_;
      case Kind::GaussianDecay:
        return 2.0 * std::numbers::pi * scale_ * scale_;
    }
    return 0.0;
  }

 private:
  InfluenceFunction(Kind kind, double scale) : kind_(kind), scale_(scale) {
    if (!(scale > 0.0)) throw std::domain_error("InfluenceFunction: scale must be positive");
  }

  Kind kind_;
  double scale_;
};

inline double influence(const InfluenceFunction& f, double d) { return f(d); }

// Normalization convention for the activation integral. LinearAsWritten
// integrates p(d) dd with a 2 pi prefactor; RadialCorrected integrates the
// usual polar area element 2 pi d p(d) dd.
enum class AreaElement { LinearAsWritten, RadialCorrected };

// P_A = 1 - exp(-2 pi lambda_T int p(d) dd)        (LinearAsWritten)
// P_A = 1 - exp(-lambda_T int 2 pi d p(d) dd)      (RadialCorrected)
inline double activation_probability(double lambda_t, const InfluenceFunction& f,
                                     AreaElement elem = AreaElement::LinearAsWritten) {
  if (!(lambda_t > 0.0)) {
    throw std::domain_error("activation_probability: lambda_t must be positive");
  }
  const double exponent = elem == AreaElement::LinearAsWritten
                              ? 2.0 * std::numbers::pi * lambda_t * f.integral_linear()
                              : lambda_t * f.integral_radial();
  return -std::expm1(-exponent);
}

// Same quantity with the influence integral evaluated by adaptive quadrature
// instead of the closed form. The hard disk integrand is split at its
// discontinuity so the quadrature converges.
inline double activation_probability_quadrature(
    double lambda_t, const InfluenceFunction& f,
    AreaElement elem = AreaElement::LinearAsWritten, double rel_tol = 1e-9) {
  if (!(lambda_t > 0.0)) {
    throw std::domain_error("activation_probability: lambda_t must be positive");
  }
  auto integrand = [&](double d) {
    const double p = f(d);
    return elem == AreaElement::LinearAsWritten ? p : 2.0 * std::numbers::pi * d * p;
  };
  double integral;
  if (f.kind() == InfluenceFunction::Kind::HardDisk) {
    integral = integrate(integrand, 0.0, f.scale(), rel_tol);
  } else {
    integral = integrate(integrand, 0.0, f.scale(), rel_tol) +
               integrate_upper_inf(integrand, f.scale(), rel_tol);
  }
  if (!std::isfinite(integral)) {
    throw std::runtime_error("activation_probability: influence integral did not converge");
  }
  const double prefactor =
      elem == AreaElement::LinearAsWritten ? 2.0 * std::numbers::pi * lambda_t : lambda_t;
  return -std::expm1(-prefactor * integral);
}

// Poisson number of points, i.i.d. uniform on the disk. The count is drawn
// by accumulating unit-exponential gaps, which stays stable for large means.
inline std::vector<Point2D> sample_ppp(const PoissonField& field, Rng& rng) {
  field.validate();
  const double mean = field.mean_count();
  std::uint64_t count = 0;
  for (double acc = -std::log1p(-rng.uniform_pos()); acc <= mean;
       acc += -std::log1p(-rng.uniform_pos())) {
    ++count;
  }
  std::vector<Point2D> points;
  points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double r = field.region_radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    points.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  return points;
}

}  // namespace mtc
