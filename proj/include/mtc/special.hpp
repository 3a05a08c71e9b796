#pragma once

#include <cmath>
#include <stdexcept>

namespace mtc {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz method. Converges quickly for x < (a+1)/(a+b+2).
inline double beta_cont_frac(double a, double b, double x) {
  constexpr int max_iter = 500;
  constexpr double eps = 1e-16;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

inline double gamma_series(double a, double x) {
  constexpr int max_iter = 1000;
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < max_iter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma: series did not converge");
}

inline double gamma_cont_frac(double a, double x) {
  constexpr int max_iter = 1000;
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= max_iter; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("reg_inc_beta: a and b must be positive");
  }
  if (std::isnan(x)) throw std::domain_error("reg_inc_beta: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbt =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * detail::beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - bt * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

// Regularized lower incomplete gamma P(a, x).
inline double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("reg_lower_gamma: a must be positive");
  if (x < 0.0) throw std::domain_error("reg_lower_gamma: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_series(a, x);
  return 1.0 - detail::gamma_cont_frac(a, x);
}

// Chi-squared CDF with k degrees of freedom.
inline double chi_squared_cdf(double x, double k) {
  if (x <= 0.0) return 0.0;
  return reg_lower_gamma(0.5 * k, 0.5 * x);
}

// Chi-squared quantile by bracketed bisection; monotone, so this is robust.
inline double chi_squared_quantile(double p, double k) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("chi_squared_quantile: p must be in (0, 1)");
  }
  double lo = 0.0;
  double hi = k + 10.0;
  while (chi_squared_cdf(hi, k) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_squared_cdf(mid, k) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mtc
