#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mtc/rng.hpp"
#include "mtc/simplex.hpp"
#include "mtc/special.hpp"

namespace mtc {

// The five candidate inter-arrival families. Scale parameters are strictly
// positive; shapes are unconstrained reals.

struct Exponential {
  double scale;  // mean
};

// Density t^(a-1) (T-t)^(b-1) / (T^(a+b-1) B(a, b)) on [0, T].
struct Beta {
  double alpha;
  double beta;
  double window;  // T
};

struct GeneralizedPareto {
  double shape;  // theta; zero gives the exponential branch
  double scale;
};

struct Weibull {
  double shape;
  double scale;
};

struct Gev {
  double shape;  // xi; zero gives the Gumbel branch
  double location;
  double scale;
};

using DistSpec = std::variant<Exponential, Beta, GeneralizedPareto, Weibull, Gev>;

enum class Family { Exponential, Beta, GeneralizedPareto, Weibull, Gev };

inline constexpr Family kAllFamilies[] = {Family::Exponential, Family::Beta,
                                          Family::GeneralizedPareto, Family::Weibull,
                                          Family::Gev};

inline Family family_of(const DistSpec& spec) {
  return static_cast<Family>(spec.index());
}

// Display name, matching the usual fitting-report labels.
inline const char* family_label(Family f) {
  switch (f) {
    case Family::Exponential: return "Exponential";
    case Family::Beta: return "Beta";
    case Family::GeneralizedPareto: return "Gen. Pareto";
    case Family::Weibull: return "Weibull";
    case Family::Gev: return "GEV";
  }
  return "?";
}

// Stable identifier used in serialized artifacts.
inline const char* family_id(Family f) {
  switch (f) {
    case Family::Exponential: return "Exponential";
    case Family::Beta: return "Beta";
    case Family::GeneralizedPareto: return "GeneralizedPareto";
    case Family::Weibull: return "Weibull";
    case Family::Gev: return "GEV";
  }
  return "?";
}

inline Family family_from_id(const std::string& id) {
  if (id == "Exponential") return Family::Exponential;
  if (id == "Beta") return Family::Beta;
  if (id == "GeneralizedPareto") return Family::GeneralizedPareto;
  if (id == "Weibull") return Family::Weibull;
  if (id == "GEV") return Family::Gev;
  throw std::invalid_argument("unknown distribution family: " + id);
}

inline std::size_t param_count(Family f) {
  switch (f) {
    case Family::Exponential: return 1;
    case Family::Beta: return 2;  // window is pinned, not estimated
    case Family::GeneralizedPareto: return 2;
    case Family::Weibull: return 2;
    case Family::Gev: return 3;
  }
  return 0;
}

inline void validate(const DistSpec& spec) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          if (!(d.scale > 0.0)) throw std::domain_error("Exponential: scale must be positive");
        } else if constexpr (std::is_same_v<T, Beta>) {
          if (!(d.alpha > 0.0 && d.beta > 0.0)) {
            throw std::domain_error("Beta: alpha and beta must be positive");
          }
          if (!(d.window > 0.0)) throw std::domain_error("Beta: window must be positive");
        } else if constexpr (std::is_same_v<T, GeneralizedPareto>) {
          if (!(d.scale > 0.0)) throw std::domain_error("GeneralizedPareto: scale must be positive");
          if (!std::isfinite(d.shape)) throw std::domain_error("GeneralizedPareto: bad shape");
        } else if constexpr (std::is_same_v<T, Weibull>) {
          if (!(d.shape > 0.0 && d.scale > 0.0)) {
            throw std::domain_error("Weibull: shape and scale must be positive");
          }
        } else {
          if (!(d.scale > 0.0)) throw std::domain_error("GEV: scale must be positive");
          if (!std::isfinite(d.shape) || !std::isfinite(d.location)) {
            throw std::domain_error("GEV: bad shape or location");
          }
        }
      },
      spec);
}

// Closed support [lo, hi]. Density is zero outside.
inline std::pair<double, double> support(const DistSpec& spec) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return {0.0, inf};
        } else if constexpr (std::is_same_v<T, Beta>) {
          return {0.0, d.window};
        } else if constexpr (std::is_same_v<T, GeneralizedPareto>) {
          return d.shape < 0.0 ? std::pair{0.0, -d.scale / d.shape} : std::pair{0.0, inf};
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return {0.0, inf};
        } else {
          if (d.shape > 0.0) return {d.location - d.scale / d.shape, inf};
          if (d.shape < 0.0) return {-inf, d.location - d.scale / d.shape};
          return {-inf, inf};
        }
      },
      spec);
}

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_pdf_exponential(const Exponential& d, double x) {
  if (x < 0.0) return kNegInf;
  return -std::log(d.scale) - x / d.scale;
}

inline double log_pdf_beta(const Beta& d, double x) {
  if (x < 0.0 || x > d.window) return kNegInf;
  if (x == 0.0 || x == d.window) {
    // boundary: density is 0, finite, or +inf depending on the exponent sign
    const double expo = x == 0.0 ? d.alpha - 1.0 : d.beta - 1.0;
    if (expo > 0.0) return kNegInf;
    if (expo == 0.0) {
      const double other = x == 0.0 ? d.beta - 1.0 : d.alpha - 1.0;
      return other * std::log(d.window) -
             (d.alpha + d.beta - 1.0) * std::log(d.window) - log_beta(d.alpha, d.beta);
    }
    return std::numeric_limits<double>::infinity();
  }
  return (d.alpha - 1.0) * std::log(x) + (d.beta - 1.0) * std::log(d.window - x) -
         (d.alpha + d.beta - 1.0) * std::log(d.window) - log_beta(d.alpha, d.beta);
}

inline double log_pdf_gpd(const GeneralizedPareto& d, double x) {
  if (x < 0.0) return kNegInf;
  if (d.shape == 0.0) return -std::log(d.scale) - x / d.scale;
  const double z = d.shape * x / d.scale;
  if (z <= -1.0) return kNegInf;
  return -std::log(d.scale) - (1.0 + 1.0 / d.shape) * std::log1p(z);
}

inline double log_pdf_weibull(const Weibull& d, double x) {
  if (x < 0.0) return kNegInf;
  if (x == 0.0) {
    if (d.shape > 1.0) return kNegInf;
    if (d.shape == 1.0) return -std::log(d.scale);
    return std::numeric_limits<double>::infinity();
  }
  const double z = x / d.scale;
  return std::log(d.shape / d.scale) + (d.shape - 1.0) * std::log(z) -
         std::pow(z, d.shape);
}

inline double log_pdf_gev(const Gev& d, double x) {
  const double z = (x - d.location) / d.scale;
  if (d.shape == 0.0) return -std::log(d.scale) - z - std::exp(-z);
  const double a = 1.0 + d.shape * z;
  if (a <= 0.0) return kNegInf;
  const double log_a = std::log1p(d.shape * z);
  return -std::log(d.scale) - (1.0 + 1.0 / d.shape) * log_a -
         std::exp(-log_a / d.shape);
}

}  // namespace detail

inline double log_pdf(const DistSpec& spec, double x) {
  return std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) return detail::log_pdf_exponential(d, x);
        else if constexpr (std::is_same_v<T, Beta>) return detail::log_pdf_beta(d, x);
        else if constexpr (std::is_same_v<T, GeneralizedPareto>) return detail::log_pdf_gpd(d, x);
        else if constexpr (std::is_same_v<T, Weibull>) return detail::log_pdf_weibull(d, x);
        else return detail::log_pdf_gev(d, x);
      },
      spec);
}

inline double pdf(const DistSpec& spec, double x) {
  const double lp = log_pdf(spec, x);
  return std::exp(lp);
}

inline double cdf(const DistSpec& spec, double x) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          if (x <= 0.0) return 0.0;
          return -std::expm1(-x / d.scale);
        } else if constexpr (std::is_same_v<T, Beta>) {
          if (x <= 0.0) return 0.0;
          if (x >= d.window) return 1.0;
          return reg_inc_beta(d.alpha, d.beta, x / d.window);
        } else if constexpr (std::is_same_v<T, GeneralizedPareto>) {
          if (x <= 0.0) return 0.0;
          if (d.shape == 0.0) return -std::expm1(-x / d.scale);
          const double z = d.shape * x / d.scale;
          if (z <= -1.0) return 1.0;
          return -std::expm1(-std::log1p(z) / d.shape);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          if (x <= 0.0) return 0.0;
          return -std::expm1(-std::pow(x / d.scale, d.shape));
        } else {
          const double z = (x - d.location) / d.scale;
          double t;
          if (d.shape == 0.0) {
            t = std::exp(-z);
          } else {
            const double a = 1.0 + d.shape * z;
            if (a <= 0.0) return d.shape > 0.0 ? 0.0 : 1.0;
            t = std::exp(-std::log1p(d.shape * z) / d.shape);
          }
          return std::exp(-t);
        }
      },
      spec);
}

namespace detail {

// Safeguarded Newton inversion for families without a closed-form quantile.
template <class CdfFn, class PdfFn>
double invert_cdf(CdfFn&& F, PdfFn&& f, double p, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double Fx = F(x);
    if (std::fabs(Fx - p) < 1e-13) return x;
    if (Fx > p) hi = x; else lo = x;
    const double dens = f(x);
    double next = dens > 0.0 ? x - (Fx - p) / dens : x;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // fall back to bisection
    if (std::fabs(next - x) < 1e-15 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

inline double quantile(const DistSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must be in (0, 1)");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return -d.scale * std::log1p(-p);
        } else if constexpr (std::is_same_v<T, Beta>) {
          DistSpec s = d;
          return detail::invert_cdf([&](double x) { return cdf(s, x); },
                                    [&](double x) { return pdf(s, x); }, p, 0.0, d.window);
        } else if constexpr (std::is_same_v<T, GeneralizedPareto>) {
          if (d.shape == 0.0) return -d.scale * std::log1p(-p);
          return d.scale / d.shape * std::expm1(-d.shape * std::log1p(-p));
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return d.scale * std::pow(-std::log1p(-p), 1.0 / d.shape);
        } else {
          if (d.shape == 0.0) return d.location - d.scale * std::log(-std::log(p));
          return d.location +
                 d.scale / d.shape * std::expm1(-d.shape * std::log(-std::log(p)));
        }
      },
      spec);
}

// i.i.d. draws by inverse transform; identical seeds give identical output.
inline std::vector<double> sample(const DistSpec& spec, std::size_t n, Rng& rng) {
  if (n < 1) throw std::domain_error("sample: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(spec, rng.uniform_pos()));
  return out;
}

struct FitResult {
  DistSpec spec;
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t support_violations = 0;
};

namespace detail {

struct SampleMoments {
  double mean = 0.0;
  double var = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline SampleMoments moments(const std::vector<double>& xs) {
  SampleMoments m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.var = ss / static_cast<double>(xs.size());
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  m.min = *lo;
  m.max = *hi;
  return m;
}

inline double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Method-of-moments starting points, clamped into sane regions so the
// simplex starts from a finite likelihood whenever possible.
inline std::vector<double> init_params(Family fam, const SampleMoments& m,
                                       const std::vector<double>& xs) {
  switch (fam) {
    case Family::Exponential:
      return {m.mean};
    case Family::Beta: {
      const double window = m.max * (1.0 + 1e-6);
      const double u = m.mean / window;
      const double v = m.var / (window * window);
      double common = v > 0.0 ? u * (1.0 - u) / v - 1.0 : 1.0;
      common = clamp(common, 1e-2, 1e6);
      const double a = clamp(u * common, 1e-3, 1e6);
      const double b = clamp((1.0 - u) * common, 1e-3, 1e6);
      return {std::log(a), std::log(b)};
    }
    case Family::GeneralizedPareto: {
      double shape = m.var > 0.0 ? 0.5 * (1.0 - m.mean * m.mean / m.var) : 0.0;
      shape = clamp(shape, -0.9, 0.45);
      double scale = m.mean * (1.0 - shape);
      if (!(scale > 0.0)) scale = m.mean > 0.0 ? m.mean : 1.0;
      // a negative starting shape must keep the whole sample inside [0, -scale/shape]
      if (shape < 0.0 && m.max * (-shape) >= scale) shape = 0.0;
      return {shape, std::log(scale)};
    }
    case Family::Weibull: {
      double sum = 0.0, sum2 = 0.0;
      std::size_t n = 0;
      for (double x : xs) {
        if (x > 0.0) {
          const double l = std::log(x);
          sum += l;
          sum2 += l * l;
          ++n;
        }
      }
      if (n < 2) return {0.0, std::log(std::max(m.mean, 1e-12))};
      const double lmean = sum / static_cast<double>(n);
      const double lvar = std::max(sum2 / static_cast<double>(n) - lmean * lmean, 1e-12);
      const double shape = clamp(std::numbers::pi / std::sqrt(6.0 * lvar), 0.05, 50.0);
      const double scale = std::exp(lmean + 0.5772156649015329 / shape);
      return {std::log(shape), std::log(scale)};
    }
    case Family::Gev: {
      const double sd = std::sqrt(std::max(m.var, 1e-24));
      const double scale = sd * std::sqrt(6.0) / std::numbers::pi;
      const double location = m.mean - 0.5772156649015329 * scale;
      return {0.1, location, std::log(scale)};
    }
  }
  throw std::logic_error("init_params: unreachable");
}

inline DistSpec spec_from_params(Family fam, const std::vector<double>& p, double window) {
  switch (fam) {
    case Family::Exponential: return Exponential{p[0]};
    case Family::Beta: return Beta{std::exp(p[0]), std::exp(p[1]), window};
    case Family::GeneralizedPareto: return GeneralizedPareto{p[0], std::exp(p[1])};
    case Family::Weibull: return Weibull{std::exp(p[0]), std::exp(p[1])};
    case Family::Gev: return Gev{p[0], p[1], std::exp(p[2])};
  }
  throw std::logic_error("spec_from_params: unreachable");
}

}  // namespace detail

inline double log_likelihood(const DistSpec& spec, const std::vector<double>& xs) {
  double ll = 0.0;
  for (double x : xs) ll += log_pdf(spec, x);
  return ll;
}

// Maximum-likelihood fit by Nelder-Mead from a method-of-moments start.
// Points outside a candidate support yield a -inf log-likelihood, which the
// simplex treats as a rejected vertex. The Beta window is pinned slightly
// above the sample maximum rather than estimated.
inline FitResult fit_mle(Family fam, const std::vector<double>& xs) {
  if (xs.size() < 10) throw std::domain_error("fit_mle: need at least 10 samples");
  const auto m = detail::moments(xs);
  const double window = m.max * (1.0 + 1e-6);

  FitResult result;
  if (m.var == 0.0) {
    // degenerate sample: report the moments guess, flagged as not converged
    result.spec = detail::spec_from_params(fam, detail::init_params(fam, m, xs), window);
    result.log_likelihood = log_likelihood(result.spec, xs);
    result.converged = false;
    return result;
  }

  if (fam == Family::Exponential) {
    // closed-form MLE; a simplex would only wander inside the fp noise floor
    result.spec = Exponential{m.mean};
    result.log_likelihood = log_likelihood(result.spec, xs);
    result.converged = true;
    for (double x : xs) {
      if (x < 0.0) ++result.support_violations;
    }
    return result;
  }

  auto objective = [&](const std::vector<double>& p) {
    DistSpec s = detail::spec_from_params(fam, p, window);
    double neg_ll = 0.0;
    for (double x : xs) {
      const double lp = log_pdf(s, x);
      if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
      neg_ll -= lp;
    }
    return neg_ll;
  };

  const auto start = detail::init_params(fam, m, xs);
  const auto opt = nelder_mead(objective, start, 1e-8, 10000);

  result.spec = detail::spec_from_params(fam, opt.x, window);
  result.log_likelihood = log_likelihood(result.spec, xs);
  result.converged = opt.converged && std::isfinite(result.log_likelihood);
  result.iterations = opt.iterations;
  const auto [lo, hi] = support(result.spec);
  for (double x : xs) {
    if (x < lo || x > hi) ++result.support_violations;
  }
  return result;
}

}  // namespace mtc
