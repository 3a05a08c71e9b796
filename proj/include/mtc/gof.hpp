#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtc/distributions.hpp"
#include "mtc/special.hpp"

namespace mtc {

namespace detail {

inline void require_sorted(const std::vector<double>& xs, const char* who) {
  if (xs.empty()) throw std::domain_error(std::string(who) + ": empty sample");
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument(std::string(who) + ": sample must be sorted");
  }
}

}  // namespace detail

// Kolmogorov-Smirnov D: largest deviation between the empirical CDF steps
// and the model CDF, checked on both sides of each step.
template <class CdfFn>
double ks_statistic(const std::vector<double>& sorted_sample, CdfFn&& model_cdf) {
  detail::require_sorted(sorted_sample, "ks_statistic");
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double f = model_cdf(sorted_sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

inline double ks_statistic(const std::vector<double>& sorted_sample, const DistSpec& spec) {
  return ks_statistic(sorted_sample, [&](double x) { return cdf(spec, x); });
}

// Asymptotic one-sample critical value; D above this rejects at level alpha.
inline double ks_critical_value(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// Two-sample sup distance between empirical CDFs by merge scan.
inline double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  detail::require_sorted(a, "ks_two_sample");
  detail::require_sorted(b, "ks_two_sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  // once one sample is exhausted the remaining deviations only shrink
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Anderson-Darling A^2. Model CDF values are clamped away from 0 and 1 so
// out-of-support points cannot produce log(0).
template <class CdfFn>
double ad_statistic(const std::vector<double>& sorted_sample, CdfFn&& model_cdf) {
  detail::require_sorted(sorted_sample, "ad_statistic");
  const std::size_t n = sorted_sample.size();
  const double dn = static_cast<double>(n);
  auto clamped = [&](double x) {
    return std::min(std::max(model_cdf(x), 1e-15), 1.0 - 1e-15);
  };
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sum += (2.0 * static_cast<double>(i) - 1.0) *
           (std::log(clamped(sorted_sample[i - 1])) +
            std::log1p(-clamped(sorted_sample[n - i])));
  }
  return -dn - sum / dn;
}

inline double ad_statistic(const std::vector<double>& sorted_sample, const DistSpec& spec) {
  return ad_statistic(sorted_sample, [&](double x) { return cdf(spec, x); });
}

// Pearson statistic from paired observed/expected counts.
inline double chi_squared_statistic(const std::vector<double>& observed,
                                    const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::domain_error("chi_squared_statistic: mismatched bin counts");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw std::domain_error("chi_squared_statistic: expected <= 0");
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

struct ChiSquaredResult {
  double statistic = 0.0;
  long dof = 0;
  bool pass = false;
  bool conclusive = true;  // false when merging leaves dof < 1
};

// Equal-probability binning under the candidate model with ceil(2 n^0.4)
// bins, adjacent bins merged until every expected count is at least 5.
// Degrees of freedom are reduced by the number of fitted parameters.
inline ChiSquaredResult chi_squared_test(const std::vector<double>& sample,
                                         const DistSpec& spec,
                                         std::size_t fitted_param_count,
                                         double alpha = 0.01) {
  if (sample.size() < 25) throw std::domain_error("chi_squared_test: need at least 25 samples");
  const std::size_t n = sample.size();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(2.0 * std::pow(static_cast<double>(n), 0.4)));

  // interior edges at model quantiles i/k; first and last bins are open
  std::vector<double> edges;
  edges.reserve(k - 1);
  for (std::size_t i = 1; i < k; ++i) {
    edges.push_back(quantile(spec, static_cast<double>(i) / static_cast<double>(k)));
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const std::size_t bins = edges.size() + 1;
  std::vector<double> observed(bins, 0.0);
  for (double x : sample) {
    const std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    observed[idx] += 1.0;
  }
  std::vector<double> expected(bins, 0.0);
  double prev = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double f = i < edges.size() ? cdf(spec, edges[i]) : 1.0;
    expected[i] = (f - prev) * static_cast<double>(n);
    prev = f;
  }

  // merge left to right until every group's expected count reaches 5
  std::vector<double> o_merged, e_merged;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= 5.0) {
      o_merged.push_back(o_acc);
      e_merged.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0) {
    if (e_merged.empty()) {
      o_merged.push_back(o_acc);
      e_merged.push_back(e_acc);
    } else {
      o_merged.back() += o_acc;
      e_merged.back() += e_acc;
    }
  }

  ChiSquaredResult result;
  result.statistic = chi_squared_statistic(o_merged, e_merged);
  result.dof = static_cast<long>(o_merged.size()) - 1 - static_cast<long>(fitted_param_count);
  if (result.dof < 1) {
    result.conclusive = false;
    result.pass = false;
    return result;
  }
  result.pass =
      result.statistic < chi_squared_quantile(1.0 - alpha, static_cast<double>(result.dof));
  return result;
}

// Root mean square error between paired vectors.
inline double rmse(const std::vector<double>& model_values,
                   const std::vector<double>& data_values) {
  if (model_values.size() != data_values.size() || model_values.empty()) {
    throw std::domain_error("rmse: vectors must be non-empty and of equal length");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < model_values.size(); ++i) {
    const double diff = model_values[i] - data_values[i];
    ss += diff * diff;
  }
  return std::sqrt(ss / static_cast<double>(model_values.size()));
}

struct TailError {
  double low = 0.0;
  double high = 0.0;
};

// Largest ECDF-vs-model deviation restricted to the lowest and highest
// tail_fraction of the order statistics.
template <class CdfFn>
TailError tail_error(const std::vector<double>& sorted_sample, CdfFn&& model_cdf,
                     double tail_fraction = 0.05) {
  detail::require_sorted(sorted_sample, "tail_error");
  if (!(tail_fraction > 0.0 && tail_fraction < 0.5)) {
    throw std::domain_error("tail_error: tail_fraction must be in (0, 0.5)");
  }
  const std::size_t n = sorted_sample.size();
  const std::size_t tail = static_cast<std::size_t>(
      std::floor(tail_fraction * static_cast<double>(n)));
  if (tail < 1) throw std::domain_error("tail_error: too few tail points");
  TailError err;
  for (std::size_t i = 1; i <= tail; ++i) {
    const double ecdf = static_cast<double>(i) / static_cast<double>(n);
    err.low = std::max(err.low, std::fabs(ecdf - model_cdf(sorted_sample[i - 1])));
  }
  for (std::size_t i = n - tail + 1; i <= n; ++i) {
    const double ecdf = static_cast<double>(i) / static_cast<double>(n);
    err.high = std::max(err.high, std::fabs(ecdf - model_cdf(sorted_sample[i - 1])));
  }
  return err;
}

inline TailError tail_error(const std::vector<double>& sorted_sample, const DistSpec& spec,
                            double tail_fraction = 0.05) {
  return tail_error(sorted_sample, [&](double x) { return cdf(spec, x); }, tail_fraction);
}

struct GofEntry {
  std::string model_name;
  double ks_stat = 0.0;
  double ad_stat = 0.0;
  double chi2_stat = 0.0;
  long chi2_dof = 1;
  bool chi2_pass = false;
  double rmse = 0.0;
  double tail_low_err = 0.0;
  double tail_high_err = 0.0;
};

struct GofReport {
  std::vector<GofEntry> entries;   // ranked by ks_stat, then ad_stat
  std::vector<FitResult> fits;     // aligned with entries
  std::size_t sample_size = 0;
  double alpha = 0.01;
  double tail_fraction = 0.05;
};

namespace detail {

struct HistogramBins {
  std::vector<double> edges;
  std::vector<double> density;
};

// Shared equal-width binning (ceil(sqrt(n)) bins) used for the RMSE column.
inline HistogramBins density_histogram(const std::vector<double>& sorted) {
  HistogramBins h;
  const std::size_t n = sorted.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  double lo = sorted.front();
  double hi = sorted.back();
  if (hi <= lo) {
    hi = lo + 1.0;
    k = 1;
  }
  const double width = (hi - lo) / static_cast<double>(k);
  h.edges.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  std::vector<double> counts(k, 0.0);
  for (double x : sorted) {
    std::size_t idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= k) idx = k - 1;  // right edge closed
    counts[idx] += 1.0;
  }
  h.density.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    h.density[i] = counts[i] / (static_cast<double>(n) * width);
  }
  return h;
}

inline GofEntry make_entry(const std::vector<double>& sorted, const FitResult& fit,
                           Family fam, const HistogramBins& hist, double alpha,
                           double tail_fraction) {
  GofEntry e;
  e.model_name = family_label(fam);
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!fit.converged && fit.support_violations > 0) {
    // fit failed outright; keep the entry but rank it last
    e.ks_stat = e.ad_stat = e.chi2_stat = e.rmse = inf;
    e.tail_low_err = e.tail_high_err = inf;
    return e;
  }
  e.ks_stat = ks_statistic(sorted, fit.spec);
  e.ad_stat = ad_statistic(sorted, fit.spec);
  const auto chi2 = chi_squared_test(sorted, fit.spec, param_count(fam), alpha);
  e.chi2_stat = chi2.statistic;
  e.chi2_dof = std::max(chi2.dof, 1L);
  e.chi2_pass = chi2.pass && fit.converged;
  std::vector<double> model_density(hist.density.size());
  for (std::size_t i = 0; i + 1 < hist.edges.size(); ++i) {
    const double mass = cdf(fit.spec, hist.edges[i + 1]) - cdf(fit.spec, hist.edges[i]);
    model_density[i] = mass / (hist.edges[i + 1] - hist.edges[i]);
  }
  e.rmse = rmse(model_density, hist.density);
  const auto tails = tail_error(sorted, fit.spec, tail_fraction);
  e.tail_low_err = tails.low;
  e.tail_high_err = tails.high;
  return e;
}

}  // namespace detail

// Fit every candidate family to the sample and rank by K-S, then A-D.
// Candidate fits are independent; with threads > 1 they run concurrently and
// are reassembled in candidate order, so the report does not depend on the
// thread count.
inline GofReport rank_models(std::vector<double> sample, const std::vector<Family>& candidates,
                             unsigned threads = 1) {
  if (sample.size() < 25) throw std::domain_error("rank_models: need at least 25 samples");
  if (candidates.empty()) throw std::domain_error("rank_models: no candidate families");
  std::sort(sample.begin(), sample.end());

  GofReport report;
  report.sample_size = sample.size();
  const auto hist = detail::density_histogram(sample);

  auto evaluate = [&](Family fam) -> std::pair<GofEntry, FitResult> {
    FitResult fit;
    try {
      fit = fit_mle(fam, sample);
    } catch (const std::exception&) {
      fit.spec = detail::spec_from_params(fam, detail::init_params(fam, detail::moments(sample), sample),
                                          detail::moments(sample).max * (1.0 + 1e-6));
      fit.converged = false;
      fit.support_violations = sample.size();
    }
    GofEntry entry = detail::make_entry(sample, fit, fam, hist, report.alpha,
                                        report.tail_fraction);
    return {std::move(entry), std::move(fit)};
  };

  std::vector<std::pair<GofEntry, FitResult>> results(candidates.size());
  if (threads > 1) {
    std::vector<std::future<std::pair<GofEntry, FitResult>>> futures;
    futures.reserve(candidates.size());
    for (Family fam : candidates) {
      futures.push_back(std::async(std::launch::async, evaluate, fam));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i) results[i] = evaluate(candidates[i]);
  }

  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = results[a].first;
    const auto& eb = results[b].first;
    if (ea.ks_stat != eb.ks_stat) return ea.ks_stat < eb.ks_stat;
    return ea.ad_stat < eb.ad_stat;
  });
  for (std::size_t i : order) {
    report.entries.push_back(std::move(results[i].first));
    report.fits.push_back(std::move(results[i].second));
  }
  return report;
}

}  // namespace mtc
