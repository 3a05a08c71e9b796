#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mtc {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Derivative-free Nelder-Mead minimization. The objective may return +inf to
// reject a point (e.g. parameters whose support excludes a sample value).
// Convergence is declared when the relative simplex diameter drops below
// rel_tol. The best vertex is only ever replaced by a strictly better one,
// so the result never degrades below the starting point.
template <class F>
SimplexResult nelder_mead(F&& f, const std::vector<double>& x0, double rel_tol = 1e-8,
                          std::size_t max_iter = 10000) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty start point");

  constexpr double alpha = 1.0;   // reflection
  constexpr double gamma = 2.0;   // expansion
  constexpr double rho = 0.5;     // contraction
  constexpr double sigma = 0.5;   // shrink

  std::vector<std::vector<double>> verts(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) {
    verts[i + 1][i] += 0.05 * std::fabs(x0[i]) + 0.05;
  }
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(verts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> v2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      v2[i] = verts[idx[i]];
      f2[i] = vals[idx[i]];
    }
    verts.swap(v2);
    vals.swap(f2);
  };

  auto diameter = [&] {
    double dmax = 0.0;
    double xmax = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      xmax = std::max(xmax, std::fabs(verts[0][j]));
      for (std::size_t i = 1; i <= dim; ++i) {
        dmax = std::max(dmax, std::fabs(verts[i][j] - verts[0][j]));
      }
    }
    return dmax / xmax;
  };

  SimplexResult result;
  order();
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    if (diameter() < rel_tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += verts[i][j];
    }
    for (std::size_t j = 0; j < dim; ++j) centroid[j] /= static_cast<double>(dim);

    auto blend = [&](double coef) {
      std::vector<double> p(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        p[j] = centroid[j] + coef * (centroid[j] - verts[dim][j]);
      }
      return p;
    };

    auto reflected = blend(alpha);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      auto expanded = blend(alpha * gamma);
      const double fe = f(expanded);
      if (fe < fr) {
        verts[dim] = std::move(expanded);
        vals[dim] = fe;
      } else {
        verts[dim] = std::move(reflected);
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      verts[dim] = std::move(reflected);
      vals[dim] = fr;
    } else {
      const bool outside = fr < vals[dim];
      auto contracted = blend(outside ? rho * alpha : -rho);
      const double fc = f(contracted);
      if (fc < (outside ? fr : vals[dim])) {
        verts[dim] = std::move(contracted);
        vals[dim] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) {
            verts[i][j] = verts[0][j] + sigma * (verts[i][j] - verts[0][j]);
          }
          vals[i] = f(verts[i]);
        }
      }
    }
    order();
  }

  result.x = verts[0];
  result.value = vals[0];
  result.iterations = iter;
  return result;
}

}  // namespace mtc
