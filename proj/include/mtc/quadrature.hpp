#pragma once

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mtc {

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1], ascending from center.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01};
inline constexpr std::array<double, 8> kKronrodWeights = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02};
inline constexpr std::array<double, 4> kGaussWeights = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01};

template <class F>
std::pair<double, double> gauss_kronrod_15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kKronrodWeights[0] * fc;
  double gauss = kGaussWeights[0] * fc;
  for (int i = 1; i < 8; ++i) {
    const double x = h * kKronrodNodes[i];
    const double fsum = f(c - x) + f(c + x);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace detail

// Globally adaptive quadrature: the interval with the largest error estimate
// is bisected until the summed error meets the relative tolerance or the
// segment budget runs out. The budget bounds the work on hard integrands
// (endpoint singularities, heavy tails over wide ranges).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 std::size_t max_segments = 4096) {
  if (!(a <= b)) throw std::domain_error("integrate: requires a <= b");
  if (a == b) return 0.0;

  struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
  };
  auto eval = [&](double lo, double hi) {
    const auto [value, error] = detail::gauss_kronrod_15(f, lo, hi);
    return Segment{lo, hi, value, error};
  };

  std::priority_queue<Segment> queue;
  Segment whole = eval(a, b);
  double total = whole.value;
  double total_err = whole.error;
  queue.push(whole);

  while (total_err > rel_tol * std::max(std::fabs(total), 1e-300) && !queue.empty() &&
         queue.size() < max_segments) {
    const Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // exhausted at fp resolution, give up on it
      total_err -= worst.error;
      continue;
    }
    const Segment left = eval(worst.a, mid);
    const Segment right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  if (!std::isfinite(total)) throw std::runtime_error("integrate: non-finite result");
  return total;
}

// Integral over [a, infinity) via the substitution x = a + t/(1-t).
template <class F>
double integrate_upper_inf(F&& f, double a, double rel_tol = 1e-10) {
  auto g = [&](double t) {
    const double u = 1.0 - t;
    const double x = a + t / u;
    return f(x) / (u * u);
  };
  return integrate(g, 0.0, 1.0, rel_tol);
}

}  // namespace mtc
