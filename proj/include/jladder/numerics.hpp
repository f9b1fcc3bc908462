#pragma once

// Real-analysis primitives: adaptive Gauss-Kronrod quadrature with an
// oscillation-aware panel cap, monotone inversion and leftmost level
// crossings. Everything here is pure and reentrant.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "jladder/error.hpp"

namespace jladder::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct Bracket {
  double lo;
  double hi;

  Bracket(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) {
      std::ostringstream os;
      os << "bracket requires lo < hi, got [" << lo << ", " << hi << "]";
      throw Error(ErrorKind::BracketInvalid, os.str());
    }
  }

  double width() const { return hi - lo; }
};

struct QuadratureOptions {
  // Upper bound on the number of panels before giving up.
  std::size_t max_panels = 50000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double abs_value;

  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(fc) * kKronrodWeights[7];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[i] * (f1 + f2);
    abs_sum += kKronrodWeights[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1 + f2);
  }
  return Panel{a, b, kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * std::abs(half)};
}

inline bool splittable(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double scale = std::max(std::abs(a), std::abs(b));
  return mid > a && mid < b && (b - a) > 16.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace detail

// Globally adaptive integration of f over [a, b] with absolute tolerance tol.
// When min_wavelength is given the initial panels are no wider than it.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double tol,
                           std::optional<double> min_wavelength = std::nullopt,
                           const QuadratureOptions& options = {}) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "integrate requires a < b");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "integrate requires tol > 0");
  if (min_wavelength && !(*min_wavelength > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_wavelength must be positive");
  }

  std::size_t initial = 1;
  if (min_wavelength) {
    initial = static_cast<std::size_t>(std::ceil((b - a) / *min_wavelength));
    initial = std::clamp<std::size_t>(initial, 1, options.max_panels);
  }

  std::priority_queue<detail::Panel> heap;
  std::vector<detail::Panel> frozen;
  double total = 0.0;
  double total_error = 0.0;
  double total_abs = 0.0;
  std::size_t evaluations = 0;

  const double step = (b - a) / static_cast<double>(initial);
  for (std::size_t i = 0; i < initial; ++i) {
    const double lo = a + step * static_cast<double>(i);
    const double hi = (i + 1 == initial) ? b : a + step * static_cast<double>(i + 1);
    auto panel = detail::gauss_kronrod_15(f, lo, hi);
    evaluations += 15;
    total += panel.value;
    total_error += panel.error;
    total_abs += panel.abs_value;
    heap.push(panel);
  }

  // Below this floor, further splitting only chases rounding noise.
  auto effective_tol = [&] {
    return std::max(tol, 50.0 * std::numeric_limits<double>::epsilon() * total_abs);
  };

  while (total_error > effective_tol() && !heap.empty()) {
    if (heap.size() + frozen.size() >= options.max_panels) {
      std::ostringstream os;
      os << "panel limit " << options.max_panels << " reached on [" << a << ", " << b
         << "] with error " << total_error << " > " << tol;
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    detail::Panel worst = heap.top();
    heap.pop();
    if (!detail::splittable(worst.a, worst.b)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the panels to shed the drift of incremental updates.
  double value = 0.0;
  double error = 0.0;
  for (; !heap.empty(); heap.pop()) {
    value += heap.top().value;
    error += heap.top().error;
  }
  for (const auto& p : frozen) {
    value += p.value;
    error += p.error;
  }
  if (error > effective_tol()) {
    std::ostringstream os;
    os << "no further subdivision possible on [" << a << ", " << b << "], error " << error;
    throw Error(ErrorKind::NonConvergence, os.str());
  }
  return QuadratureResult{value, error, evaluations};
}

namespace detail {

// Refines a sign-changing bracket of h until its width is at most tol.
template <class H>
double refine_root(H& h, double lo, double hi, double h_lo, double h_hi, double tol) {
  auto done = [tol](double x, double y) {
    const double width = std::abs(y - x);
    const double ulp = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(x), std::abs(y));
    return width <= std::max(tol, ulp);
  };
  std::uintmax_t max_iter = 200;
  auto [x, y] = boost::math::tools::toms748_solve(h, lo, hi, h_lo, h_hi, done, max_iter);
  return 0.5 * (x + y);
}

}  // namespace detail

// Solves g(x) = target for nondecreasing g on the bracket.
template <class G>
double invert_increasing(G&& g, const Bracket& bracket, double target, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "invert_increasing requires tol > 0");
  auto h = [&](double x) { return g(x) - target; };
  const double h_lo = h(bracket.lo);
  const double h_hi = h(bracket.hi);
  if (h_lo > 0.0 || h_hi < 0.0 || std::isnan(h_lo) || std::isnan(h_hi)) {
    std::ostringstream os;
    os << "target " << target << " not bracketed: g(" << bracket.lo << ") - target = " << h_lo
       << ", g(" << bracket.hi << ") - target = " << h_hi;
    throw Error(ErrorKind::BracketInvalid, os.str());
  }
  if (h_lo == 0.0) return bracket.lo;
  if (h_hi == 0.0) return bracket.hi;
  return detail::refine_root(h, bracket.lo, bracket.hi, h_lo, h_hi, tol);
}

struct CrossingOptions {
  // Number of times the scan grid is doubled before reporting NoCrossing.
  int max_refinements = 4;
};

// Bracket of the leftmost level crossing found by a uniform scan that
// includes both endpoints. exact is set when an interior scan point hits
// the level; lo == hi then.
struct CrossingBracket {
  double lo;
  double hi;
  double h_lo;
  double h_hi;
  bool exact;
};

template <class G>
CrossingBracket scan_level_crossing(G&& g, double a, double b, double level, std::size_t scan_points,
                                    const CrossingOptions& options = {}) {
  if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "find_level_crossing requires a < b");
  if (scan_points < 3) throw Error(ErrorKind::InvalidArgument, "scan_points must be >= 3");
  auto h = [&](double x) { return g(x) - level; };

  std::size_t n = scan_points;
  for (int depth = 0; depth <= options.max_refinements; ++depth) {
    const double step = (b - a) / static_cast<double>(n - 1);
    double x_prev = a;
    double h_prev = h(a);
    for (std::size_t i = 1; i < n; ++i) {
      const double x = (i + 1 == n) ? b : a + step * static_cast<double>(i);
      const double hx = h(x);
      if (hx == 0.0 && i + 1 < n) return {x, x, 0.0, 0.0, true};
      if ((h_prev < 0.0 && hx > 0.0) || (h_prev > 0.0 && hx < 0.0)) return {x_prev, x, h_prev, hx, false};
      x_prev = x;
      h_prev = hx;
    }
    n = 2 * n - 1;
  }
  std::ostringstream os;
  os << "no crossing of level " << level << " on (" << a << ", " << b << ") after "
     << options.max_refinements << " scan refinements";
  throw Error(ErrorKind::NoCrossing, os.str());
}

// Leftmost x in (a, b) with g(x) = level. The scan grid is uniform and
// includes both endpoints; a scan point that hits the level exactly wins,
// otherwise the first sign change is refined to width tol.
template <class G>
double find_level_crossing(G&& g, double a, double b, double level, std::size_t scan_points,
                           double tol, const CrossingOptions& options = {}) {
  const auto br = scan_level_crossing(g, a, b, level, scan_points, options);
  if (br.exact) return br.lo;
  auto h = [&](double x) { return g(x) - level; };
  return detail::refine_root(h, br.lo, br.hi, br.h_lo, br.h_hi, tol);
}

}  // namespace jladder::numerics
