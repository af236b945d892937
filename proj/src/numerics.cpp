#include "qkdnet/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/core.h>

#include "qkdnet/errors.hpp"

namespace qkdnet::numerics {

namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; the
// 7-point Gauss rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double magnitude;  // integral of |f|, for the round-off floor
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw NumericalFailure(fmt::format("integrand is not finite at x = {}", x), 0.0);
  }
  return y;
}

Panel gauss_kronrod(const RealFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double kronrod = fc * kKronrodW[7];
  double gauss = fc * kGaussW[3];
  double magnitude = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodX[j];
    const double f1 = checked(f, center - dx);
    const double f2 = checked(f, center + dx);
    kronrod += kKronrodW[j] * (f1 + f2);
    magnitude += kKronrodW[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussW[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), magnitude * std::abs(half)};
}

double integrate_finite(const RealFunction& f, double a, double b, const Tolerance& tol) {
  std::vector<Panel> panels{gauss_kronrod(f, a, b)};
  double value = panels.front().value;
  double error = panels.front().error;
  double magnitude = panels.front().magnitude;

  for (int split = 0;; ++split) {
    const double floor = 50.0 * kEps * magnitude;
    if (error <= std::max(tol.bound(value), floor)) return value;
    if (split >= tol.max_iter) break;

    std::pop_heap(panels.begin(), panels.end(), ByError{});
    const Panel worst = panels.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) break;  // cannot split further
    panels.back() = gauss_kronrod(f, worst.a, mid);
    std::push_heap(panels.begin(), panels.end(), ByError{});
    panels.push_back(gauss_kronrod(f, mid, worst.b));
    std::push_heap(panels.begin(), panels.end(), ByError{});

    // Re-sum instead of updating incrementally so cancellation does not drift.
    value = 0.0;
    error = 0.0;
    magnitude = 0.0;
    for (const Panel& p : panels) {
      value += p.value;
      error += p.error;
      magnitude += p.magnitude;
    }
  }
  throw NumericalFailure(
      fmt::format("quadrature on [{}, {}] did not converge (error estimate {:.3g})", a, b, error),
      value);
}

double integrate_tail(const RealFunction& f, double a, const Tolerance& tol) {
  constexpr double kHead = 4.0;
  constexpr double kNegligible = 1e-16;
  constexpr int kMaxPanels = 256;

  double total = integrate_finite(f, a, a + kHead, tol);
  double previous = std::numeric_limits<double>::infinity();
  double x = a + kHead;
  for (int k = 0; k < kMaxPanels; ++k) {
    const double piece = integrate_finite(f, x, x + 1.0, tol);
    total += piece;
    x += 1.0;
    const bool shrinking = std::abs(piece) <= previous;
    if (shrinking && std::abs(piece) <= kNegligible * std::abs(total)) return total;
    if (piece == 0.0 && total == 0.0) return total;
    previous = std::abs(piece);
  }
  throw NumericalFailure(
      fmt::format("integrand tail beyond x = {} did not become negligible", x), total);
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs > 0.0) || !(rel >= 0.0) || max_iter < 1) {
    throw DomainError(fmt::format(
        "invalid tolerance (abs = {}, rel = {}, max_iter = {})", abs, rel, max_iter));
  }
}

double Tolerance::bound(double value) const { return std::max(abs, rel * std::abs(value)); }

double erf(double x) {
  if (!std::isfinite(x)) throw DomainError("erf: argument is not finite");
  return std::erf(x);
}

double integrate_1d(const RealFunction& f, double a, double b, const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(a) || std::isnan(b) || !(a < b)) {
    throw DomainError(fmt::format("integrate_1d: need finite a < b, got [{}, {}]", a, b));
  }
  if (std::isinf(b)) return integrate_tail(f, a, tol);
  return integrate_finite(f, a, b, tol);
}

Minimum minimize_1d(const RealFunction& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) {
    throw DomainError(fmt::format("minimize_1d: need lo < hi, got [{}, {}]", lo, hi));
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < tol.max_iter; ++it) {
    if (b - a <= tol.abs) {
      return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
    }
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  throw NumericalFailure(
      fmt::format("golden-section search did not narrow [{}, {}] to {}", lo, hi, tol.abs),
      f1 <= f2 ? x1 : x2);
}

namespace {

double bisect_fixed_point(const RealFunction& g, double x0, const Tolerance& tol) {
  const auto h = [&](double x) { return x - g(x); };

  double lo = x0;
  double hi = x0;
  double h_lo = h(lo);
  double h_hi = h_lo;
  if (h_lo == 0.0) return x0;
  double step = std::max(1.0, std::abs(x0)) * 1e-2;
  bool grow_lo = true;
  bool grow_hi = true;
  for (int k = 0; k < 200 && (h_lo > 0.0) == (h_hi > 0.0); ++k) {
    if (grow_lo) {
      const double c = lo - step;
      const double hc = h(c);
      if (std::isfinite(hc)) {
        lo = c;
        h_lo = hc;
      } else {
        grow_lo = false;
      }
    }
    if (grow_hi && (h_lo > 0.0) == (h_hi > 0.0)) {
      const double c = hi + step;
      const double hc = h(c);
      if (std::isfinite(hc)) {
        hi = c;
        h_hi = hc;
      } else {
        grow_hi = false;
      }
    }
    if (!grow_lo && !grow_hi) break;
    step *= 2.0;
  }
  if ((h_lo > 0.0) == (h_hi > 0.0)) {
    throw NumericalFailure("fixed_point: could not bracket a root of x - g(x)", x0);
  }

  double best = std::abs(h_lo) < std::abs(h_hi) ? lo : hi;
  double best_res = std::min(std::abs(h_lo), std::abs(h_hi));
  for (int it = 0; it < 4 * tol.max_iter; ++it) {
    if (best_res <= tol.abs) return best;
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    const double h_mid = h(mid);
    if (std::abs(h_mid) < best_res) {
      best = mid;
      best_res = std::abs(h_mid);
    }
    if ((h_mid > 0.0) == (h_lo > 0.0)) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  if (best_res <= tol.abs) return best;
  throw NumericalFailure(
      fmt::format("fixed_point: residual {:.3g} above tolerance {:.3g}", best_res, tol.abs), best);
}

}  // namespace

double fixed_point(const RealFunction& g, double x0, const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(x0)) throw DomainError("fixed_point: starting point is not finite");

  double x = x0;
  double previous = std::numeric_limits<double>::infinity();
  int stalls = 0;
  for (int it = 0; it < tol.max_iter; ++it) {
    const double gx = g(x);
    if (!std::isfinite(gx)) break;
    const double residual = std::abs(gx - x);
    if (residual <= tol.abs) return x;
    stalls = residual > 0.99 * previous ? stalls + 1 : 0;
    if (stalls >= 3) break;
    previous = residual;
    x = gx;
  }
  return bisect_fixed_point(g, x0, tol);
}

}  // namespace qkdnet::numerics
