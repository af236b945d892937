#pragma once

#include <functional>

namespace qkdnet::numerics {

/// Stopping criteria shared by the iterative kernels. A result is accepted
/// when its error estimate is below max(abs, rel * |value|).
struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;
  int max_iter = 500;

  /// Throws DomainError unless abs > 0, rel >= 0, max_iter >= 1.
  void validate() const;
  double bound(double value) const;
};

using RealFunction = std::function<double(double)>;

/// Error function. Throws DomainError for non-finite x.
double erf(double x);

/// Globally adaptive Gauss-Kronrod (7/15) quadrature with interval bisection.
/// `max_iter` bounds the number of panel splits.
///
/// An infinite upper limit is handled by truncation: unit-width panels are
/// appended past a + 4 until one contributes less than 1e-16 of the running
/// total. This is only meant for integrands with a Gaussian envelope.
///
/// Throws NumericalFailure (carrying the best estimate) on non-convergence.
double integrate_1d(const RealFunction& f, double a, double b, const Tolerance& tol = {});

struct Minimum {
  double argmin;
  double value;
};

/// Golden-section search for the minimum of f on [lo, hi]. f is assumed
/// unimodal there; for other functions a local minimum is returned.
/// Terminates once the bracket is narrower than tol.abs.
Minimum minimize_1d(const RealFunction& f, double lo, double hi, const Tolerance& tol = {});

/// Solves x = g(x) by plain iteration starting at x0. If the iterates stop
/// contracting, switches to bisection on x - g(x) over a bracket grown
/// outwards from x0. Result satisfies |x - g(x)| <= tol.abs.
double fixed_point(const RealFunction& g, double x0, const Tolerance& tol = {});

}  // namespace qkdnet::numerics
