#pragma once

#include <functional>
#include <utility>

namespace levysim {

// Numerics policy: panels are evaluated with 15-point adaptive Gauss-Kronrod.
// On smooth panels the achieved accuracy is near machine precision, but the
// estimator cannot certify below ~1e-9 relative (it saturates and then
// inflates when pushed deeper), so the non-convergence guard triggers at
// max(rel_tol, 1e-7) relative on the accumulated estimates. It exists to
// catch genuinely bad integrands, not to certify the last digits; accuracy
// itself is pinned by the closed-form cross-check tests.

// One adaptive pass over [a, b]; returns (value, error estimate). Throws
// MeasureEvaluationError for non-finite integrands, never ToleranceError.
std::pair<double, double> integrate_panel(const std::function<double(double)>& f,
                                          double a, double b);

// Single smooth span with the convergence guard.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol);

// Integral over (lo, hi] with 0 < lo << hi: doubling panels keep the rule
// well scaled when the integrand is steep near the lower end.
double integrate_doubling(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol);

// Integral of f over (0, b] where f may have an integrable singularity at 0.
// Geometric panels toward the origin with geometric-tail extrapolation of
// the remainder. Throws DivergentMomentError when the panel sums do not
// contract (non-integrable singularity).
double integrate_to_zero(const std::function<double(double)>& f, double b,
                         double rel_tol);

}  // namespace levysim
