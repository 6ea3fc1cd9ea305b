#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "levysim/levy_measure.hpp"

namespace levysim {

struct Atom {
    double location;
    double mass;
};

// Finite-activity approximation nu_bar of an infinite-activity measure:
// the base measure truncated at |y| <= cutoff plus weighted atoms.
// cutoff equals epsilon for orders 2 and 3 and epsilon*sqrt(sqrt(2)-1) for
// order 4; atoms sit at +-2*epsilon (order 3) or +-epsilon (order 4).
struct FiniteApprox {
    LevyMeasureSpec base;
    double cutoff = 0.0;
    double epsilon = 0.0;
    std::vector<Atom> atoms;
    double lambda_total = 0.0;
    int order = 2;

    double atom_mass() const;
    // k-th moment of the atomic part, signed or absolute.
    double atom_moment(int k, bool absolute = false) const;
};

// Moments m[k] = int y^k nu(dy), indexed by power.
struct MomentVector {
    std::vector<double> m;
};

inline double oa4_cutoff_factor() { return std::sqrt(std::sqrt(2.0) - 1.0); }

// Solves F(eps) = lambda for a strictly decreasing continuous F, to
// |F(eps) - lambda| <= 1e-8 * lambda. Bracket by geometric expansion from
// eps = 1, then Brent. Throws InfeasibleIntensityError when lambda exceeds
// the supremum of F, BracketingError when no bracket is found within 200
// expansions.
double solve_epsilon(const std::function<double(double)>& F, double lambda);

FiniteApprox build_oa2(const LevyMeasureSpec& measure, double lambda);
FiniteApprox build_oa3(const LevyMeasureSpec& measure, double lambda,
                       bool match_third_moment = false);
FiniteApprox build_oa4(const LevyMeasureSpec& measure, double lambda);

// Dispatch on order; rejects anything outside {2,3,4} with
// UnsupportedOrderError (the general-n nonlinear system is out of scope).
FiniteApprox build_approx(const LevyMeasureSpec& measure, int order, double lambda,
                          bool match_third_moment = false);

// J(nu_bar) = int |y|^n |nu - nu_bar|(dy)
//           = int_{|y|<=cutoff} |y|^n nu(dy) + sum_atoms mass*|location|^n.
double error_functional(const LevyMeasureSpec& measure, const FiniteApprox& approx);

// Signed mismatch int y^i (nu - nu_bar)(dy) for i <= order; absolute
// mismatch int |y|^{order+1} |nu - nu_bar|(dy) for i = order + 1.
double moment_mismatch(const LevyMeasureSpec& measure, const FiniteApprox& approx,
                       int i);

// Minimal total mass of a nonnegative measure matching the given moments
// (truncated Hamburger problem): 0 for n in {2,3}, m2^2/m4 for n in {4,5}.
// m[0] and m[1] entries are ignored. Throws UnsupportedOrderError outside
// 2..5.
double minimal_intensity(const MomentVector& moments, int n);

// True iff some m1 makes the full Hankel matrix {m_{i+j}}_{i,j=0..q}
// nonnegative definite, given m[0], m[2..2q] (m[1] is free and optimized
// over; the determinant is an exact quadratic in m1). Throws
// InvalidMomentsError when the inner block {m_{i+j}}_{i,j=1..q} is not PSD.
bool hankel_feasible(const MomentVector& moments, int q);

struct RatePoint {
    double lambda;
    double epsilon;
    double j;
};

struct RateCurve {
    std::vector<RatePoint> points;
    double slope;  // least-squares fit of log J against log lambda
};

RateCurve rate_curve(const LevyMeasureSpec& measure, int order,
                     const std::vector<double>& lambda_grid);

// Least-squares slope of log(y) against log(x); shared by rate fitting and
// diagnostics.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace levysim
