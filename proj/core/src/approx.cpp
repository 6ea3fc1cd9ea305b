#include "levysim/approx.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "levysim/errors.hpp"

namespace levysim {

double FiniteApprox::atom_mass() const {
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.mass;
    return total;
}

double FiniteApprox::atom_moment(int k, bool absolute) const {
    double total = 0.0;
    for (const auto& atom : atoms) {
        const double loc = absolute ? std::abs(atom.location) : atom.location;
        total += atom.mass * std::pow(loc, k);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Intensity equation

namespace {

struct Bracket {
    double lo, hi, flo, fhi;
};

Bracket find_bracket(const std::function<double(double)>& F, double lambda) {
    double lo = 1.0, hi = 1.0;
    double flo = F(lo), fhi = flo;
    if (flo < lambda) {
        double prev = flo;
        int plateau = 0;
        for (int i = 0;; ++i) {
            if (i >= 200) {
                throw BracketingError("no bracket after 200 downward expansions");
            }
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            flo = F(lo);
            if (flo >= lambda) break;
            if (std::abs(flo - prev) <= 1e-12 * std::max(1.0, std::abs(flo))) {
                if (++plateau >= 3) {
                    std::ostringstream msg;
                    msg << "target intensity " << lambda
                        << " exceeds the supremum of F (plateau at " << flo << ")";
                    throw InfeasibleIntensityError(msg.str());
                }
            } else {
                plateau = 0;
            }
            prev = flo;
        }
    } else if (fhi > lambda) {
        for (int i = 0;; ++i) {
            if (i >= 200) {
                throw BracketingError("no bracket after 200 upward expansions");
            }
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = F(hi);
            if (fhi <= lambda) break;
        }
    }
    return {lo, hi, flo, fhi};
}

}  // namespace

double solve_epsilon(const std::function<double(double)>& F, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InfeasibleIntensityError("target intensity must be positive and finite");
    }
    const double target_resid = 1e-8 * lambda;
    const Bracket bracket = find_bracket(F, lambda);

    // Brent on g(e) = F(e) - lambda with g(a) >= 0 >= g(b).
    double a = bracket.lo, b = bracket.hi;
    double fa = bracket.flo - lambda, fb = bracket.fhi - lambda;
    if (std::abs(fa) <= target_resid) return a;
    if (std::abs(fb) <= target_resid) return b;

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 1e-300;
        const double xm = 0.5 * (c - b);
        if (std::abs(fb) <= target_resid || std::abs(xm) <= tol1) {
            if (std::abs(fb) <= target_resid) return b;
            break;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic / secant step.
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = F(b) - lambda;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    const double achieved = F(b);
    if (std::abs(achieved - lambda) <= target_resid) return b;
    throw ToleranceError("intensity equation residual above 1e-8 * lambda", achieved);
}

// ---------------------------------------------------------------------------
// Builders

namespace {

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InfeasibleIntensityError("builders require lambda > 0");
    }
}

void check_atoms_nonnegative(const FiniteApprox& approx) {
    for (const auto& atom : approx.atoms) {
        if (atom.mass < -1e-12 * std::max(1.0, approx.lambda_total)) {
            throw InternalError("computed atom mass is negative at y=" +
                                std::to_string(atom.location));
        }
    }
}

}  // namespace

FiniteApprox build_oa2(const LevyMeasureSpec& measure, double lambda) {
    require_positive_lambda(lambda);
    const double eps =
        solve_epsilon([&](double e) { return tail_mass(measure, e); }, lambda);
    FiniteApprox approx;
    approx.base = measure;
    approx.cutoff = eps;
    approx.epsilon = eps;
    approx.lambda_total = lambda;
    approx.order = 2;
    return approx;
}

FiniteApprox build_oa3(const LevyMeasureSpec& measure, double lambda,
                       bool match_third_moment) {
    require_positive_lambda(lambda);
    const auto small_m2 = [&](double e) {
        return partial_moment(measure, 2, Region::inside, e, MomentMode::signed_moment);
    };
    const double eps = solve_epsilon(
        [&](double e) { return tail_mass(measure, e) + small_m2(e) / (4.0 * e * e); },
        lambda);

    const double s2 = small_m2(eps);
    double skew = 0.0;
    if (match_third_moment) {
        const double s3 =
            partial_moment(measure, 3, Region::inside, eps, MomentMode::signed_moment);
        skew = s3 / (16.0 * eps * eps * eps);
    }
    const double half = s2 / (8.0 * eps * eps);

    FiniteApprox approx;
    approx.base = measure;
    approx.cutoff = eps;
    approx.epsilon = eps;
    approx.atoms = {{-2.0 * eps, half - skew}, {2.0 * eps, half + skew}};
    approx.lambda_total = lambda;
    approx.order = 3;
    check_atoms_nonnegative(approx);
    return approx;
}

FiniteApprox build_oa4(const LevyMeasureSpec& measure, double lambda) {
    require_positive_lambda(lambda);
    const double factor = oa4_cutoff_factor();
    const auto small_m2 = [&](double c) {
        return partial_moment(measure, 2, Region::inside, c, MomentMode::signed_moment);
    };
    const double eps = solve_epsilon(
        [&](double e) {
            return tail_mass(measure, factor * e) + small_m2(factor * e) / (e * e);
        },
        lambda);

    const double cutoff = factor * eps;
    const double m2 = small_m2(cutoff);
    const double m3 =
        partial_moment(measure, 3, Region::inside, cutoff, MomentMode::signed_moment);
    const double denom = 2.0 * eps * eps * eps;
    const double alpha1 = (-m3 + eps * m2) / denom;
    const double alpha2 = (m3 + eps * m2) / denom;

    FiniteApprox approx;
    approx.base = measure;
    approx.cutoff = cutoff;
    approx.epsilon = eps;
    approx.atoms = {{-eps, alpha1}, {eps, alpha2}};
    approx.lambda_total = lambda;
    approx.order = 4;
    check_atoms_nonnegative(approx);

    // Feasibility audit of the built measure's own moments (asserted, not
    // assumed): some m1 must make the full Hankel matrix PSD.
    MomentVector mv;
    mv.m = {lambda, 0.0,
            partial_moment(measure, 2, Region::outside, cutoff, MomentMode::signed_moment) +
                approx.atom_moment(2),
            partial_moment(measure, 3, Region::outside, cutoff, MomentMode::signed_moment) +
                approx.atom_moment(3),
            partial_moment(measure, 4, Region::outside, cutoff, MomentMode::signed_moment) +
                approx.atom_moment(4)};
    if (!hankel_feasible(mv, 2)) {
        throw InternalError("order-4 approximation failed the Hankel feasibility audit");
    }
    return approx;
}

FiniteApprox build_approx(const LevyMeasureSpec& measure, int order, double lambda,
                          bool match_third_moment) {
    switch (order) {
        case 2: return build_oa2(measure, lambda);
        case 3: return build_oa3(measure, lambda, match_third_moment);
        case 4: return build_oa4(measure, lambda);
        default:
            throw UnsupportedOrderError("order " + std::to_string(order) +
                                        " is not supported (general n is out of scope)");
    }
}

double error_functional(const LevyMeasureSpec& measure, const FiniteApprox& approx) {
    return partial_moment(measure, approx.order, Region::inside, approx.cutoff,
                          MomentMode::absolute_moment) +
           approx.atom_moment(approx.order, /*absolute=*/true);
}

double moment_mismatch(const LevyMeasureSpec& measure, const FiniteApprox& approx,
                       int i) {
    const int n = approx.order;
    if (i >= 1 && i <= n) {
        return partial_moment(measure, i, Region::inside, approx.cutoff,
                              MomentMode::signed_moment) -
               approx.atom_moment(i);
    }
    if (i == n + 1) {
        return partial_moment(measure, i, Region::inside, approx.cutoff,
                              MomentMode::absolute_moment) +
               approx.atom_moment(i, /*absolute=*/true);
    }
    throw MeasureEvaluationError("moment_mismatch requires 1 <= i <= order + 1");
}

// ---------------------------------------------------------------------------
// Hamburger moment problem

double minimal_intensity(const MomentVector& moments, int n) {
    if (n == 2 || n == 3) return 0.0;
    if (n == 4 || n == 5) {
        if (moments.m.size() < 5) {
            throw InvalidMomentsError("minimal_intensity needs moments up to m4");
        }
        const double m2 = moments.m[2], m4 = moments.m[4];
        if (!(m2 > 0.0) || !(m4 > 0.0)) {
            throw InvalidMomentsError("minimal_intensity requires m2 > 0 and m4 > 0");
        }
        return m2 * m2 / m4;
    }
    throw UnsupportedOrderError("minimal intensity implemented for n in 2..5 only");
}

bool hankel_feasible(const MomentVector& moments, int q) {
    if (q < 1) throw InvalidMomentsError("hankel_feasible requires q >= 1");
    if (moments.m.size() < static_cast<size_t>(2 * q + 1)) {
        throw InvalidMomentsError("hankel_feasible needs moments m0..m_{2q}");
    }

    Eigen::MatrixXd inner(q, q);
    for (int i = 1; i <= q; ++i) {
        for (int j = 1; j <= q; ++j) inner(i - 1, j - 1) = moments.m[i + j];
    }
    const double inner_scale = std::max(1.0, inner.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
    if (es.eigenvalues().minCoeff() < -1e-10 * inner_scale) {
        throw InvalidMomentsError("inner Hankel block {m_{i+j}}_{i,j=1..q} is not PSD");
    }

    const auto det_at = [&](double m1) {
        Eigen::MatrixXd h(q + 1, q + 1);
        for (int i = 0; i <= q; ++i) {
            for (int j = 0; j <= q; ++j) {
                h(i, j) = (i + j == 1) ? m1 : moments.m[i + j];
            }
        }
        return h.determinant();
    };

    // det is an exact quadratic in m1 (m1 sits in two symmetric entries).
    double h = 1.0;
    for (double v : moments.m) h = std::max(h, std::abs(v));
    const double dp = det_at(h), dm = det_at(-h), d0 = det_at(0.0);
    const double a = (dp + dm - 2.0 * d0) / (2.0 * h * h);
    const double b = (dp - dm) / (2.0 * h);
    const double c = d0;
    const double tol = 1e-12 * (std::abs(a) * h * h + std::abs(b) * h + std::abs(c) + 1e-300);

    if (a < -tol / (h * h)) {
        const double best = c - b * b / (4.0 * a);
        return best >= -tol;
    }
    if (std::abs(a) * h * h <= tol && std::abs(b) * h <= tol) {
        return c >= -tol;  // constant in m1
    }
    return true;  // linear or convex in m1: determinant unbounded above
}

// ---------------------------------------------------------------------------
// Rate diagnostics

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw MeasureEvaluationError("slope fit needs at least two points");
    }
    const size_t n = xs.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(std::abs(ys[i]));
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

RateCurve rate_curve(const LevyMeasureSpec& measure, int order,
                     const std::vector<double>& lambda_grid) {
    if (lambda_grid.size() < 2) {
        throw MeasureEvaluationError("rate_curve needs a lambda grid with >= 2 points");
    }
    for (size_t i = 1; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > lambda_grid[i - 1])) {
            throw MeasureEvaluationError("rate_curve lambda grid must be increasing");
        }
    }
    RateCurve curve;
    std::vector<double> js;
    for (double lambda : lambda_grid) {
        const FiniteApprox approx = build_approx(measure, order, lambda);
        const double j = error_functional(measure, approx);
        curve.points.push_back({lambda, approx.epsilon, j});
        js.push_back(j);
    }
    curve.slope = loglog_slope(lambda_grid, js);
    return curve;
}

}  // namespace levysim
