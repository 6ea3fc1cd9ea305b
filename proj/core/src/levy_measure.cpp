#include "levysim/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levysim/errors.hpp"
#include "levysim/quadrature.hpp"

namespace levysim {

namespace {

// Upper incomplete gamma Gamma(s, x) for real s (possibly <= 0) and x > 0,
// by the recurrence Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s with the
// base cases Gamma(s, x) for s > 0 and Gamma(0, x) = E_1(x).
double upper_gamma(double s, double x) {
    if (s > 0.0) return boost::math::tgamma(s, x);
    if (s == 0.0) return boost::math::expint(1, x);
    return (upper_gamma(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
}

struct CgmyForms {
    CgmyParams p;

    double side_tail(double lam, double c) const {
        return p.c * std::pow(lam, p.alpha) * upper_gamma(-p.alpha, lam * c);
    }
    double tail(double c) const {
        return side_tail(p.lambda_plus, c) + side_tail(p.lambda_minus, c);
    }
    // int_{(c,inf)} y^k * c e^{-lam y} y^{-1-alpha} dy ; c == 0 allowed for k > alpha.
    double side_outside(double lam, int k, double c) const {
        const double s = k - p.alpha;
        if (c <= 0.0) {
            if (s <= 0.0) {
                throw DivergentMomentError("CGMY moment k=" + std::to_string(k) +
                                           " diverges at the origin for alpha >= k");
            }
            return p.c * std::pow(lam, p.alpha - k) * boost::math::tgamma(s);
        }
        return p.c * std::pow(lam, p.alpha - k) * upper_gamma(s, lam * c);
    }
    double side_inside(double lam, int k, double c) const {
        const double s = k - p.alpha;
        if (s <= 0.0) {
            throw DivergentMomentError("CGMY moment k=" + std::to_string(k) +
                                       " over a region covering 0 diverges for alpha >= k");
        }
        return p.c * std::pow(lam, p.alpha - k) * boost::math::tgamma_lower(s, lam * c);
    }
    double moment(int k, Region region, double a, MomentMode mode) const {
        double pos, neg;
        if (region == Region::inside) {
            pos = side_inside(p.lambda_plus, k, a);
            neg = side_inside(p.lambda_minus, k, a);
        } else {
            pos = side_outside(p.lambda_plus, k, a);
            neg = side_outside(p.lambda_minus, k, a);
        }
        const bool flip = (mode == MomentMode::signed_moment) && (k % 2 == 1);
        return pos + (flip ? -neg : neg);
    }
};

std::function<double(double)> checked_density(const LevyMeasureSpec& m) {
    return [density = m.density](double y) {
        const double v = density(y);
        if (!std::isfinite(v)) {
            throw MeasureEvaluationError("density evaluated non-finite at y=" +
                                         std::to_string(y));
        }
        return v;
    };
}

// One-sided moment by quadrature: int over (lo_bound, hi_bound] of
// y^k * density(sign*y), with singularity handling when the range touches 0.
double side_moment_quad(const LevyMeasureSpec& m, int sign, int k, double lo,
                        double hi) {
    const auto dens = checked_density(m);
    const auto f = [dens, sign, k](double y) {
        return std::pow(y, k) * dens(sign * y);
    };
    const double side_hi = (sign > 0) ? m.support_hi : -m.support_lo;
    hi = std::min(hi, side_hi);
    if (hi <= lo) return 0.0;
    if (lo > 0.0) return integrate_doubling(f, lo, hi, m.quad_tol);
    // Range touches the origin: split a smooth outer part off first.
    const double split = std::min(1.0, hi);
    double value = integrate_to_zero(f, split, m.quad_tol);
    if (hi > split) value += integrate_doubling(f, split, hi, m.quad_tol);
    return value;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double tail_mass(const LevyMeasureSpec& measure, double cutoff) {
    if (!(cutoff > 0.0)) {
        throw MeasureEvaluationError("tail_mass requires cutoff > 0");
    }
    if (measure.tail_hook) return measure.tail_hook(cutoff);
    return side_moment_quad(measure, +1, 0, cutoff, kInf) +
           side_moment_quad(measure, -1, 0, cutoff, kInf);
}

double partial_moment(const LevyMeasureSpec& measure, int k, Region region,
                      double a, MomentMode mode) {
    if (k < 1) throw MeasureEvaluationError("partial_moment requires k >= 1");
    if (a < 0.0) throw MeasureEvaluationError("partial_moment requires a >= 0");
    if (region == Region::inside && a == 0.0) return 0.0;
    if (measure.moment_hook) return measure.moment_hook(k, region, a, mode);

    double pos, neg;
    if (region == Region::inside) {
        pos = side_moment_quad(measure, +1, k, 0.0, a);
        neg = side_moment_quad(measure, -1, k, 0.0, a);
    } else {
        pos = side_moment_quad(measure, +1, k, a, kInf);
        neg = side_moment_quad(measure, -1, k, a, kInf);
    }
    const bool flip = (mode == MomentMode::signed_moment) && (k % 2 == 1);
    return pos + (flip ? -neg : neg);
}

// ---------------------------------------------------------------------------
// TailSampler

double TailSampler::Side::invert(double target_mass) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), target_mass);
    size_t idx = static_cast<size_t>(std::distance(cum.begin(), it));
    if (idx == 0) idx = 1;
    if (idx >= cum.size()) idx = cum.size() - 1;
    const double c0 = cum[idx - 1], c1 = cum[idx];
    const double y0 = grid[idx - 1], y1 = grid[idx];
    if (!(c1 > c0)) return y1;
    const double t = (target_mass - c0) / (c1 - c0);
    return y0 + t * (y1 - y0);
}

TailSampler::TailSampler(const LevyMeasureSpec& measure, double cutoff,
                         int points_per_side)
    : cutoff_(cutoff) {
    if (!(cutoff > 0.0)) throw DegenerateTailError("tail sampler requires cutoff > 0");
    const auto dens = checked_density(measure);

    // Table edge: the smallest y with nu(|.| > y) below 1e-12 * nu(|.| > 1)
    // (the integration support can reach further out).
    double table_edge = std::numeric_limits<double>::infinity();
    const double ref = tail_mass(measure, 1.0);
    if (ref > 0.0) {
        double hi = std::max(1.0, 2.0 * cutoff);
        const double target = 1e-12 * ref;
        const double support_cap =
            std::max(measure.support_hi, -measure.support_lo);
        while (hi < support_cap && tail_mass(measure, hi) >= target) hi *= 2.0;
        double lo = hi * 0.5;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (tail_mass(measure, mid) >= target ? lo : hi) = mid;
        }
        table_edge = hi;
    }

    const auto build_side = [&](int sign, Side& side) {
        const double hi = std::min(
            (sign > 0) ? measure.support_hi : -measure.support_lo, table_edge);
        if (!(hi > cutoff)) return;
        const int n = std::max(points_per_side, 8);
        side.grid.resize(n);
        side.cum.resize(n);
        const double ratio = std::pow(hi / cutoff, 1.0 / (n - 1));
        for (int i = 0; i < n; ++i) {
            side.grid[i] = cutoff * std::pow(ratio, i);
        }
        side.grid.back() = hi;
        side.cum[0] = 0.0;
        const auto f = [&](double y) { return dens(sign * y); };
        double errs = 0.0;
        for (int i = 1; i < n; ++i) {
            const auto [cell, err] = integrate_panel(f, side.grid[i - 1], side.grid[i]);
            errs += err;
            side.cum[i] = side.cum[i - 1] + std::max(cell, 0.0);
        }
        side.mass = side.cum.back();
        if (errs > 1e-6 * side.mass && side.mass > 0.0) {
            throw ToleranceError("tail sampler CDF table failed to converge", side.mass);
        }
    };

    build_side(+1, pos_);
    build_side(-1, neg_);
    total_mass_ = pos_.mass + neg_.mass;
    if (!(total_mass_ > 0.0) || !std::isfinite(total_mass_)) {
        throw DegenerateTailError("tail mass below tolerance at cutoff " +
                                  std::to_string(cutoff));
    }
}

double TailSampler::sample_from_uniform(double u) const {
    const double r = u * total_mass_;
    if (r < neg_.mass) return -neg_.invert(r);
    return pos_.invert(std::min(r - neg_.mass, pos_.mass));
}

double TailSampler::sample(RngStream& stream) const {
    return sample_from_uniform(stream.next_uniform());
}

double sample_tail(const LevyMeasureSpec& measure, double cutoff, RngStream& stream) {
    std::shared_ptr<const TailSampler> sampler;
    {
        std::lock_guard<std::mutex> lock(measure.sampler_cache->mutex);
        sampler = measure.sampler_cache->sampler;
        if (!sampler || sampler->cutoff() != cutoff) {
            sampler = std::make_shared<const TailSampler>(measure, cutoff);
            measure.sampler_cache->sampler = sampler;
        }
    }
    return sampler->sample(stream);
}

// ---------------------------------------------------------------------------
// Factories

LevyMeasureSpec cgmy_measure(const CgmyParams& params, double quad_tol) {
    if (!(params.c > 0.0) || !(params.alpha > 0.0) || !(params.alpha < 2.0) ||
        !(params.lambda_plus > 0.0) || !(params.lambda_minus > 0.0)) {
        throw MeasureEvaluationError(
            "CGMY parameters require c > 0, alpha in (0,2), tempering rates > 0");
    }
    CgmyForms forms{params};

    LevyMeasureSpec spec;
    spec.quad_tol = quad_tol;
    spec.cgmy = params;
    spec.density = [p = params](double y) {
        const double ay = std::abs(y);
        const double lam = (y > 0.0) ? p.lambda_plus : p.lambda_minus;
        return p.c * std::exp(-lam * ay) / std::pow(ay, 1.0 + p.alpha);
    };
    spec.tail_hook = [forms](double c) { return forms.tail(c); };
    spec.moment_hook = [forms](int k, Region region, double a, MomentMode mode) {
        return forms.moment(k, region, a, mode);
    };

    // Integration truncation: far enough out that even 5th moments keep
    // ~1e-12 headroom (the 1e-12 tail-table rule lives in TailSampler).
    const double threshold = 0.5e-18 * forms.tail(1.0);
    const auto side_edge = [&](double lam) {
        double hi = 1.0;
        while (forms.side_tail(lam, hi) > threshold && hi < 1e6) hi *= 2.0;
        double lo = hi * 0.5;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (forms.side_tail(lam, mid) > threshold ? lo : hi) = mid;
        }
        return hi;
    };
    spec.support_hi = side_edge(params.lambda_plus);
    spec.support_lo = -side_edge(params.lambda_minus);
    return spec;
}

LevyMeasureSpec density_measure(std::function<double(double)> density,
                                double support_lo, double support_hi,
                                double quad_tol) {
    if (!(support_lo < support_hi) || !std::isfinite(support_lo) ||
        !std::isfinite(support_hi)) {
        throw MeasureEvaluationError("density_measure requires finite support_lo < support_hi");
    }
    LevyMeasureSpec spec;
    spec.density = std::move(density);
    spec.support_lo = support_lo;
    spec.support_hi = support_hi;
    spec.quad_tol = quad_tol;
    return spec;
}

LevyMeasureSpec table_measure(std::vector<double> ys, std::vector<double> densities,
                              double quad_tol) {
    if (ys.size() < 2 || ys.size() != densities.size()) {
        throw MeasureEvaluationError("table_measure requires matching grids with >= 2 points");
    }
    for (size_t i = 0; i < ys.size(); ++i) {
        if (i > 0 && !(ys[i] > ys[i - 1])) {
            throw MeasureEvaluationError("table_measure grid must be strictly increasing");
        }
        if (!(densities[i] >= 0.0) || !std::isfinite(densities[i])) {
            throw MeasureEvaluationError("table_measure densities must be finite and >= 0");
        }
    }
    const double lo = ys.front(), hi = ys.back();
    auto interp = [ys = std::move(ys), densities = std::move(densities)](double y) {
        if (y < ys.front() || y > ys.back()) return 0.0;
        const auto it = std::upper_bound(ys.begin(), ys.end(), y);
        const size_t idx = std::min<size_t>(
            std::max<ptrdiff_t>(1, std::distance(ys.begin(), it)), ys.size() - 1);
        const double t = (y - ys[idx - 1]) / (ys[idx] - ys[idx - 1]);
        return densities[idx - 1] + t * (densities[idx] - densities[idx - 1]);
    };
    return density_measure(std::move(interp), lo, hi, quad_tol);
}

}  // namespace levysim
