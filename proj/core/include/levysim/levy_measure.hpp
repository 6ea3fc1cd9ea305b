#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "levysim/rng.hpp"

namespace levysim {

// Integration region relative to a bound a: inside = {0 < |y| <= a},
// outside = {|y| > a}.
enum class Region { inside, outside };

enum class MomentMode { signed_moment, absolute_moment };

// Tempered-stable (CGMY) parameters: density
//   nu(y) = c * ( e^{-lambda_minus |y|} 1_{y<0} + e^{-lambda_plus |y|} 1_{y>0} ) / |y|^{1+alpha}.
struct CgmyParams {
    double c;
    double alpha;         // activity index, (0, 2)
    double lambda_plus;   // right tempering rate, > 0
    double lambda_minus;  // left tempering rate, > 0
};

class TailSampler;

namespace detail {
struct SamplerCache {
    std::mutex mutex;
    std::shared_ptr<const TailSampler> sampler;  // keyed by its cutoff
};
}  // namespace detail

// An infinite-activity Levy measure given by its density, with optional
// closed-form hooks for tail masses and partial moments. Instances are
// immutable after construction and safe to share across threads; the
// inverse-CDF tail-sampling table is built once per cutoff behind a mutex
// and shared thereafter.
struct LevyMeasureSpec {
    std::function<double(double)> density;  // evaluated for y != 0
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();
    double quad_tol = 1e-10;  // relative quadrature tolerance

    // Optional closed-form hooks; contracts identical to tail_mass /
    // partial_moment below. Generic quadrature is the always-on fallback.
    std::function<double(double)> tail_hook;
    std::function<double(int, Region, double, MomentMode)> moment_hook;

    std::optional<CgmyParams> cgmy;

    std::shared_ptr<detail::SamplerCache> sampler_cache =
        std::make_shared<detail::SamplerCache>();
};

// nu(|y| > cutoff), cutoff > 0.
double tail_mass(const LevyMeasureSpec& measure, double cutoff);

// Signed integral  int_region y^k nu(dy)  or absolute  int_region |y|^k nu(dy).
// Region::outside with a == 0 integrates the whole line. Throws
// DivergentMomentError when the moment does not exist.
double partial_moment(const LevyMeasureSpec& measure, int k, Region region,
                      double a, MomentMode mode);

// Tabulated inverse-CDF sampler for nu restricted to {|y| > cutoff},
// geometric grid per side from the cutoff to the support edge, linear
// interpolation in CDF space. Immutable after construction.
class TailSampler {
public:
    TailSampler(const LevyMeasureSpec& measure, double cutoff,
                int points_per_side = 2048);

    double sample(RngStream& stream) const;
    // Deterministic inverse CDF at u in (0,1); sample() draws one uniform
    // and delegates here.
    double sample_from_uniform(double u) const;

    double total_mass() const noexcept { return total_mass_; }
    double cutoff() const noexcept { return cutoff_; }

private:
    struct Side {
        std::vector<double> grid;  // |y| nodes, ascending from cutoff
        std::vector<double> cum;   // cumulative mass at nodes, cum[0] = 0
        double mass = 0.0;
        double invert(double target_mass) const;
    };

    Side pos_, neg_;
    double cutoff_ = 0.0;
    double total_mass_ = 0.0;
};

// Draws one jump from nu restricted to {|y| > cutoff}, using a cached
// sampler table (rebuilt when the cutoff changes).
double sample_tail(const LevyMeasureSpec& measure, double cutoff,
                   RngStream& stream);

// Factories.
LevyMeasureSpec cgmy_measure(const CgmyParams& params, double quad_tol = 1e-10);

LevyMeasureSpec density_measure(std::function<double(double)> density,
                                double support_lo, double support_hi,
                                double quad_tol = 1e-10);

// Piecewise-linear density sampled on an increasing grid (CLI kind = "table").
LevyMeasureSpec table_measure(std::vector<double> ys, std::vector<double> densities,
                              double quad_tol = 1e-10);

}  // namespace levysim
