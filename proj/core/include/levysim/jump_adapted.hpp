#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "levysim/approx.hpp"
#include "levysim/levy_measure.hpp"
#include "levysim/schemes.hpp"

namespace levysim {

// SDE problem instance on the unit horizon:
//   dX = b(X) dt + sigma(X) dB + h(X-) dZ,   X_0 = x0,
// where Z has Levy measure `measure` and drift mu_z (martingale default
// mu_z = -int_{|y|>1} y nu(dy)).
struct LevyModel {
    SdeCoefficients coeffs;
    LevyMeasureSpec measure;
    double mu_z = 0.0;
    double x0 = 1.0;
};

double martingale_mu_z(const LevyMeasureSpec& measure);

// Benchmark family b = gamma0*h, sigma = sigma0*h; with h(x) = x the solution
// is the stochastic exponential and E[X_1] = exp(gamma0) for martingale Z.
LevyModel make_exponential_model(const LevyMeasureSpec& measure, double gamma0,
                                 double sigma0,
                                 Coefficient h = Coefficient::linear(1.0),
                                 double x0 = 1.0,
                                 std::optional<double> mu_z = std::nullopt);

struct PathOutcome {
    double x_final = 0.0;
    long n_jumps = 0;
    std::vector<std::pair<double, double>> trace;  // (time, state), strictly increasing times
};

// Prepared jump-adapted simulator: alternates continuous weak steps over
// exponential inter-jump durations with jump applications x <- x + h(x)*D.
// Immutable and shareable across worker threads; all randomness comes from
// the per-path stream in the fixed order (jump time, scheme draws, jump size).
class PathSimulator {
public:
    PathSimulator(LevyModel model, FiniteApprox approx, SchemeKind scheme,
                  StepperConfig config);

    PathOutcome run(RngStream& stream, bool record_trace = false) const;

    double lambda() const noexcept { return approx_.lambda_total; }
    const EffectiveDrift& drift() const noexcept { return drift_; }
    const LevyModel& model() const noexcept { return model_; }

private:
    double draw_jump(RngStream& stream) const;

    LevyModel model_;
    FiniteApprox approx_;
    SchemeKind scheme_;
    StepperConfig config_;
    EffectiveDrift drift_;
    std::vector<double> atom_cum_;  // cumulative atom masses, atom list order
    std::shared_ptr<const TailSampler> tail_;
    double tail_mass_ = 0.0;
};

PathOutcome simulate_path(const LevyModel& model, const FiniteApprox& approx,
                          SchemeKind scheme, const StepperConfig& config,
                          RngStream& stream, bool record_trace = false);

// lambda = nu_bar(R), the mean number of jumps on [0,1].
double expected_jump_count(const FiniteApprox& approx);

}  // namespace levysim
