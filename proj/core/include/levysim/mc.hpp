#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "levysim/jump_adapted.hpp"

namespace levysim {

struct MCResult {
    double estimate = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(paths)
    long paths = 0;
    uint64_t seed = 0;
    double wallclock_seconds = 0.0;
    std::optional<double> bias;  // estimate - reference, when a reference is given
};

struct SweepRecord {
    double lambda = 0.0;
    int order = 0;
    SchemeKind scheme = SchemeKind::wt1;
    double estimate = 0.0;
    double std_error = 0.0;
    double bias = 0.0;
    double wallclock_seconds = 0.0;
    double seconds_normalized = 0.0;  // wallclock * (std_error / target)^2
};

using Payoff = std::function<double(double)>;

// Monte Carlo estimate of E[f(X_1)] over `paths` independent paths.
// Deterministic (bit-identical) for fixed (seed, paths) regardless of the
// worker count: per-path streams are counter-based and the reduction runs
// over fixed-size blocks in index order. workers = 0 selects the machine
// parallelism. Throws TaintedEstimateError with the lowest failing path
// index when a payoff evaluates non-finite.
MCResult estimate(const LevyModel& model, const FiniteApprox& approx,
                  SchemeKind scheme, const StepperConfig& config,
                  const Payoff& payoff, long paths, uint64_t seed,
                  int workers = 0,
                  std::optional<double> reference = std::nullopt);

// Wallclock scaled to the cost of reaching `target_se` (the paper's figures
// normalize to a standard deviation of 0.001).
double normalized_seconds(double wallclock_seconds, double std_error,
                          double target_se = 1e-3);

// One record per (order, scheme, lambda); cells use decorrelated sub-seeds
// derived from `seed`.
std::vector<SweepRecord> convergence_sweep(
    const LevyModel& model, const std::vector<int>& orders,
    const std::vector<SchemeKind>& schemes, const std::vector<double>& lambda_grid,
    const Payoff& payoff, long paths, uint64_t seed, double reference,
    const StepperConfig& config = {}, int workers = 0,
    bool match_third_moment = false);

}  // namespace levysim
