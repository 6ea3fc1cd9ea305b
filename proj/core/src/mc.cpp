#include "levysim/mc.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "levysim/errors.hpp"

namespace levysim {

namespace {

constexpr long kBlockSize = 8192;

struct BlockAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long bad_index = -1;  // lowest path index with a non-finite payoff
};

uint64_t mix_cell_seed(uint64_t seed, int order, SchemeKind scheme, size_t lambda_idx) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0x100 + static_cast<uint64_t>(order)));
    h = splitmix64(h ^ (0x1000 + static_cast<uint64_t>(scheme)));
    h = splitmix64(h ^ (0x10000 + static_cast<uint64_t>(lambda_idx)));
    return h;
}

}  // namespace

MCResult estimate(const LevyModel& model, const FiniteApprox& approx,
                  SchemeKind scheme, const StepperConfig& config,
                  const Payoff& payoff, long paths, uint64_t seed, int workers,
                  std::optional<double> reference) {
    if (paths < 2) throw MeasureEvaluationError("estimate requires at least 2 paths");
    const auto start = std::chrono::steady_clock::now();

    const PathSimulator simulator(model, approx, scheme, config);

    const long n_blocks = (paths + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAccumulator> blocks(static_cast<size_t>(n_blocks));
    std::atomic<long> next_block{0};

    const auto worker_fn = [&]() {
        for (;;) {
            const long blk = next_block.fetch_add(1, std::memory_order_relaxed);
            if (blk >= n_blocks) return;
            const long begin = blk * kBlockSize;
            const long end = std::min(begin + kBlockSize, paths);
            BlockAccumulator acc;
            for (long i = begin; i < end; ++i) {
                RngStream stream = stream_for(seed, static_cast<uint64_t>(i));
                const double value = payoff(simulator.run(stream).x_final);
                if (!std::isfinite(value)) {
                    if (acc.bad_index < 0) acc.bad_index = i;
                    continue;
                }
                acc.sum += value;
                acc.sum_sq += value * value;
            }
            blocks[static_cast<size_t>(blk)] = acc;
        }
    };

    int n_workers = workers > 0
                        ? workers
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_workers = static_cast<int>(std::min<long>(n_workers, n_blocks));
    if (n_workers <= 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    // Fixed block order keeps the reduction bit-identical across worker counts.
    double sum = 0.0, sum_sq = 0.0;
    long bad = -1;
    for (const auto& acc : blocks) {
        sum += acc.sum;
        sum_sq += acc.sum_sq;
        if (acc.bad_index >= 0 && (bad < 0 || acc.bad_index < bad)) bad = acc.bad_index;
    }
    if (bad >= 0) {
        throw TaintedEstimateError(
            "payoff evaluated non-finite on path " + std::to_string(bad), bad);
    }

    MCResult result;
    result.paths = paths;
    result.seed = seed;
    result.estimate = sum / static_cast<double>(paths);
    const double var =
        std::max(0.0, (sum_sq - static_cast<double>(paths) * result.estimate * result.estimate) /
                          static_cast<double>(paths - 1));
    result.std_error = std::sqrt(var / static_cast<double>(paths));
    result.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reference) result.bias = result.estimate - *reference;
    return result;
}

double normalized_seconds(double wallclock_seconds, double std_error, double target_se) {
    const double ratio = std_error / target_se;
    return wallclock_seconds * ratio * ratio;
}

std::vector<SweepRecord> convergence_sweep(const LevyModel& model,
                                           const std::vector<int>& orders,
                                           const std::vector<SchemeKind>& schemes,
                                           const std::vector<double>& lambda_grid,
                                           const Payoff& payoff, long paths,
                                           uint64_t seed, double reference,
                                           const StepperConfig& config, int workers,
                                           bool match_third_moment) {
    std::vector<SweepRecord> records;
    for (int order : orders) {
        for (size_t li = 0; li < lambda_grid.size(); ++li) {
            const double lambda = lambda_grid[li];
            const FiniteApprox approx =
                build_approx(model.measure, order, lambda, match_third_moment);
            for (SchemeKind scheme : schemes) {
                const uint64_t cell_seed = mix_cell_seed(seed, order, scheme, li);
                const MCResult r = estimate(model, approx, scheme, config, payoff,
                                            paths, cell_seed, workers, reference);
                SweepRecord rec;
                rec.lambda = lambda;
                rec.order = order;
                rec.scheme = scheme;
                rec.estimate = r.estimate;
                rec.std_error = r.std_error;
                rec.bias = r.estimate - reference;
                rec.wallclock_seconds = r.wallclock_seconds;
                rec.seconds_normalized = normalized_seconds(r.wallclock_seconds, r.std_error);
                records.push_back(rec);
            }
        }
    }
    return records;
}

}  // namespace levysim
