#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "levysim/jump_adapted.hpp"
#include "levysim/mc.hpp"
#include "test_util.hpp"

using namespace levysim;
using testutil::dataset1;
using testutil::dataset2;

namespace {

FiniteApprox zero_intensity(const LevyMeasureSpec& measure) {
    FiniteApprox a;
    a.base = measure;
    a.cutoff = 0.0;
    a.epsilon = 0.0;
    a.lambda_total = 0.0;
    a.order = 2;
    return a;
}

}  // namespace

TEST_SUITE_BEGIN("jump_adapted");

TEST_CASE("zero intensity collapses to one continuous leg") {
    const auto measure = cgmy_measure(dataset1());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = zero_intensity(measure);
    const PathSimulator sim(model, approx, SchemeKind::wt2, StepperConfig{3});

    RngStream a = stream_for(21, 0);
    RngStream twin = a;
    const PathOutcome outcome = sim.run(a);
    CHECK(outcome.n_jumps == 0);
    const double direct =
        evolve_leg(SchemeKind::wt2, model.coeffs, sim.drift(), model.x0, 1.0, 3, twin);
    CHECK(outcome.x_final == direct);
}

TEST_CASE("h = 0 makes jumps no-ops but still counted") {
    const auto measure = cgmy_measure(dataset1());
    LevyModel model;
    model.coeffs.b = Coefficient::linear(0.5);
    model.coeffs.sigma = Coefficient::linear(0.3);
    model.coeffs.h = Coefficient::constant(0.0);
    model.measure = measure;
    model.mu_z = martingale_mu_z(measure);
    model.x0 = 1.0;
    const auto approx = build_oa2(measure, 2.0);

    // NV legs are exact for the linear dynamics, so E[X_1] = e^{0.5} exactly.
    const MCResult r = estimate(model, approx, SchemeKind::nv, StepperConfig{},
                                [](double x) { return x; }, 20000, 424242);
    CHECK(std::abs(r.estimate - std::exp(0.5)) < 3.5 * r.std_error);

    RngStream s = stream_for(3, 5);
    const PathOutcome outcome = simulate_path(model, approx, SchemeKind::nv, {}, s);
    CHECK(outcome.n_jumps >= 0);
}

TEST_CASE("martingale canary, NV exact scheme at unit substeps") {
    const auto measure = cgmy_measure(dataset1());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_oa4(measure, 4.0);
    const MCResult r = estimate(model, approx, SchemeKind::nv, StepperConfig{},
                                [](double x) { return x; }, 100000, 777001);
    CHECK(std::abs(r.estimate - std::exp(0.5)) < 3.0 * r.std_error);
}

TEST_CASE("martingale canary, WT1 with substeps") {
    // WT1 carries O(1/lambda) scheme bias of its own; substeps isolate the
    // drift-compensation property the canary is after.
    const auto measure = cgmy_measure(dataset2());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_oa2(measure, 2.0);
    const MCResult r = estimate(model, approx, SchemeKind::wt1, StepperConfig{64},
                                [](double x) { return x; }, 30000, 777002);
    CHECK(std::abs(r.estimate - std::exp(0.5)) < 4.0 * r.std_error);
}

TEST_CASE("expected jump count") {
    const auto measure = cgmy_measure(dataset1());
    const auto approx = build_oa2(measure, 4.0);
    CHECK(expected_jump_count(approx) == 4.0);
    CHECK(expected_jump_count(zero_intensity(measure)) == 0.0);

    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const PathSimulator sim(model, approx, SchemeKind::wt1, StepperConfig{});
    const long n = 100000;
    double jumps = 0.0;
    for (long i = 0; i < n; ++i) {
        RngStream s = stream_for(99, static_cast<uint64_t>(i));
        jumps += static_cast<double>(sim.run(s).n_jumps);
    }
    const double se = std::sqrt(4.0 / static_cast<double>(n));
    CHECK(std::abs(jumps / n - 4.0) < 3.0 * se);
}

TEST_CASE("jump counts follow a Poisson law") {
    const auto measure = cgmy_measure(dataset2());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_oa3(measure, 4.0);
    const PathSimulator sim(model, approx, SchemeKind::wt1, StepperConfig{});

    const int max_bin = 12;  // counts >= 13 pooled
    std::vector<long> observed(max_bin + 2, 0);
    const long n = 100000;
    for (long i = 0; i < n; ++i) {
        RngStream s = stream_for(1234, static_cast<uint64_t>(i));
        const long k = sim.run(s).n_jumps;
        ++observed[static_cast<size_t>(std::min<long>(k, max_bin + 1))];
    }
    const boost::math::poisson_distribution<double> pois(4.0);
    double chi2 = 0.0;
    double tail_prob = 1.0;
    for (int k = 0; k <= max_bin; ++k) {
        const double p = boost::math::pdf(pois, k);
        tail_prob -= p;
        const double expct = p * n;
        chi2 += (observed[k] - expct) * (observed[k] - expct) / expct;
    }
    const double tail_expct = tail_prob * n;
    chi2 += (observed[max_bin + 1] - tail_expct) * (observed[max_bin + 1] - tail_expct) /
            tail_expct;
    const boost::math::chi_squared_distribution<double> chi(max_bin + 1);
    CHECK(chi2 < boost::math::quantile(chi, 0.99));
}

TEST_CASE("paths are deterministic in (seed, index)") {
    const auto measure = cgmy_measure(dataset2());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_oa4(measure, 8.0);
    const PathSimulator sim(model, approx, SchemeKind::wt2, StepperConfig{2});
    for (uint64_t idx : {0ull, 17ull, 400ull}) {
        RngStream a = stream_for(31337, idx);
        RngStream b = stream_for(31337, idx);
        const PathOutcome pa = sim.run(a);
        const PathOutcome pb = sim.run(b);
        CHECK(pa.x_final == pb.x_final);
        CHECK(pa.n_jumps == pb.n_jumps);
    }
}

TEST_CASE("trace is a strictly increasing time series ending at 1") {
    const auto measure = cgmy_measure(dataset1());
    const auto model = make_exponential_model(measure, 0.5, 0.3);
    const auto approx = build_oa3(measure, 6.0);
    RngStream s = stream_for(5150, 2);
    const PathOutcome outcome =
        simulate_path(model, approx, SchemeKind::nv, {}, s, /*record_trace=*/true);
    REQUIRE(outcome.trace.size() >= 2);
    CHECK(outcome.trace.front().first == 0.0);
    CHECK(outcome.trace.front().second == model.x0);
    CHECK(outcome.trace.back().first == 1.0);
    CHECK(outcome.trace.back().second == outcome.x_final);
    for (size_t i = 1; i < outcome.trace.size(); ++i) {
        CHECK(outcome.trace[i].first > outcome.trace[i - 1].first);
    }
    CHECK(static_cast<long>(outcome.trace.size()) == outcome.n_jumps + 2);
}

TEST_SUITE_END();
