#include "levysim/jump_adapted.hpp"

#include <cmath>
#include <sstream>

#include "levysim/errors.hpp"

namespace levysim {

double martingale_mu_z(const LevyMeasureSpec& measure) {
    return -partial_moment(measure, 1, Region::outside, 1.0, MomentMode::signed_moment);
}

LevyModel make_exponential_model(const LevyMeasureSpec& measure, double gamma0,
                                 double sigma0, Coefficient h, double x0,
                                 std::optional<double> mu_z) {
    LevyModel model;
    model.coeffs.b = Coefficient::scaled(h, gamma0);
    model.coeffs.sigma = Coefficient::scaled(h, sigma0);
    model.coeffs.h = h;
    model.measure = measure;
    model.mu_z = mu_z ? *mu_z : martingale_mu_z(measure);
    model.x0 = x0;
    return model;
}

PathSimulator::PathSimulator(LevyModel model, FiniteApprox approx, SchemeKind scheme,
                             StepperConfig config)
    : model_(std::move(model)),
      approx_(std::move(approx)),
      scheme_(scheme),
      config_(config),
      drift_(effective_drift(model_, approx_)) {
    double cum = 0.0;
    for (const auto& atom : approx_.atoms) {
        cum += atom.mass;
        atom_cum_.push_back(cum);
    }
    tail_mass_ = approx_.lambda_total - cum;
    if (tail_mass_ > 1e-12 * std::max(1.0, approx_.lambda_total)) {
        tail_ = std::make_shared<const TailSampler>(approx_.base, approx_.cutoff);
    } else {
        tail_mass_ = 0.0;
    }
}

double PathSimulator::draw_jump(RngStream& stream) const {
    // Atoms first by cumulative mass (list order breaks ties), then the tail.
    const double r = stream.next_uniform() * approx_.lambda_total;
    for (size_t i = 0; i < atom_cum_.size(); ++i) {
        if (r < atom_cum_[i]) return approx_.atoms[i].location;
    }
    if (!tail_) {
        return approx_.atoms.empty() ? 0.0 : approx_.atoms.back().location;
    }
    const double atom_total = atom_cum_.empty() ? 0.0 : atom_cum_.back();
    double v = (r - atom_total) / tail_mass_;
    v = std::min(std::max(v, 0.0), 1.0 - 1e-16);
    return tail_->sample_from_uniform(v);
}

PathOutcome PathSimulator::run(RngStream& stream, bool record_trace) const {
    PathOutcome outcome;
    double x = model_.x0;
    double t_last = 0.0;
    const double lambda = approx_.lambda_total;
    if (record_trace) outcome.trace.emplace_back(0.0, x);

    const auto evolve = [&](double from, double duration) {
        try {
            return evolve_leg(scheme_, model_.coeffs, drift_, x, duration,
                              config_.substeps, stream);
        } catch (const FlowError& e) {
            std::ostringstream msg;
            msg << e.what() << " (leg starting at t=" << from << ")";
            throw FlowError(msg.str());
        }
    };

    if (lambda > 0.0) {
        double gap = stream.next_exponential(lambda);
        while (gap < 1.0 - t_last) {
            x = evolve(t_last, gap);
            const double jump = draw_jump(stream);
            x = x + model_.coeffs.h(x) * jump;
            t_last += gap;
            ++outcome.n_jumps;
            if (record_trace) outcome.trace.emplace_back(t_last, x);
            gap = stream.next_exponential(lambda);
        }
    }
    x = evolve(t_last, 1.0 - t_last);
    if (record_trace) outcome.trace.emplace_back(1.0, x);
    outcome.x_final = x;
    return outcome;
}

PathOutcome simulate_path(const LevyModel& model, const FiniteApprox& approx,
                          SchemeKind scheme, const StepperConfig& config,
                          RngStream& stream, bool record_trace) {
    const PathSimulator simulator(model, approx, scheme, config);
    return simulator.run(stream, record_trace);
}

double expected_jump_count(const FiniteApprox& approx) { return approx.lambda_total; }

}  // namespace levysim
