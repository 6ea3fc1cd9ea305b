#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "levysim/rng.hpp"

namespace levysim {

struct FiniteApprox;
struct LevyModel;

// Scalar coefficient with first and second derivatives. When the function is
// exactly affine, `affine = {a, c}` (f(x) = a*x + c) lets the NV flows use
// the closed-form solution.
struct Coefficient {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
    std::optional<std::pair<double, double>> affine;

    double operator()(double x) const { return f(x); }

    static Coefficient linear(double a);
    static Coefficient constant(double c);
    static Coefficient affine_fn(double a, double c);
    // Analytic derivatives supplied by the caller.
    static Coefficient analytic(std::function<double(double)> f,
                                std::function<double(double)> df,
                                std::function<double(double)> d2f);
    // Finite-difference fallback for user-defined coefficients
    // (central differences, step 1e-5 * (1 + |x|)).
    static Coefficient from_function(std::function<double(double)> f);
    static Coefficient scaled(const Coefficient& base, double factor);
};

struct SdeCoefficients {
    Coefficient b;
    Coefficient sigma;
    Coefficient h;
};

// Drift compensation: b_bar(x) = b(x) + gamma_bar * h(x), with
// gamma_bar = mu_Z + int_{|y|>1} y nu(dy) - int_R y nu_bar(dy).
struct EffectiveDrift {
    double gamma_bar = 0.0;
    Coefficient b_bar;
};

EffectiveDrift effective_drift(const LevyModel& model, const FiniteApprox& approx);

enum class SchemeKind { wt1, wt2, nv };

// Accepts "wt1", "wt2", "nv"; rejects wt3/klv3/klv5 (and anything else) with
// UnsupportedSchemeError.
SchemeKind parse_scheme(std::string_view name);
std::string scheme_name(SchemeKind kind);

struct StepperConfig {
    int substeps = 1;  // equal substeps per inter-jump leg
};

struct VectorField {
    std::function<double(double)> f;
    std::optional<std::pair<double, double>> affine;
};

// Time-t solution map of dy/ds = field(y). Affine fields are solved in
// closed form; otherwise classical RK4 with ceil(|t|/h_max) substeps.
// Throws FlowError when the state leaves the finite range.
double ode_flow(const VectorField& field, double x, double t, double h_max);

// Deterministic one-step maps given the injected noise; these are what the
// weak-order analysis evaluates.
double wt1_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                      double x, double dt, double xi);
double wt2_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                      double x, double dt, double dw);
double nv_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                     double x, double dt, double xi);

// Sampling wrappers: wt1/nv draw one standard normal, wt2 one three-point
// increment.
double wt1_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                double x, double dt, RngStream& stream);
double wt2_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                double x, double dt, RngStream& stream);
double nv_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
               double x, double dt, RngStream& stream);

double scheme_step(SchemeKind kind, const SdeCoefficients& coeffs,
                   const EffectiveDrift& drift, double x, double dt,
                   RngStream& stream);

// Evolves over `duration` using `substeps` equal scheme steps.
double evolve_leg(SchemeKind kind, const SdeCoefficients& coeffs,
                  const EffectiveDrift& drift, double x, double duration,
                  int substeps, RngStream& stream);

}  // namespace levysim
