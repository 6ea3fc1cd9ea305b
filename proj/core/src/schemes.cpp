#include "levysim/schemes.hpp"

#include <cmath>

#include "levysim/errors.hpp"
#include "levysim/jump_adapted.hpp"

namespace levysim {

// ---------------------------------------------------------------------------
// Coefficients

Coefficient Coefficient::affine_fn(double a, double c) {
    Coefficient coeff;
    coeff.f = [a, c](double x) { return a * x + c; };
    coeff.df = [a](double) { return a; };
    coeff.d2f = [](double) { return 0.0; };
    coeff.affine = {{a, c}};
    return coeff;
}

Coefficient Coefficient::linear(double a) { return affine_fn(a, 0.0); }

Coefficient Coefficient::constant(double c) { return affine_fn(0.0, c); }

Coefficient Coefficient::analytic(std::function<double(double)> f,
                                  std::function<double(double)> df,
                                  std::function<double(double)> d2f) {
    Coefficient coeff;
    coeff.f = std::move(f);
    coeff.df = std::move(df);
    coeff.d2f = std::move(d2f);
    return coeff;
}

Coefficient Coefficient::from_function(std::function<double(double)> f) {
    Coefficient coeff;
    coeff.f = f;
    coeff.df = [f](double x) {
        const double h = 1e-5 * (1.0 + std::abs(x));
        return (f(x + h) - f(x - h)) / (2.0 * h);
    };
    coeff.d2f = [f](double x) {
        const double h = 1e-5 * (1.0 + std::abs(x));
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    };
    return coeff;
}

Coefficient Coefficient::scaled(const Coefficient& base, double factor) {
    Coefficient coeff;
    coeff.f = [g = base.f, factor](double x) { return factor * g(x); };
    coeff.df = [g = base.df, factor](double x) { return factor * g(x); };
    coeff.d2f = [g = base.d2f, factor](double x) { return factor * g(x); };
    if (base.affine) {
        coeff.affine = {{factor * base.affine->first, factor * base.affine->second}};
    }
    return coeff;
}

// ---------------------------------------------------------------------------
// Effective drift

EffectiveDrift effective_drift(const LevyModel& model, const FiniteApprox& approx) {
    // gamma_bar = mu_Z + int_{|y|>1} y nu(dy) - int_R y nu_bar(dy), where the
    // nu_bar integral is the truncated-tail part plus the atoms.
    const double big_jump_mean =
        partial_moment(model.measure, 1, Region::outside, 1.0, MomentMode::signed_moment);
    double approx_mean = approx.atom_moment(1);
    if (approx.cutoff > 0.0) {
        approx_mean += partial_moment(model.measure, 1, Region::outside, approx.cutoff,
                                      MomentMode::signed_moment);
    }
    const double gamma_bar = model.mu_z + big_jump_mean - approx_mean;

    EffectiveDrift drift;
    drift.gamma_bar = gamma_bar;
    const Coefficient& b = model.coeffs.b;
    const Coefficient& h = model.coeffs.h;
    drift.b_bar.f = [bf = b.f, hf = h.f, gamma_bar](double x) {
        return bf(x) + gamma_bar * hf(x);
    };
    drift.b_bar.df = [bdf = b.df, hdf = h.df, gamma_bar](double x) {
        return bdf(x) + gamma_bar * hdf(x);
    };
    drift.b_bar.d2f = [bd2 = b.d2f, hd2 = h.d2f, gamma_bar](double x) {
        return bd2(x) + gamma_bar * hd2(x);
    };
    if (b.affine && h.affine) {
        drift.b_bar.affine = {{b.affine->first + gamma_bar * h.affine->first,
                               b.affine->second + gamma_bar * h.affine->second}};
    }
    return drift;
}

// ---------------------------------------------------------------------------
// Scheme registry

SchemeKind parse_scheme(std::string_view name) {
    if (name == "wt1") return SchemeKind::wt1;
    if (name == "wt2") return SchemeKind::wt2;
    if (name == "nv") return SchemeKind::nv;
    throw UnsupportedSchemeError("scheme \"" + std::string(name) +
                                 "\" is not supported (choose wt1, wt2 or nv)");
}

std::string scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::wt1: return "wt1";
        case SchemeKind::wt2: return "wt2";
        case SchemeKind::nv: return "nv";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// ODE flow

double ode_flow(const VectorField& field, double x, double t, double h_max) {
    if (t == 0.0) return x;
    if (field.affine) {
        const double a = field.affine->first, c = field.affine->second;
        if (std::abs(a) < 1e-300) return x + c * t;
        const double growth = std::exp(a * t);
        return growth * x + c * std::expm1(a * t) / a;
    }
    if (!(h_max > 0.0)) throw FlowError("ode_flow requires h_max > 0");
    const int n = static_cast<int>(std::ceil(std::abs(t) / h_max));
    const double h = t / n;
    double y = x;
    for (int i = 0; i < n; ++i) {
        const double k1 = field.f(y);
        const double k2 = field.f(y + 0.5 * h * k1);
        const double k3 = field.f(y + 0.5 * h * k2);
        const double k4 = field.f(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(y)) {
            throw FlowError("ODE flow diverged (non-finite state after substep " +
                            std::to_string(i + 1) + ")");
        }
    }
    return y;
}

// ---------------------------------------------------------------------------
// One-step maps

double wt1_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                      double x, double dt, double xi) {
    return x + drift.b_bar(x) * dt + coeffs.sigma(x) * std::sqrt(dt) * xi;
}

double wt2_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                      double x, double dt, double dw) {
    const double a = drift.b_bar(x);
    const double ap = drift.b_bar.df(x);
    const double app = drift.b_bar.d2f(x);
    const double s = coeffs.sigma(x);
    const double sp = coeffs.sigma.df(x);
    const double spp = coeffs.sigma.d2f(x);
    return x + a * dt + s * dw + 0.5 * s * sp * (dw * dw - dt) +
           0.5 * (ap * s + a * sp + 0.5 * spp * s * s) * dw * dt +
           0.5 * (a * ap + 0.5 * app * s * s) * dt * dt;
}

namespace {

VectorField stratonovich_drift_field(const SdeCoefficients& coeffs,
                                     const EffectiveDrift& drift) {
    VectorField v0;
    v0.f = [bbar = drift.b_bar.f, sf = coeffs.sigma.f, sdf = coeffs.sigma.df](double x) {
        return bbar(x) - 0.5 * sf(x) * sdf(x);
    };
    if (drift.b_bar.affine && coeffs.sigma.affine) {
        const auto [ab, cb] = *drift.b_bar.affine;
        const auto [as, cs] = *coeffs.sigma.affine;
        // sigma * sigma' = as^2 x + as * cs is affine as well.
        v0.affine = {{ab - 0.5 * as * as, cb - 0.5 * as * cs}};
    }
    return v0;
}

}  // namespace

double nv_step_given(const SdeCoefficients& coeffs, const EffectiveDrift& drift,
                     double x, double dt, double xi) {
    const VectorField v0 = stratonovich_drift_field(coeffs, drift);
    VectorField v1;
    v1.f = coeffs.sigma.f;
    v1.affine = coeffs.sigma.affine;
    const double h_max = dt / 4.0;
    double y = ode_flow(v0, x, 0.5 * dt, h_max);
    y = ode_flow(v1, y, std::sqrt(dt) * xi, h_max);
    return ode_flow(v0, y, 0.5 * dt, h_max);
}

double wt1_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift, double x,
                double dt, RngStream& stream) {
    return wt1_step_given(coeffs, drift, x, dt, stream.next_normal());
}

double wt2_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift, double x,
                double dt, RngStream& stream) {
    return wt2_step_given(coeffs, drift, x, dt, stream.next_three_point(dt));
}

double nv_step(const SdeCoefficients& coeffs, const EffectiveDrift& drift, double x,
               double dt, RngStream& stream) {
    return nv_step_given(coeffs, drift, x, dt, stream.next_normal());
}

double scheme_step(SchemeKind kind, const SdeCoefficients& coeffs,
                   const EffectiveDrift& drift, double x, double dt,
                   RngStream& stream) {
    switch (kind) {
        case SchemeKind::wt1: return wt1_step(coeffs, drift, x, dt, stream);
        case SchemeKind::wt2: return wt2_step(coeffs, drift, x, dt, stream);
        case SchemeKind::nv: return nv_step(coeffs, drift, x, dt, stream);
    }
    throw UnsupportedSchemeError("unknown scheme kind");
}

double evolve_leg(SchemeKind kind, const SdeCoefficients& coeffs,
                  const EffectiveDrift& drift, double x, double duration,
                  int substeps, RngStream& stream) {
    if (duration <= 0.0) return x;
    const int n = std::max(substeps, 1);
    const double dt = duration / n;
    double y = x;
    for (int i = 0; i < n; ++i) y = scheme_step(kind, coeffs, drift, y, dt, stream);
    return y;
}

}  // namespace levysim
