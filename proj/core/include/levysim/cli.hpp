#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "levysim/jump_adapted.hpp"
#include "levysim/mc.hpp"

namespace levysim::cli {

struct MeasureConfig {
    std::string kind;  // "cgmy" | "table"
    CgmyParams cgmy{0.0, 0.0, 0.0, 0.0};
    std::string table_file;
};

struct ModelConfig {
    double gamma0 = 0.0;
    double sigma0 = 0.0;
    std::string h_kind = "linear";  // "linear" | "constant"
    double x0 = 1.0;
    bool martingale = true;
    double mu_z = 0.0;  // used when martingale = false
};

struct RunConfig {
    std::vector<int> orders{2, 3, 4};
    std::vector<SchemeKind> schemes{SchemeKind::wt1, SchemeKind::wt2, SchemeKind::nv};
    std::vector<double> lambdas{1.0};
    long paths = 10000;
    uint64_t seed = 1;
    std::string payoff_kind = "identity";  // "identity" | "square" | "poly"
    std::vector<double> payoff_coeffs;     // poly coefficients, constant term first
    std::optional<double> reference;
    int substeps = 1;
    bool match_third_moment = false;
};

struct ExperimentConfig {
    MeasureConfig measure;
    ModelConfig model;
    RunConfig run;
    std::string out;
    std::string path;  // config file location
};

// Flat INI-style config (sections [measure], [model], [run], [output]).
// Throws ConfigError naming the offending field on any validation failure.
ExperimentConfig load_config(const std::string& path);

LevyMeasureSpec make_measure(const MeasureConfig& measure);
LevyModel make_model(const ExperimentConfig& config);
Payoff make_payoff(const RunConfig& run);

// Closed-form E[f(X_1)] for the identity/square payoffs in the stochastic
// exponential setting (h linear, martingale Z); nullopt otherwise.
std::optional<double> closed_form_reference(const ExperimentConfig& config);

std::string approx_json(const FiniteApprox& approx, double gamma_bar);
// Parse + re-serialize (round-trip stability check).
std::string reserialize_approx_json(const std::string& text);

std::string sweep_csv(const std::vector<SweepRecord>& records);
std::string rates_csv(const RateCurve& curve);

// Entry point behind the `levysim` binary. args excludes the program name.
// Returns the process exit status; on failure writes a single-line JSON
// error record to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levysim::cli
