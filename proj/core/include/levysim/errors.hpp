#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace levysim {

// Root of the library error taxonomy. kind() is a stable machine-readable
// tag; the CLI serializes it into its error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct MeasureEvaluationError : Error {
    explicit MeasureEvaluationError(const std::string& w) : Error("measure-evaluation", w) {}
};

// Quadrature could not reach the requested tolerance; carries the estimate
// that was achieved.
struct ToleranceError : Error {
    ToleranceError(const std::string& w, double achieved)
        : Error("tolerance", w), achieved_estimate(achieved) {}
    double achieved_estimate;
};

struct DivergentMomentError : Error {
    explicit DivergentMomentError(const std::string& w) : Error("divergent-moment", w) {}
};

struct DegenerateTailError : Error {
    explicit DegenerateTailError(const std::string& w) : Error("degenerate-tail", w) {}
};

struct InfeasibleIntensityError : Error {
    explicit InfeasibleIntensityError(const std::string& w) : Error("infeasible-intensity", w) {}
};

struct BracketingError : Error {
    explicit BracketingError(const std::string& w) : Error("bracketing", w) {}
};

struct UnsupportedOrderError : Error {
    explicit UnsupportedOrderError(const std::string& w) : Error("unsupported-order", w) {}
};

struct UnsupportedSchemeError : Error {
    explicit UnsupportedSchemeError(const std::string& w) : Error("unsupported-scheme", w) {}
};

struct InvalidMomentsError : Error {
    explicit InvalidMomentsError(const std::string& w) : Error("invalid-moments", w) {}
};

struct FlowError : Error {
    explicit FlowError(const std::string& w) : Error("flow", w) {}
};

struct TaintedEstimateError : Error {
    TaintedEstimateError(const std::string& w, long path)
        : Error("tainted-estimate", w), path_index(path) {}
    long path_index;
};

struct InternalError : Error {
    explicit InternalError(const std::string& w) : Error("internal", w) {}
};

// Configuration/validation problem; names the offending field.
struct ConfigError : Error {
    ConfigError(const std::string& w, std::string field_name)
        : Error("config", w), field(std::move(field_name)) {}
    std::string field;
};

}  // namespace levysim
