#pragma once

#include <stdexcept>
#include <string>

namespace fbms {

// Coarse failure categories; the CLI maps them to process exit codes.
enum class ErrorKind {
    validation,    // bad inputs / geometric constraints violated
    solver,        // numerical failure inside a solve or search
    residual_gate, // a result was produced but fails its quality gate
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string what) : std::runtime_error(std::move(what)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct NonPositiveRadius : Error {
    explicit NonPositiveRadius(int i)
        : Error(ErrorKind::validation, "radius r" + std::to_string(i) + " must be positive"), index(i) {}
    int index;
};

struct OverlappingPair : Error {
    OverlappingPair(int i, int j)
        : Error(ErrorKind::validation,
                "radii r" + std::to_string(i) + " + r" + std::to_string(j) + " must stay below pi/2"),
          first(i), second(j) {}
    int first, second;
};

struct PointOutsideDomain : Error {
    explicit PointOutsideDomain(const std::string& detail = "point lies outside the closed domain")
        : Error(ErrorKind::validation, detail) {}
};

struct IllConditioned : Error {
    explicit IllConditioned(const std::string& detail) : Error(ErrorKind::solver, detail) {}
};

struct ResidualAboveTolerance : Error {
    ResidualAboveTolerance(double resid, double tol)
        : Error(ErrorKind::solver,
                "boundary residual " + std::to_string(resid) + " exceeds tolerance " + std::to_string(tol)),
          residual(resid), tolerance(tol) {}
    double residual, tolerance;
};

struct SymmetryDefect : Error {
    explicit SymmetryDefect(double defect)
        : Error(ErrorKind::solver, "operator symmetry defect " + std::to_string(defect)), value(defect) {}
    double value;
};

struct DegenerateMetric : Error {
    explicit DegenerateMetric(const std::string& detail) : Error(ErrorKind::solver, detail) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& detail) : Error(ErrorKind::solver, detail) {}
};

struct NonPositiveMetric : Error {
    explicit NonPositiveMetric(const std::string& detail) : Error(ErrorKind::solver, detail) {}
};

struct LeftModuliSpace : Error {
    explicit LeftModuliSpace(const std::string& detail = "search iterate left the moduli space")
        : Error(ErrorKind::solver, detail) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(int iterations)
        : Error(ErrorKind::solver, "no convergence after " + std::to_string(iterations) + " iterations"),
          iterations(iterations) {}
    int iterations;
};

struct PeriodDefect : Error {
    explicit PeriodDefect(double defect)
        : Error(ErrorKind::solver, "conjugate-potential period defect " + std::to_string(defect)), value(defect) {}
    double value;
};

struct DegenerateMesh : Error {
    explicit DegenerateMesh(const std::string& detail) : Error(ErrorKind::solver, detail) {}
};

struct NotCritical : Error {
    explicit NotCritical(double grad_norm)
        : Error(ErrorKind::residual_gate, "gradient norm " + std::to_string(grad_norm) + " too large for assembly"),
          gradient_norm(grad_norm) {}
    double gradient_norm;
};

struct NotMaximal : Error {
    explicit NotMaximal(const std::string& detail) : Error(ErrorKind::residual_gate, detail) {}
};

struct BoundaryAttracted : Error {
    explicit BoundaryAttracted(const std::string& detail)
        : Error(ErrorKind::residual_gate, detail) {}
};

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::validation: return 2;
        case ErrorKind::solver: return 3;
        case ErrorKind::residual_gate: return 4;
    }
    return 1;
}

} // namespace fbms
