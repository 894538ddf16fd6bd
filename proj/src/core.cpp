#include "acfista/core.hpp"

#include <cmath>
#include <limits>

namespace acfista {

double SolverConfig::initial_M() const {
    if (M_init) return *M_init;
    return std::max(0.01, gamma) * M_cap;
}

void SolverConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
    if (!(M_cap > 0.0)) throw std::invalid_argument("M_cap must be positive");
    if (!(rho_hat > 0.0)) throw std::invalid_argument("rho_hat must be positive");
    if (!(good_threshold > 0.0 && good_threshold <= 1.0))
        throw std::invalid_argument("good_threshold must be in (0,1]");
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
    if (!(initial_M() >= gamma * M_cap * (1.0 - 1e-12)))
        throw std::invalid_argument("M_init must be at least gamma * M_cap");
}

double evaluate_phi(const ProblemOracle& problem, const Point& z) {
    const double h = problem.h_value(z);
    if (!(h < std::numeric_limits<double>::infinity()))
        return std::numeric_limits<double>::infinity();
    const double f = problem.f_value(z);
    if (!std::isfinite(f)) throw OracleError("f_value returned a non-finite value");
    return f + h;
}

bool check_stationarity(const ProblemOracle& problem, const Point& y, const Point& v,
                        double M, const Point& x_tilde, double tol) {
    (void)v;  // v is certified through the prox identity below
    if (tol <= 0.0) tol = 1e-9 * (1.0 + y.norm());
    const Point refreshed =
        problem.h_prox(x_tilde - problem.f_gradient(x_tilde) / M, 1.0 / M);
    return (y - refreshed).norm() <= tol;
}

double termination_value(const Point& v, double grad_z0_norm, TerminationMode mode) {
    const double norm = v.norm();
    if (mode == TerminationMode::Absolute) return norm;
    return norm / (grad_z0_norm + 1.0);
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::ToleranceMet: return "tolerance_met";
        case StopReason::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

}  // namespace acfista
