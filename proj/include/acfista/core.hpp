#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acfista {

// Iterates are flat coordinate vectors; matrix-valued problems flatten
// column-major and keep their (l, n) shape inside the oracle.
using Point = Eigen::VectorXd;

class OracleError : public std::runtime_error {
public:
    explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

// Curvature surrogates supplied with a problem: m bounds the concave side,
// M the convex side, L the gradient Lipschitz constant (L >= max(m, M)).
struct CurvatureTriple {
    double m = 0.0;
    double M = 0.0;
    double L = 0.0;
};

// Bundle of callbacks describing one composite problem min f + h over dom h,
// with a projector onto the enclosing set Omega. h_prox(c, s) must return the
// exact minimizer of h(u) + ||u - c||^2 / (2s).
struct ProblemOracle {
    std::function<double(const Point&)> f_value;
    std::function<Point(const Point&)> f_gradient;
    std::function<Point(const Point&, double)> h_prox;
    std::function<double(const Point&)> h_value;
    std::function<Point(const Point&)> omega_project;
    CurvatureTriple curvature;
    Eigen::Index dimension = 0;
};

enum class TerminationMode { Absolute, Relative };
enum class IterateRule { NonMonotone, Monotone };
enum class StopReason { ToleranceMet, MaxIterations };

struct SolverConfig {
    double alpha = 0.5;
    double gamma = 1e-6;
    double M_cap = 1.0;
    // Initial curvature estimate; when unset, max(0.01, gamma) * M_cap.
    std::optional<double> M_init;
    double rho_hat = 1e-7;
    TerminationMode termination = TerminationMode::Relative;
    IterateRule iterate_rule = IterateRule::NonMonotone;
    bool restart = false;
    long max_iterations = 10000;
    double good_threshold = 0.9;
    std::uint64_t seed = 0;

    double initial_M() const;
    void validate() const;
};

struct SolverState {
    long k = 0;
    double A = 0.0;
    Point x;
    Point y;
    double M_cur = 0.0;
    double C_sum = 0.0;  // running sum feeding the curvature average
    long good_count = 0;
    long bad_count = 0;
    long resolvent_count = 0;
    bool restarted_this_k = false;
    double grad_z0_norm = 0.0;  // cached once at solver start
    double phi_y = 0.0;         // phi(y_k)
};

struct IterationRecord {
    long k = 0;
    double a_k = 0.0;
    double A_next = 0.0;
    double M_k = 0.0;
    double C_k = 0.0;
    double L_k = 0.0;
    bool is_good = true;
    double v_norm = 0.0;
    double phi = 0.0;  // phi(y_{k+1})
    int resolvents = 1;
    bool restarted = false;   // execution rejected by the restart rule
    double elapsed = 0.0;     // seconds since run start (diagnostic only)
};

using Trace = std::vector<IterationRecord>;

// Per-iteration curvature observations in accepted order (rejected restart
// executions are trace-only). M_values[i] is the estimate used at entry i.
struct CurvatureLedger {
    std::vector<double> C_values;
    std::vector<double> C_tilde_values;
    std::vector<double> L_values;
    std::vector<double> M_values;

    void append(double C, double L, double M) {
        C_values.push_back(C);
        C_tilde_values.push_back(std::max(C, L));
        L_values.push_back(L);
        M_values.push_back(M);
    }
    std::size_t size() const { return M_values.size(); }
};

struct SolverResult {
    Point y_hat;
    Point v_hat;
    StopReason reason = StopReason::MaxIterations;
    double final_phi = 0.0;
    double final_residual = 0.0;  // termination_value of v_hat
    long iterations = 0;          // completed iterations (state.k)
    long good_count = 0;
    long bad_count = 0;
    long total_resolvents = 0;
    double grad_z0_norm = 0.0;
    double M_final = 0.0;   // estimate active when (y_hat, v_hat) was formed
    Point x_tilde_final;    // prox center that produced y_hat
    Trace trace;
    CurvatureLedger ledger;
};

// phi(z) = f(z) + h(z); +inf outside dom h. Throws OracleError if f returns
// a non-finite value at a feasible point.
double evaluate_phi(const ProblemOracle& problem, const Point& z);

// Re-evaluates the prox defining y from (x_tilde, M) and checks that y is its
// fixed point within tol. tol <= 0 selects the default 1e-9 * (1 + ||y||).
bool check_stationarity(const ProblemOracle& problem, const Point& y, const Point& v,
                        double M, const Point& x_tilde, double tol = -1.0);

double termination_value(const Point& v, double grad_z0_norm, TerminationMode mode);

const char* to_string(StopReason reason);

}  // namespace acfista
