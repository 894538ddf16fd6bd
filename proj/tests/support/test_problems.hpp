#pragma once

// Shared fixtures for the unit and acceptance suites: small hand-made
// composite problems, independent brute-force oracles, and the invariant
// checks every solver trace must satisfy.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "acfista/core.hpp"
#include "acfista/diagnostics.hpp"
#include "acfista/prox.hpp"
#include "acfista/rng.hpp"
#include "acfista/solver.hpp"

namespace testsupport {

using acfista::CurvatureTriple;
using acfista::Point;
using acfista::ProblemOracle;
using acfista::SolverConfig;
using acfista::SolverResult;

// f = 0.5 * sum q_i (z_i - b_i)^2, h == 0, Omega a large ball.
inline ProblemOracle quadratic_oracle(const Eigen::VectorXd& q,
                                      const Eigen::VectorXd& b = Eigen::VectorXd(),
                                      double omega_radius = 1e6) {
    Eigen::VectorXd center = b.size() ? b : Eigen::VectorXd::Zero(q.size());
    ProblemOracle oracle;
    oracle.dimension = q.size();
    const double q_max = q.maxCoeff();
    oracle.curvature = CurvatureTriple{0.0, q_max, q_max};
    oracle.f_value = [q, center](const Point& z) {
        return 0.5 * (q.array() * (z - center).array().square()).sum();
    };
    oracle.f_gradient = [q, center](const Point& z) { return Point(q.cwiseProduct(z - center)); };
    oracle.h_prox = [](const Point& z, double) { return z; };
    oracle.h_value = [](const Point&) { return 0.0; };
    oracle.omega_project = [omega_radius](const Point& z) {
        return Point(acfista::project_ball(z, omega_radius));
    };
    return oracle;
}

// f == 0, h = indicator of the ball of radius r.
inline ProblemOracle zero_f_ball_oracle(double r) {
    ProblemOracle oracle;
    oracle.dimension = 0;
    oracle.curvature = CurvatureTriple{0.0, 1.0, 1.0};
    oracle.f_value = [](const Point&) { return 0.0; };
    oracle.f_gradient = [](const Point& z) { return Point(Point::Zero(z.size())); };
    oracle.h_prox = [r](const Point& z, double) { return Point(acfista::project_ball(z, r)); };
    oracle.h_value = [r](const Point& z) {
        return z.norm() <= r * (1.0 + 1e-9) + 1e-12 ? 0.0
                                                    : std::numeric_limits<double>::infinity();
    };
    oracle.omega_project = [r](const Point& z) { return Point(acfista::project_ball(z, r)); };
    return oracle;
}

// f = 0.5 ||z||^2, h = w ||z||_1.
inline ProblemOracle l1_quadratic_oracle(double w) {
    ProblemOracle oracle;
    oracle.dimension = 0;
    oracle.curvature = CurvatureTriple{0.0, 1.0, 1.0};
    oracle.f_value = [](const Point& z) { return 0.5 * z.squaredNorm(); };
    oracle.f_gradient = [](const Point& z) { return z; };
    oracle.h_prox = [w](const Point& z, double s) {
        const double t = w * s;
        return Point(z.array().sign() * (z.array().abs() - t).max(0.0));
    };
    oracle.h_value = [w](const Point& z) { return w * z.lpNorm<1>(); };
    oracle.omega_project = [](const Point& z) { return z; };
    return oracle;
}

// f(x) = x^4/4 - x^2/2 on [-2, 2]; stationary points {-1, 0, +1}.
inline ProblemOracle double_well_oracle() {
    ProblemOracle oracle;
    oracle.dimension = 1;
    oracle.curvature = CurvatureTriple{1.0, 11.0, 11.0};  // f'' = 3x^2 - 1 on [-2,2]
    oracle.f_value = [](const Point& z) {
        const double x = z[0];
        return 0.25 * x * x * x * x - 0.5 * x * x;
    };
    oracle.f_gradient = [](const Point& z) {
        Point g(1);
        g[0] = z[0] * z[0] * z[0] - z[0];
        return g;
    };
    auto clamp = [](const Point& z) {
        Point out(1);
        out[0] = std::min(2.0, std::max(-2.0, z[0]));
        return out;
    };
    oracle.h_prox = [clamp](const Point& z, double) { return clamp(z); };
    oracle.h_value = [](const Point& z) {
        return std::abs(z[0]) <= 2.0 + 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    oracle.omega_project = clamp;
    return oracle;
}

// f(x) = c^T x (zero curvature everywhere).
inline ProblemOracle linear_oracle(const Eigen::VectorXd& c) {
    ProblemOracle oracle;
    oracle.dimension = c.size();
    oracle.curvature = CurvatureTriple{0.0, 1.0, 1.0};
    oracle.f_value = [c](const Point& z) { return c.dot(z); };
    oracle.f_gradient = [c](const Point&) { return c; };
    oracle.h_prox = [](const Point& z, double) { return z; };
    oracle.h_value = [](const Point&) { return 0.0; };
    oracle.omega_project = [](const Point& z) { return Point(acfista::project_ball(z, 1e6)); };
    return oracle;
}

// f(x) = x^4/4 (for the curvature-quotient examples).
inline ProblemOracle quartic_oracle() {
    ProblemOracle oracle;
    oracle.dimension = 1;
    oracle.curvature = CurvatureTriple{0.0, 12.0, 12.0};
    oracle.f_value = [](const Point& z) { return 0.25 * std::pow(z[0], 4); };
    oracle.f_gradient = [](const Point& z) {
        Point g(1);
        g[0] = z[0] * z[0] * z[0];
        return g;
    };
    oracle.h_prox = [](const Point& z, double) { return z; };
    oracle.h_value = [](const Point&) { return 0.0; };
    oracle.omega_project = [](const Point& z) { return z; };
    return oracle;
}

// O(2^n) active-set enumeration for the simplex projection.
inline Eigen::VectorXd simplex_bruteforce(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXd best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double support_sum = 0.0;
        int support = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                support_sum += v[i];
                ++support;
            }
        const double shift = (1.0 - support_sum) / support;
        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(n);
        bool feasible = true;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                candidate[i] = v[i] + shift;
                if (candidate[i] < -1e-12) feasible = false;
            }
        if (!feasible) continue;
        const double dist = (candidate - v).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = candidate;
        }
    }
    return best;
}

// Projected gradient on {u >= 0, ||u|| <= R} for
// F(u) = lam * sum(u) + 0.5 ||u - sigma||^2; independent of the prox kernel.
inline Eigen::VectorXd l1_l2ball_pg_oracle(const Eigen::VectorXd& sigma, double lam, double R,
                                           int iterations = 20000) {
    auto feasible = [R](const Eigen::VectorXd& u) {
        Eigen::VectorXd clipped = u.cwiseMax(0.0);
        const double norm = clipped.norm();
        return norm <= R ? clipped : Eigen::VectorXd((R / norm) * clipped);
    };
    Eigen::VectorXd u = feasible(sigma);
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd grad =
            (u - sigma).array() + lam;  // gradient of F on the nonnegative orthant
        u = feasible(u - 0.5 * grad);
    }
    return u;
}

// Directional central-difference check; returns the worst relative error over
// the sampled directions, with step 1e-6 * (1 + ||z||).
inline double max_directional_fd_error(const ProblemOracle& oracle, const Point& z,
                                       acfista::Rng& rng, int directions = 8) {
    const double h = 1e-6 * (1.0 + z.norm());
    const Point grad = oracle.f_gradient(z);
    double worst = 0.0;
    for (int d = 0; d < directions; ++d) {
        Point dir(z.size());
        for (long i = 0; i < z.size(); ++i) dir[i] = rng.normal();
        dir /= dir.norm();
        const double fd =
            (oracle.f_value(z + h * dir) - oracle.f_value(z - h * dir)) / (2.0 * h);
        const double analytic = grad.dot(dir);
        worst = std::max(worst, std::abs(fd - analytic) / (1.0 + std::abs(analytic)));
    }
    return worst;
}

// Every invariant a finished run must satisfy; returns human-readable
// violations (empty == pass).
inline std::vector<std::string> trace_violations(const SolverResult& result,
                                                 const SolverConfig& config,
                                                 const ProblemOracle& problem,
                                                 bool monotone_rule = false) {
    std::vector<std::string> bad;
    auto complain = [&bad](const std::string& msg) { bad.push_back(msg); };

    const double floor = config.gamma * config.M_cap;
    for (const auto& rec : result.trace) {
        const double identity = rec.M_k * rec.a_k * rec.a_k;
        if (std::abs(rec.A_next - identity) > 1e-12 * std::max(1.0, std::abs(rec.A_next)))
            complain("A_{k+1} != M_k a_k^2 at k=" + std::to_string(rec.k));
        if (rec.M_k < floor * (1.0 - 1e-12))
            complain("M floor violated at k=" + std::to_string(rec.k));
    }

    // Scaled monotonicity k*M_k of the accepted sequence, from M_1 on. The
    // step M_i -> M_{i+1} is monotone in this sense exactly when C_i >= 0
    // (a negative observation can shrink the running sum), so the check is
    // guarded by the sign of the driving curvature.
    const auto& M = result.ledger.M_values;
    for (std::size_t i = 1; i + 1 < M.size(); ++i) {
        if (result.ledger.C_values[i] < 0.0) continue;
        const double lhs = static_cast<double>(i) * M[i];
        const double rhs = static_cast<double>(i + 1) * M[i + 1];
        if (lhs > rhs * (1.0 + 1e-9))
            complain("i*M_i > k*M_k between " + std::to_string(i) + " and " +
                     std::to_string(i + 1));
    }

    const auto [theta, tau] = acfista::theta_tau_series(result.ledger);
    const double tau_bound = problem.curvature.L / (config.gamma * config.M_cap);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double k = static_cast<double>(j + 1);
        if (theta[j] < (k - 1.0) / (2.0 * k) - 1e-12)
            complain("theta_k below (k-1)/(2k) at k=" + std::to_string(j + 1));
        if (tau[j] > tau_bound * (1.0 + 1e-9) + 1e-12)
            complain("tau_k above L/(gamma M) at k=" + std::to_string(j + 1));
    }

    long resolvent_sum = 0;
    const std::size_t terminal_index =
        result.reason == acfista::StopReason::ToleranceMet && !result.trace.empty()
            ? result.trace.size() - 1
            : result.trace.size();
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& rec = result.trace[i];
        resolvent_sum += rec.resolvents;
        if (i == terminal_index) {
            if (rec.resolvents != 1) complain("terminal record charged more than one resolvent");
            continue;
        }
        if (rec.is_good != (rec.resolvents == 1))
            complain("good/resolvent mismatch at k=" + std::to_string(rec.k));
        if (!rec.is_good && rec.resolvents != 2)
            complain("bad iteration without two resolvents at k=" + std::to_string(rec.k));
    }
    if (resolvent_sum != result.total_resolvents)
        complain("total_resolvents does not match the per-iteration sum");
    if (result.good_count + result.bad_count != result.iterations)
        complain("good_count + bad_count != iterations");

    if (monotone_rule) {
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
            if (i == terminal_index || result.trace[i].restarted) continue;
            if (result.trace[i].phi > previous + 1e-10)
                complain("monotone rule violated at k=" + std::to_string(result.trace[i].k));
            previous = result.trace[i].phi;
        }
    }

    if (result.reason == acfista::StopReason::ToleranceMet) {
        if (!acfista::check_stationarity(problem, result.y_hat, result.v_hat, result.M_final,
                                         result.x_tilde_final))
            complain("terminal pair fails the stationarity certificate");
        if (result.final_residual > config.rho_hat)
            complain("terminal residual above rho_hat");
    }
    return bad;
}

inline std::string join(const std::vector<std::string>& parts) {
    std::ostringstream out;
    for (const auto& part : parts) out << part << "; ";
    return out.str();
}

// Drives the iteration by hand on good steps and measures the gap to the
// classical momentum update x_{k+1} = y_{k+1} + (A_k/a_k)(y_{k+1} - y_k).
inline double max_fista_equivalence_gap(const ProblemOracle& oracle, const SolverConfig& config,
                                        const Point& z0, long max_iter) {
    acfista::SolverState state = acfista::init_solver_state(oracle, config, z0);
    double worst = 0.0;
    for (long k = 0; k < max_iter; ++k) {
        const auto step = acfista::ac_fista_iteration(state, oracle, config);
        if (step.terminal) break;
        if (step.record.is_good) {
            const Point& y_next = step.next.y;
            Point reference = y_next;
            if (state.A > 0.0)
                reference += (state.A / step.record.a_k) * (y_next - state.y);
            worst = std::max(worst, (step.next.x - reference).norm());
        }
        state = step.next;
    }
    return worst;
}

}  // namespace testsupport
