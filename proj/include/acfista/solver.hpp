#pragma once

#include "acfista/core.hpp"

namespace acfista {

// C(y; x_tilde) = 2 [f(y) - l_f(y; x_tilde)] / ||y - x_tilde||^2. May be
// negative where f is locally concave. Steps with ||y - x_tilde|| below
// 1e-14 * (1 + ||x_tilde||) are degenerate: the quotient is reported as 0
// and *degenerate is set.
double observed_curvature(const ProblemOracle& problem, const Point& y, const Point& x_tilde,
                          bool* degenerate = nullptr);

// L(y; x_tilde) = ||grad f(y) - grad f(x_tilde)|| / ||y - x_tilde||, with the
// same degenerate-step convention.
double lipschitz_estimate(const ProblemOracle& problem, const Point& y, const Point& x_tilde);

// a = (1 + sqrt(1 + 4 M A)) / (2M) and A_next = A + a, the positive root of
// M a^2 - a - A = 0, so A_next == M a^2.
std::pair<double, double> step_coefficients(double A, double M);

// M_{k+1} = max(gamma * M_cap, C_sum / (alpha * (k + 1))) with
// C_sum = sum of the first k+1 observed curvatures.
double update_M(double C_sum, long k, const SolverConfig& config);

// One iteration proposed from `state` without mutating it; the run loop
// commits `next` or, under the restart rule, discards it.
struct IterationStep {
    SolverState next;
    IterationRecord record;
    bool terminal = false;
    Point terminal_y;
    Point terminal_v;
    Point x_tilde;
    double M_used = 0.0;
};

SolverState init_solver_state(const ProblemOracle& problem, const SolverConfig& config,
                              const Point& z0);

IterationStep ac_fista_iteration(const SolverState& state, const ProblemOracle& problem,
                                 const SolverConfig& config);

SolverResult run_ac_fista(const ProblemOracle& problem, const SolverConfig& config,
                          const Point& z0);

// Theoretical comparator: averages max(C, L), always evaluates both the prox
// step and the bad-branch subproblem (two resolvents per iteration).
SolverResult run_ac_acg(const ProblemOracle& problem, const SolverConfig& config,
                        const Point& z0);

// The same loop with the curvature estimate pinned at M_const (>= L).
SolverResult run_fista_constant(const ProblemOracle& problem, double M_const,
                                const SolverConfig& config, const Point& z0);

}  // namespace acfista
