#include "acfista/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "acfista/prox.hpp"

namespace acfista {

namespace {

enum class Method { AcFista, AcAcg, FistaConstant };

struct EngineSpec {
    Method method = Method::AcFista;
    double constant_M = 0.0;  // FistaConstant only
};

bool step_is_degenerate(double step_norm, double center_norm) {
    return step_norm <= 1e-14 * (1.0 + center_norm);
}

double curvature_quotient(double f_y, double f_xt, const Point& grad_xt, const Point& y,
                          const Point& x_tilde, double step_norm) {
    const double gap = f_y - f_xt - grad_xt.dot(y - x_tilde);
    return 2.0 * gap / (step_norm * step_norm);
}

IterationStep run_iteration(const SolverState& state, const ProblemOracle& problem,
                            const SolverConfig& config, const EngineSpec& spec) {
    IterationStep step;
    step.next = state;
    SolverState& next = step.next;
    IterationRecord& rec = step.record;

    const double M = state.M_cur;
    const auto [a, A_next] = step_coefficients(state.A, M);
    const Point x_tilde = (state.A * state.y + a * state.x) / A_next;

    const Point grad_xt = problem.f_gradient(x_tilde);
    if (!grad_xt.allFinite())
        throw OracleError("f_gradient non-finite at iteration " + std::to_string(state.k));
    const double f_xt = problem.f_value(x_tilde);

    const Point y_good = problem.h_prox(x_tilde - grad_xt / M, 1.0 / M);
    if (!y_good.allFinite())
        throw OracleError("h_prox non-finite at iteration " + std::to_string(state.k));
    int resolvents = 1;

    const Point diff = y_good - x_tilde;
    const double step_norm = diff.norm();
    const bool degenerate = step_is_degenerate(step_norm, x_tilde.norm());

    const Point grad_yg = problem.f_gradient(y_good);
    double C = 0.0;
    double L = 0.0;
    if (!degenerate) {
        const double f_yg = problem.f_value(y_good);
        C = curvature_quotient(f_yg, f_xt, grad_xt, y_good, x_tilde, step_norm);
        L = (grad_yg - grad_xt).norm() / step_norm;
    }
    const Point v = M * (x_tilde - y_good) + grad_yg - grad_xt;
    const double v_norm = v.norm();
    const bool is_good = degenerate || C <= config.good_threshold * M;

    rec.k = state.k;
    rec.a_k = a;
    rec.A_next = A_next;
    rec.M_k = M;
    rec.C_k = C;
    rec.L_k = L;
    rec.is_good = is_good;
    rec.v_norm = v_norm;

    step.x_tilde = x_tilde;
    step.M_used = M;

    if (termination_value(v, state.grad_z0_norm, config.termination) <= config.rho_hat) {
        step.terminal = true;
        step.terminal_y = y_good;
        step.terminal_v = v;
        rec.resolvents = 1;
        rec.phi = evaluate_phi(problem, y_good);
        next.resolvent_count = state.resolvent_count + 1;
        return step;
    }

    Point x_bad;
    if (spec.method == Method::AcAcg || !is_good) {
        x_bad = problem.h_prox(state.x - a * grad_xt, a);
        if (!x_bad.allFinite())
            throw OracleError("h_prox non-finite at iteration " + std::to_string(state.k));
        resolvents += 1;
    }

    Point y_tilde;
    if (is_good) {
        Point momentum = a * M * y_good;
        if (state.A > 0.0) momentum -= (state.A / a) * state.y;
        next.x = problem.omega_project(momentum);
        y_tilde = y_good;
        next.good_count = state.good_count + 1;
    } else {
        next.x = x_bad;
        y_tilde = (state.A * state.y + a * x_bad) / A_next;
        next.bad_count = state.bad_count + 1;
    }

    const double phi_tilde = evaluate_phi(problem, y_tilde);
    if (config.iterate_rule == IterateRule::Monotone && phi_tilde > state.phi_y) {
        next.y = state.y;
        next.phi_y = state.phi_y;
    } else {
        next.y = std::move(y_tilde);
        next.phi_y = phi_tilde;
    }

    const double C_contrib = spec.method == Method::AcAcg ? std::max(C, L) : C;
    next.C_sum = state.C_sum + C_contrib;
    next.M_cur = spec.method == Method::FistaConstant ? spec.constant_M
                                                      : update_M(next.C_sum, state.k, config);
    next.A = A_next;
    next.k = state.k + 1;
    next.resolvent_count = state.resolvent_count + resolvents;
    next.restarted_this_k = false;

    rec.resolvents = resolvents;
    rec.phi = next.phi_y;
    return step;
}

SolverResult run_engine(const ProblemOracle& problem, const SolverConfig& config,
                        const Point& z0, const EngineSpec& spec) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    auto seconds_since_start = [&started]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    SolverState state = init_solver_state(problem, config, z0);
    if (spec.method == Method::FistaConstant) state.M_cur = spec.constant_M;

    SolverResult result;
    result.grad_z0_norm = state.grad_z0_norm;

    // Prox center and estimate of the last accepted iteration; when the
    // iteration cap is hit, the candidate pair (y^g, v) is rebuilt from them.
    Point last_x_tilde = state.y;
    double last_M = state.M_cur;
    bool have_candidate = false;

    while (state.k < config.max_iterations) {
        IterationStep step = run_iteration(state, problem, config, spec);
        step.record.elapsed = seconds_since_start();

        if (step.terminal) {
            result.trace.push_back(step.record);
            result.ledger.append(step.record.C_k, step.record.L_k, step.record.M_k);
            state.resolvent_count = step.next.resolvent_count;
            result.y_hat = step.terminal_y;
            result.v_hat = step.terminal_v;
            result.reason = StopReason::ToleranceMet;
            result.final_phi = step.record.phi;
            result.M_final = step.M_used;
            result.x_tilde_final = std::move(step.x_tilde);
            break;
        }

        const bool reject = config.restart && step.record.is_good && !state.restarted_this_k &&
                            step.next.phi_y >= state.phi_y;
        if (reject) {
            step.record.restarted = true;
            result.trace.push_back(step.record);
            state.resolvent_count = step.next.resolvent_count;
            state.x = state.y;
            state.A = 0.0;
            state.restarted_this_k = true;
            continue;
        }

        result.trace.push_back(step.record);
        result.ledger.append(step.record.C_k, step.record.L_k, step.record.M_k);
        last_M = step.M_used;
        last_x_tilde = std::move(step.x_tilde);
        have_candidate = true;
        state = std::move(step.next);
    }

    if (result.reason != StopReason::ToleranceMet) {
        // Iteration cap: rebuild the last candidate pair (y^g, v) from the
        // final prox center so the reported pair matches the trace.
        result.reason = StopReason::MaxIterations;
        if (have_candidate) {
            const Point grad_xt = problem.f_gradient(last_x_tilde);
            const Point y_good = problem.h_prox(last_x_tilde - grad_xt / last_M, 1.0 / last_M);
            const Point v = last_M * (last_x_tilde - y_good) + problem.f_gradient(y_good) - grad_xt;
            result.y_hat = y_good;
            result.v_hat = v;
            result.M_final = last_M;
            result.x_tilde_final = last_x_tilde;
            result.final_phi = evaluate_phi(problem, y_good);
        } else {
            result.y_hat = state.y;
            result.v_hat = Point::Zero(state.y.size());
            result.M_final = state.M_cur;
            result.x_tilde_final = state.y;
            result.final_phi = state.phi_y;
        }
    }

    result.final_residual = termination_value(result.v_hat, state.grad_z0_norm, config.termination);
    result.iterations = state.k;
    result.good_count = state.good_count;
    result.bad_count = state.bad_count;
    result.total_resolvents = state.resolvent_count;
    return result;
}

}  // namespace

double observed_curvature(const ProblemOracle& problem, const Point& y, const Point& x_tilde,
                          bool* degenerate) {
    const double step_norm = (y - x_tilde).norm();
    const bool flat = step_is_degenerate(step_norm, x_tilde.norm());
    if (degenerate) *degenerate = flat;
    if (flat) return 0.0;
    return curvature_quotient(problem.f_value(y), problem.f_value(x_tilde),
                              problem.f_gradient(x_tilde), y, x_tilde, step_norm);
}

double lipschitz_estimate(const ProblemOracle& problem, const Point& y, const Point& x_tilde) {
    const double step_norm = (y - x_tilde).norm();
    if (step_is_degenerate(step_norm, x_tilde.norm())) return 0.0;
    return (problem.f_gradient(y) - problem.f_gradient(x_tilde)).norm() / step_norm;
}

std::pair<double, double> step_coefficients(double A, double M) {
    if (!(M > 0.0)) throw std::invalid_argument("step_coefficients: M must be positive");
    if (!(A >= 0.0)) throw std::invalid_argument("step_coefficients: A must be nonnegative");
    const double a = (1.0 + std::sqrt(1.0 + 4.0 * M * A)) / (2.0 * M);
    return {a, A + a};
}

double update_M(double C_sum, long k, const SolverConfig& config) {
    const double floor = config.gamma * config.M_cap;
    const double average = C_sum / (config.alpha * static_cast<double>(k + 1));
    return std::max(floor, average);
}

SolverState init_solver_state(const ProblemOracle& problem, const SolverConfig& config,
                              const Point& z0) {
    SolverState state;
    Point start = z0;
    if (!start.allFinite()) throw std::invalid_argument("initial point must be finite");
    if (!(problem.h_value(start) < std::numeric_limits<double>::infinity()))
        start = problem.h_prox(start, 1e-8);  // pull an infeasible start into dom h
    state.x = start;
    state.y = std::move(start);
    state.M_cur = config.initial_M();
    state.grad_z0_norm = problem.f_gradient(state.y).norm();
    state.phi_y = evaluate_phi(problem, state.y);
    return state;
}

IterationStep ac_fista_iteration(const SolverState& state, const ProblemOracle& problem,
                                 const SolverConfig& config) {
    return run_iteration(state, problem, config, EngineSpec{Method::AcFista, 0.0});
}

SolverResult run_ac_fista(const ProblemOracle& problem, const SolverConfig& config,
                          const Point& z0) {
    return run_engine(problem, config, z0, EngineSpec{Method::AcFista, 0.0});
}

SolverResult run_ac_acg(const ProblemOracle& problem, const SolverConfig& config,
                        const Point& z0) {
    return run_engine(problem, config, z0, EngineSpec{Method::AcAcg, 0.0});
}

SolverResult run_fista_constant(const ProblemOracle& problem, double M_const,
                                const SolverConfig& config, const Point& z0) {
    if (!(M_const >= problem.curvature.L))
        throw std::invalid_argument("run_fista_constant: M_const must be at least L");
    SolverConfig cfg = config;
    cfg.M_cap = M_const;  // keeps the floor invariant gamma*M_cap <= M
    cfg.M_init = M_const;
    return run_engine(problem, cfg, z0, EngineSpec{Method::FistaConstant, M_const});
}

}  // namespace acfista
