#include "acfista/diagnostics.hpp"

#include <cmath>

namespace acfista {

std::vector<double> harmonic_mean_series(const std::vector<double>& M_values) {
    std::vector<double> out;
    out.reserve(M_values.size());
    double inverse_sum = 0.0;
    for (std::size_t i = 0; i < M_values.size(); ++i) {
        inverse_sum += 1.0 / M_values[i];
        out.push_back(static_cast<double>(i + 1) / inverse_sum);
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> theta_tau_series(
    const CurvatureLedger& ledger) {
    const std::size_t len = ledger.size();
    std::vector<double> theta;
    std::vector<double> tau;
    if (len < 2) return {theta, tau};
    theta.reserve(len - 1);
    tau.reserve(len - 1);
    double inverse_sum = 0.0;
    double L_sum = 0.0;
    for (std::size_t k = 1; k < len; ++k) {
        inverse_sum += 1.0 / ledger.M_values[k - 1];
        L_sum += ledger.L_values[k - 1];
        const double harmonic = static_cast<double>(k) / inverse_sum;
        const double L_avg = L_sum / static_cast<double>(k);
        theta.push_back(ledger.M_values[k] / harmonic);
        tau.push_back(L_avg / ledger.M_values[k]);
    }
    return {theta, tau};
}

std::optional<long> condition_a_monitor(const std::vector<bool>& is_good) {
    const long len = static_cast<long>(is_good.size());
    long k0 = 0;
    long bad = 0;
    for (long k = 1; k <= len; ++k) {
        if (!is_good[k - 1]) ++bad;
        if (3 * bad > k) k0 = k + 1;  // |B_k| > k/3 violated at this k
    }
    if (k0 > len) return std::nullopt;
    return k0;
}

std::optional<long> condition_a_monitor(const Trace& trace) {
    std::vector<bool> flags;
    flags.reserve(trace.size());
    for (const auto& rec : trace) flags.push_back(rec.is_good);
    return condition_a_monitor(flags);
}

std::vector<std::optional<double>> eta_series(const CurvatureLedger& ledger,
                                              const std::vector<bool>& is_good) {
    const std::size_t len = std::min(ledger.size(), is_good.size());
    std::vector<std::optional<double>> out;
    if (len < 1) return out;
    out.reserve(len);
    std::vector<double> bad_C;  // chronological C of bad iterations
    std::vector<double> bad_prefix{0.0};
    for (std::size_t k = 1; k <= len; ++k) {
        if (!is_good[k - 1]) {
            bad_C.push_back(ledger.C_values[k - 1]);
            bad_prefix.push_back(bad_prefix.back() + bad_C.back());
        }
        const std::size_t half = bad_C.size() / 2;
        if (bad_C.size() < 2 || half == 0) {
            out.push_back(std::nullopt);
            continue;
        }
        const double denom = bad_prefix[half];
        if (denom == 0.0) {
            out.push_back(std::nullopt);
            continue;
        }
        out.push_back(bad_prefix.back() / denom);
    }
    return out;
}

DiagnosticsReport build_report(const SolverResult& result) {
    DiagnosticsReport report;
    auto [theta, tau] = theta_tau_series(result.ledger);
    report.theta_series = std::move(theta);
    report.tau_series = std::move(tau);

    // theta_bar/tau_bar take the max over k >= 100; shorter runs fall back to
    // the full range and set the flag.
    auto bar_of = [&report](const std::vector<double>& series) -> std::optional<double> {
        if (series.empty()) return std::nullopt;
        std::size_t first = 99;  // entry j holds k = j + 1
        if (series.size() <= first) {
            first = 0;
            report.bar_full_range = true;
        }
        double best = series[first];
        for (std::size_t j = first; j < series.size(); ++j) best = std::max(best, series[j]);
        return best;
    };
    report.theta_bar = bar_of(report.theta_series);
    report.tau_bar = bar_of(report.tau_series);

    // Accepted, completed iterations: drop rejected executions and, on a
    // tolerance stop, the terminating evaluation (steps 3-4 never ran).
    std::vector<bool> completed_good;
    completed_good.reserve(result.trace.size());
    for (const auto& rec : result.trace)
        if (!rec.restarted) completed_good.push_back(rec.is_good);
    if (result.reason == StopReason::ToleranceMet && !completed_good.empty())
        completed_good.pop_back();

    report.bad_fraction = result.iterations > 0
                              ? static_cast<double>(result.bad_count) /
                                    static_cast<double>(result.iterations)
                              : 0.0;
    report.condition_a_satisfied_from = condition_a_monitor(completed_good);
    report.eta_series = eta_series(result.ledger, completed_good);
    report.mean_resolvents_per_iteration = 0.0;
    if (!result.trace.empty()) {
        long total = 0;
        for (const auto& rec : result.trace) total += rec.resolvents;
        report.mean_resolvents_per_iteration =
            static_cast<double>(total) / static_cast<double>(result.trace.size());
    }
    return report;
}

nlohmann::json to_json(const DiagnosticsReport& report) {
    nlohmann::json j;
    j["theta_series"] = report.theta_series;
    j["tau_series"] = report.tau_series;
    nlohmann::json eta = nlohmann::json::array();
    for (const auto& entry : report.eta_series) {
        if (entry)
            eta.push_back(*entry);
        else
            eta.push_back(nullptr);
    }
    j["eta_series"] = std::move(eta);
    j["theta_bar"] = report.theta_bar ? nlohmann::json(*report.theta_bar) : nlohmann::json(nullptr);
    j["tau_bar"] = report.tau_bar ? nlohmann::json(*report.tau_bar) : nlohmann::json(nullptr);
    j["bar_full_range"] = report.bar_full_range;
    j["bad_fraction"] = report.bad_fraction;
    j["condition_a_satisfied_from"] = report.condition_a_satisfied_from
                                          ? nlohmann::json(*report.condition_a_satisfied_from)
                                          : nlohmann::json(nullptr);
    j["mean_resolvents_per_iteration"] = report.mean_resolvents_per_iteration;
    return j;
}

}  // namespace acfista
