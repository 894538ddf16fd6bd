#pragma once

#include <optional>
#include <vector>

#include "json.hpp"

#include "acfista/core.hpp"

namespace acfista {

// Post-hoc ratio statistics over a solver trace. Entry j of theta_series /
// tau_series / eta_series corresponds to iteration index k = j + 1.
struct DiagnosticsReport {
    std::vector<double> theta_series;
    std::vector<double> tau_series;
    std::vector<std::optional<double>> eta_series;
    std::optional<double> theta_bar;
    std::optional<double> tau_bar;
    bool bar_full_range = false;  // run shorter than the k >= 100 cutoff
    double bad_fraction = 0.0;
    std::optional<long> condition_a_satisfied_from;
    double mean_resolvents_per_iteration = 0.0;
};

// M_k^hm = k / sum_{i<k} 1/M_i for k = 1..len.
std::vector<double> harmonic_mean_series(const std::vector<double>& M_values);

// theta_k = M_k / M_k^hm and tau_k = L_k^avg / M_k for k = 1..len-1.
std::pair<std::vector<double>, std::vector<double>> theta_tau_series(const CurvatureLedger& ledger);

// Smallest k0 with |B_k| <= k/3 for all observed k >= k0; absent when the
// bound is violated at the final k. Records are taken as iterations
// 0..len-1 in order.
std::optional<long> condition_a_monitor(const std::vector<bool>& is_good);
std::optional<long> condition_a_monitor(const Trace& trace);

// eta_k = sum of bad-iteration C over the sum of the chronologically first
// floor(|B_k|/2) bad-iteration C; absent while fewer than two bad iterations
// have occurred or the denominator vanishes.
std::vector<std::optional<double>> eta_series(const CurvatureLedger& ledger,
                                              const std::vector<bool>& is_good);

DiagnosticsReport build_report(const SolverResult& result);

nlohmann::json to_json(const DiagnosticsReport& report);

}  // namespace acfista
