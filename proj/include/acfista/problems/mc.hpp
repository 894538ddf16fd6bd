#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "acfista/core.hpp"

namespace acfista::mc {

// Observed ratings (i, j, value), 0-based indices, duplicates resolved to
// the last occurrence.
struct Ratings {
    long l = 0;
    long n = 0;
    std::vector<Eigen::Triplet<double>> entries;
};

// Parses "user item rating [timestamp]" lines with 1-based integer ids.
Ratings load_ratings(const std::string& path);

// Frobenius norm of the l x n matrix that agrees with the observations and
// holds scale_max everywhere else.
double radius(const Ratings& ratings, double scale_max);

// Low-rank completion with the log-sum penalty p(t) = beta log(1 + t/tau):
//   f(Z) = 0.5 ||Pi_Q(Z - O)||_F^2 + mu sum_i [p(sigma_i) - p0 sigma_i],
//   h(Z) = mu p0 ||Z||_* + indicator of the Frobenius ball B_R,
// with p0 = beta/tau and curvature (2 mu kappa, 1, max(1, 2 mu kappa)),
// kappa = beta/tau^2. Points flatten Z column-major.
struct McInstance {
    long l = 0;
    long n = 0;
    Eigen::SparseMatrix<double> observed;  // values of O on the index set Q
    double mu = 0.0;
    double beta = 0.0;
    double tau_pen = 0.0;
    double R = 0.0;

    double p0() const { return beta / tau_pen; }
    double kappa() const { return beta / (tau_pen * tau_pen); }
    CurvatureTriple curvature() const {
        const double m = 2.0 * mu * kappa();
        return CurvatureTriple{m, 1.0, std::max(1.0, m)};
    }
};

McInstance generate(long l, long n, long rank, double density, double scale_min,
                    double scale_max, double mu, double beta, double tau,
                    std::uint64_t seed);

McInstance from_ratings(const Ratings& ratings, double scale_max, double mu, double beta,
                        double tau);

ProblemOracle make_oracle(const McInstance& instance);

// Standard-normal entries, rescaled onto B_R when the draw lands outside.
Point initial_point(const McInstance& instance, std::uint64_t seed);

nlohmann::json to_json(const McInstance& instance);
McInstance from_json(const nlohmann::json& j);

}  // namespace acfista::mc
