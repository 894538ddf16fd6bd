#pragma once

#include <Eigen/SparseCore>
#include <cstdint>

#include "json.hpp"

#include "acfista/core.hpp"

namespace acfista::svm {

// Sigmoid-loss SVM over the ball B_r:
//   f(z) = (1/p) sum_i (1 - tanh(v_i <z, u_i>)) + (lambda/2) ||z||^2,
//   h = indicator of B_r, Omega = B_r.
struct SvmInstance {
    Eigen::SparseMatrix<double, Eigen::RowMajor> features;  // p x n, rows u_i
    Eigen::VectorXd labels;                                 // entries in {-1, +1}
    double lambda = 0.0;
    double r = 0.0;

    long n() const { return features.cols(); }
    long p() const { return features.rows(); }
    CurvatureTriple curvature() const;
};

SvmInstance generate(long n, long p, double density, double lambda, double r,
                     std::uint64_t seed);

ProblemOracle make_oracle(const SvmInstance& instance);

// Start point drawn uniformly from B_r.
Point initial_point(const SvmInstance& instance, std::uint64_t seed);

nlohmann::json to_json(const SvmInstance& instance);
SvmInstance from_json(const nlohmann::json& j);

}  // namespace acfista::svm
