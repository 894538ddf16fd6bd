#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "acfista/core.hpp"

namespace acfista::qp {

// Indefinite quadratic over the spectraplex O_n = {Z PSD, tr(Z) = 1}:
//   f(Z) = -(alpha1/2) ||D P(Z)||^2 + (alpha2/2) ||Q(Z) - b||^2
// with [P(Z)]_i = <P_i, Z>_F and [Q(Z)]_j = <Q_j, Z>_F. Points are the
// column-major flattening of Z.
struct QpOperatorData {
    long l = 0;
    long n = 0;
    Eigen::VectorXd b;                                // length l
    Eigen::VectorXd D;                                // diagonal entries, length n
    std::vector<Eigen::SparseMatrix<double>> P_ops;   // n symmetric matrices
    std::vector<Eigen::SparseMatrix<double>> Q_ops;   // l symmetric matrices
};

struct QpInstance {
    QpOperatorData data;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double M_target = 0.0;
    double m_target = 0.0;

    CurvatureTriple curvature() const {
        return CurvatureTriple{m_target, M_target, std::max(M_target, m_target)};
    }
};

QpOperatorData generate(long l, long n, double density, std::uint64_t seed);

// Scales (alpha1, alpha2) so that the Hessian alpha2 Q*Q - alpha1 P*D^2P has
// lambda_max <= M_target and lambda_min >= -m_target, via power iteration on
// the symmetric matrix space (tolerance 1e-8, at most 5000 applications).
std::pair<double, double> calibrate(const QpOperatorData& data, double M_target,
                                    double m_target);

QpInstance assemble(QpOperatorData data, double M_target, double m_target);

ProblemOracle make_oracle(const QpInstance& instance);

// The centroid I/n of the spectraplex, flattened.
Point initial_point(const QpInstance& instance);

// Forward/adjoint operator helpers (shared with tests).
Eigen::VectorXd apply_P(const QpOperatorData& data, const Eigen::MatrixXd& Z);
Eigen::VectorXd apply_Q(const QpOperatorData& data, const Eigen::MatrixXd& Z);
Eigen::MatrixXd adjoint_P(const QpOperatorData& data, const Eigen::VectorXd& w);
Eigen::MatrixXd adjoint_Q(const QpOperatorData& data, const Eigen::VectorXd& w);
Eigen::MatrixXd hessian_apply(const QpInstance& instance, const Eigen::MatrixXd& E);

nlohmann::json to_json(const QpInstance& instance);
QpInstance from_json(const nlohmann::json& j);

}  // namespace acfista::qp
