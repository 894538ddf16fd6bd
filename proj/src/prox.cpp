#include "acfista/prox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace acfista {

Point composite_resolvent(const ProblemOracle& problem, const Point& x_tilde, double M,
                          long* resolvent_counter) {
    if (!(M > 0.0)) throw std::invalid_argument("composite_resolvent: M must be positive");
    const Point center = x_tilde - problem.f_gradient(x_tilde) / M;
    Point y = problem.h_prox(center, 1.0 / M);
    if (!y.allFinite()) throw OracleError("h_prox returned a non-finite point");
    if (resolvent_counter) ++*resolvent_counter;
    return y;
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& z, double r) {
    const double norm = z.norm();
    if (norm <= r) return z;
    return (r / norm) * z;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) threshold = candidate;
    }
    return (v.array() - threshold).max(0.0);
}

Eigen::MatrixXd project_spectraplex(const Eigen::MatrixXd& Z) {
    const Eigen::MatrixXd sym = 0.5 * (Z + Z.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw OracleError("project_spectraplex: eigendecomposition failed");
    const Eigen::VectorXd projected = project_simplex(eig.eigenvalues());
    return eig.eigenvectors() * projected.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd project_psd_unit_sphere(const Eigen::MatrixXd& Z) {
    const Eigen::MatrixXd sym = 0.5 * (Z + Z.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw OracleError("project_psd_unit_sphere: eigendecomposition failed");
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    const double norm = clipped.norm();
    if (norm <= 0.0) {
        const Eigen::Index n = Z.rows();
        return Eigen::MatrixXd::Identity(n, n) / std::sqrt(static_cast<double>(n));
    }
    return eig.eigenvectors() * (clipped / norm).asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::VectorXd prox_l1_l2ball(const Eigen::VectorXd& sigma, double lam, double R) {
    if (!(lam >= 0.0)) throw std::invalid_argument("prox_l1_l2ball: lam must be >= 0");
    if (!(R > 0.0)) throw std::invalid_argument("prox_l1_l2ball: R must be positive");
    Eigen::VectorXd thresholded = (sigma.array() - lam).max(0.0);
    const double norm = thresholded.norm();
    if (norm <= R) return thresholded;
    // Binding constraint: the ball multiplier nu scales the thresholded
    // vector by 1/(1+nu) with ||.|| = R, i.e. a radial projection.
    return (R / norm) * thresholded;
}

Eigen::MatrixXd prox_nuclear_ball(const Eigen::MatrixXd& Z, double lam, double R) {
    const SpectralFactorization f = svd_factorize(Z);
    const Eigen::VectorXd shrunk = prox_l1_l2ball(f.values, lam, R);
    return f.left * shrunk.asDiagonal() * f.right.transpose();
}

SpectralFactorization svd_factorize(const Eigen::MatrixXd& Z) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw OracleError("SVD failed");
    return SpectralFactorization{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace acfista
