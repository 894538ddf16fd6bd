#pragma once

#include <Eigen/Core>

#include "acfista/core.hpp"

namespace acfista {

// A singular value (or eigenvalue) factorization with values sorted
// non-increasing; prox kernels operate on the values and reconstruct.
struct SpectralFactorization {
    Eigen::MatrixXd left;
    Eigen::VectorXd values;
    Eigen::MatrixXd right;
};

// y = argmin l_f(.; x_tilde) + h + (M/2)||. - x_tilde||^2, realized as one
// h_prox call at x_tilde - grad f(x_tilde)/M with stepsize 1/M. Bumps
// *resolvent_counter when given.
Point composite_resolvent(const ProblemOracle& problem, const Point& x_tilde, double M,
                          long* resolvent_counter = nullptr);

// Euclidean projection onto the ball of radius r centered at the origin.
Eigen::VectorXd project_ball(const Eigen::VectorXd& z, double r);

// Euclidean projection onto {u >= 0, sum(u) = 1} by sort and threshold.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

// Projection onto {Z PSD, tr(Z) = 1}: eigen-decompose and project the
// spectrum onto the simplex. The input is symmetrized first.
Eigen::MatrixXd project_spectraplex(const Eigen::MatrixXd& Z);

// Projection onto the PSD matrices of unit Frobenius norm: clip negative
// eigenvalues, then normalize. The zero matrix maps to I/||I||_F.
Eigen::MatrixXd project_psd_unit_sphere(const Eigen::MatrixXd& Z);

// Exact minimizer of lam*||u||_1 + 0.5*||u - sigma||^2 over the nonnegative
// part of the l2 ball of radius R, for sigma >= 0: soft-threshold at lam,
// then scale radially onto the ball when the constraint binds (the KKT
// multiplier only rescales the thresholded vector).
Eigen::VectorXd prox_l1_l2ball(const Eigen::VectorXd& sigma, double lam, double R);

// Prox of lam*||.||_* restricted to the Frobenius ball of radius R, computed
// on the singular values.
Eigen::MatrixXd prox_nuclear_ball(const Eigen::MatrixXd& Z, double lam, double R);

// Thin SVD with values sorted non-increasing.
SpectralFactorization svd_factorize(const Eigen::MatrixXd& Z);

}  // namespace acfista
