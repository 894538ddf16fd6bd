#include "acfista/problems/qp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <unordered_set>

#include "acfista/prox.hpp"
#include "acfista/rng.hpp"

namespace acfista::qp {

namespace {

double frobenius_dot(const Eigen::SparseMatrix<double>& S, const Eigen::MatrixXd& Z) {
    double sum = 0.0;
    for (int outer = 0; outer < S.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(S, outer); it; ++it)
            sum += it.value() * Z(it.row(), it.col());
    return sum;
}

// Sparse symmetric matrix with ~density*n^2 nonzeros drawn U[0,1] and
// symmetrized as (A + A^T)/2. Cells are picked without replacement
// (Floyd sampling).
Eigen::SparseMatrix<double> random_symmetric_sparse(long n, double density, Rng& rng) {
    const long cells = n * n;
    const long nnz = std::max<long>(1, std::lround(density * static_cast<double>(cells)));
    std::unordered_set<long> picked;
    picked.reserve(static_cast<std::size_t>(nnz) * 2);
    std::vector<long> order;
    order.reserve(nnz);
    for (long j = cells - nnz; j < cells; ++j) {
        const long t = static_cast<long>(rng.uniform_int(0, static_cast<std::uint64_t>(j)));
        if (picked.insert(t).second)
            order.push_back(t);
        else {
            picked.insert(j);
            order.push_back(j);
        }
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(order.size() * 2);
    for (const long cell : order) {
        const long row = cell / n;
        const long col = cell % n;
        const double value = rng.uniform();
        triplets.emplace_back(row, col, 0.5 * value);
        triplets.emplace_back(col, row, 0.5 * value);
    }
    Eigen::SparseMatrix<double> out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());  // duplicates sum
    out.makeCompressed();
    return out;
}

// Largest eigenvalue of a PSD self-adjoint operator on symmetric matrices.
double power_iteration(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& apply,
                       long n) {
    Rng rng(0x9d2c5680);  // fixed internal stream; calibration is deterministic
    Eigen::MatrixXd Z(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = i; j < n; ++j) {
            const double value = rng.normal();
            Z(i, j) = value;
            Z(j, i) = value;
        }
    Z /= Z.norm();
    double lambda = 0.0;
    for (int iter = 0; iter < 5000; ++iter) {
        Eigen::MatrixXd applied = apply(Z);
        const double norm = applied.norm();
        if (norm <= 1e-300) throw std::runtime_error("power iteration hit a zero operator");
        applied /= norm;
        const double next = applied.cwiseProduct(apply(applied)).sum();
        const bool settled = std::abs(next - lambda) <= 1e-8 * std::max(1.0, std::abs(next));
        lambda = next;
        Z = std::move(applied);
        if (settled) return lambda;
    }
    throw std::runtime_error("power iteration did not converge within 5000 steps");
}

}  // namespace

Eigen::VectorXd apply_P(const QpOperatorData& data, const Eigen::MatrixXd& Z) {
    const long count = static_cast<long>(data.P_ops.size());
    Eigen::VectorXd out(count);
    for (long i = 0; i < count; ++i) out[i] = frobenius_dot(data.P_ops[i], Z);
    return out;
}

Eigen::VectorXd apply_Q(const QpOperatorData& data, const Eigen::MatrixXd& Z) {
    const long count = static_cast<long>(data.Q_ops.size());
    Eigen::VectorXd out(count);
    for (long j = 0; j < count; ++j) out[j] = frobenius_dot(data.Q_ops[j], Z);
    return out;
}

Eigen::MatrixXd adjoint_P(const QpOperatorData& data, const Eigen::VectorXd& w) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(data.n, data.n);
    for (long i = 0; i < static_cast<long>(data.P_ops.size()); ++i)
        if (w[i] != 0.0) out += w[i] * data.P_ops[i];
    return out;
}

Eigen::MatrixXd adjoint_Q(const QpOperatorData& data, const Eigen::VectorXd& w) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(data.n, data.n);
    for (long j = 0; j < static_cast<long>(data.Q_ops.size()); ++j)
        if (w[j] != 0.0) out += w[j] * data.Q_ops[j];
    return out;
}

Eigen::MatrixXd hessian_apply(const QpInstance& instance, const Eigen::MatrixXd& E) {
    const QpOperatorData& data = instance.data;
    const Eigen::VectorXd pe = apply_P(data, E);
    const Eigen::VectorXd qe = apply_Q(data, E);
    const Eigen::VectorXd weighted = (data.D.array().square() * pe.array()).matrix();
    return instance.alpha2 * adjoint_Q(data, qe) - instance.alpha1 * adjoint_P(data, weighted);
}

QpOperatorData generate(long l, long n, double density, std::uint64_t seed) {
    if (!(density > 0.0 && density <= 1.0))
        throw std::invalid_argument("generate(qp): density must be in (0,1]");
    Rng rng(seed);
    QpOperatorData data;
    data.l = l;
    data.n = n;
    data.b.resize(l);
    for (long j = 0; j < l; ++j) data.b[j] = rng.uniform();
    data.D.resize(n);
    for (long i = 0; i < n; ++i)
        data.D[i] = static_cast<double>(rng.uniform_int(1, 1000));
    data.P_ops.reserve(n);
    for (long i = 0; i < n; ++i) data.P_ops.push_back(random_symmetric_sparse(n, density, rng));
    data.Q_ops.reserve(l);
    for (long j = 0; j < l; ++j) data.Q_ops.push_back(random_symmetric_sparse(n, density, rng));
    return data;
}

std::pair<double, double> calibrate(const QpOperatorData& data, double M_target,
                                    double m_target) {
    const double lambda_Q = power_iteration(
        [&data](const Eigen::MatrixXd& Z) { return adjoint_Q(data, apply_Q(data, Z)); }, data.n);
    const double alpha2 = M_target / lambda_Q;
    double alpha1 = 0.0;
    if (m_target > 0.0) {
        const Eigen::VectorXd D2 = data.D.array().square();
        const double lambda_P = power_iteration(
            [&data, &D2](const Eigen::MatrixXd& Z) {
                return adjoint_P(data, D2.cwiseProduct(apply_P(data, Z)));
            },
            data.n);
        alpha1 = m_target / lambda_P;
    }
    return {alpha1, alpha2};
}

QpInstance assemble(QpOperatorData data, double M_target, double m_target) {
    QpInstance instance;
    auto [alpha1, alpha2] = calibrate(data, M_target, m_target);
    instance.data = std::move(data);
    instance.alpha1 = alpha1;
    instance.alpha2 = alpha2;
    instance.M_target = M_target;
    instance.m_target = m_target;
    return instance;
}

ProblemOracle make_oracle(const QpInstance& instance) {
    auto shared = std::make_shared<const QpInstance>(instance);
    const long n = shared->data.n;
    if (shared->data.b.size() != static_cast<long>(shared->data.Q_ops.size()) ||
        shared->data.D.size() != static_cast<long>(shared->data.P_ops.size()))
        throw std::invalid_argument("qp oracle: operator counts do not match b and D");
    for (const auto& op : shared->data.P_ops)
        if (op.rows() != n || op.cols() != n)
            throw std::invalid_argument("qp oracle: P operator shape mismatch");
    for (const auto& op : shared->data.Q_ops)
        if (op.rows() != n || op.cols() != n)
            throw std::invalid_argument("qp oracle: Q operator shape mismatch");

    auto as_matrix = [n](const Point& z) {
        return Eigen::Map<const Eigen::MatrixXd>(z.data(), n, n);
    };
    auto as_point = [](const Eigen::MatrixXd& Z) {
        return Point(Eigen::Map<const Point>(Z.data(), Z.size()));
    };

    ProblemOracle oracle;
    oracle.dimension = n * n;
    oracle.curvature = shared->curvature();

    oracle.f_value = [shared, as_matrix](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        const Eigen::VectorXd pz = apply_P(shared->data, Z);
        const Eigen::VectorXd qz = apply_Q(shared->data, Z);
        return -0.5 * shared->alpha1 * (shared->data.D.cwiseProduct(pz)).squaredNorm() +
               0.5 * shared->alpha2 * (qz - shared->data.b).squaredNorm();
    };
    oracle.f_gradient = [shared, as_matrix, as_point](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        const Eigen::VectorXd pz = apply_P(shared->data, Z);
        const Eigen::VectorXd qz = apply_Q(shared->data, Z);
        const Eigen::VectorXd D2 = shared->data.D.array().square();
        const Eigen::MatrixXd grad =
            shared->alpha2 * adjoint_Q(shared->data, qz - shared->data.b) -
            shared->alpha1 * adjoint_P(shared->data, D2.cwiseProduct(pz));
        return as_point(grad);
    };
    oracle.h_prox = [as_matrix, as_point](const Point& z, double) {
        return as_point(project_spectraplex(as_matrix(z)));
    };
    oracle.h_value = [as_matrix](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        const double scale = 1.0 + Z.norm();
        if ((Z - Z.transpose()).norm() > 1e-8 * scale)
            return std::numeric_limits<double>::infinity();
        if (std::abs(Z.trace() - 1.0) > 1e-8 * scale)
            return std::numeric_limits<double>::infinity();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Z + Z.transpose()),
                                                           Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-8 * scale)
            return std::numeric_limits<double>::infinity();
        return 0.0;
    };
    oracle.omega_project = [as_matrix, as_point](const Point& z) {
        return as_point(project_psd_unit_sphere(as_matrix(z)));
    };
    return oracle;
}

Point initial_point(const QpInstance& instance) {
    const long n = instance.data.n;
    const Eigen::MatrixXd centroid =
        Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n);
    return Point(Eigen::Map<const Point>(centroid.data(), centroid.size()));
}

nlohmann::json to_json(const QpInstance& instance) {
    nlohmann::json j;
    j["family"] = "qp";
    j["l"] = instance.data.l;
    j["n"] = instance.data.n;
    j["alpha1"] = instance.alpha1;
    j["alpha2"] = instance.alpha2;
    j["M_target"] = instance.M_target;
    j["m_target"] = instance.m_target;
    j["b"] = std::vector<double>(instance.data.b.data(),
                                 instance.data.b.data() + instance.data.b.size());
    j["D"] = std::vector<double>(instance.data.D.data(),
                                 instance.data.D.data() + instance.data.D.size());
    auto dump_ops = [](const std::vector<Eigen::SparseMatrix<double>>& ops) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& op : ops) {
            nlohmann::json entries = nlohmann::json::array();
            for (int outer = 0; outer < op.outerSize(); ++outer)
                for (Eigen::SparseMatrix<double>::InnerIterator it(op, outer); it; ++it)
                    entries.push_back({it.row(), it.col(), it.value()});
            out.push_back(std::move(entries));
        }
        return out;
    };
    j["P_ops"] = dump_ops(instance.data.P_ops);
    j["Q_ops"] = dump_ops(instance.data.Q_ops);
    return j;
}

QpInstance from_json(const nlohmann::json& j) {
    if (j.at("family").get<std::string>() != "qp")
        throw std::invalid_argument("instance file is not a qp instance");
    QpInstance instance;
    instance.data.l = j.at("l").get<long>();
    instance.data.n = j.at("n").get<long>();
    instance.alpha1 = j.at("alpha1").get<double>();
    instance.alpha2 = j.at("alpha2").get<double>();
    instance.M_target = j.at("M_target").get<double>();
    instance.m_target = j.at("m_target").get<double>();
    const auto b = j.at("b").get<std::vector<double>>();
    instance.data.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<long>(b.size()));
    const auto D = j.at("D").get<std::vector<double>>();
    instance.data.D = Eigen::Map<const Eigen::VectorXd>(D.data(), static_cast<long>(D.size()));
    auto load_ops = [&](const nlohmann::json& arr) {
        std::vector<Eigen::SparseMatrix<double>> ops;
        ops.reserve(arr.size());
        for (const auto& entries : arr) {
            std::vector<Eigen::Triplet<double>> triplets;
            for (const auto& entry : entries)
                triplets.emplace_back(entry.at(0).get<long>(), entry.at(1).get<long>(),
                                      entry.at(2).get<double>());
            Eigen::SparseMatrix<double> op(instance.data.n, instance.data.n);
            op.setFromTriplets(triplets.begin(), triplets.end());
            op.makeCompressed();
            ops.push_back(std::move(op));
        }
        return ops;
    };
    instance.data.P_ops = load_ops(j.at("P_ops"));
    instance.data.Q_ops = load_ops(j.at("Q_ops"));
    return instance;
}

}  // namespace acfista::qp
