#include "acfista/problems/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "acfista/prox.hpp"
#include "acfista/rng.hpp"

namespace acfista::svm {

namespace {

// Largest curvature of t -> 1 - tanh(t): max |2 tanh(t) sech^2(t)| = 4*sqrt(3)/9.
constexpr double kSigmoidCurvature = 0.7698003589195010;

// Uniform draw from the ball of radius r (direction from normals, radius
// via the u^(1/n) rule).
Eigen::VectorXd sample_ball(long n, double r, Rng& rng) {
    Eigen::VectorXd direction(n);
    for (long i = 0; i < n; ++i) direction[i] = rng.normal();
    const double norm = direction.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(n);
    const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    return (radius / norm) * direction;
}

}  // namespace

CurvatureTriple SvmInstance::curvature() const {
    double sum = 0.0;
    for (long i = 0; i < p(); ++i) sum += features.row(i).squaredNorm();
    const double value = kSigmoidCurvature * sum / static_cast<double>(p()) + lambda;
    return CurvatureTriple{value, value, value};
}

SvmInstance generate(long n, long p, double density, double lambda, double r,
                     std::uint64_t seed) {
    if (!(density > 0.0 && density <= 1.0))
        throw std::invalid_argument("generate(svm): density must be in (0,1]");
    if (!(lambda > 0.0)) throw std::invalid_argument("generate(svm): lambda must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("generate(svm): r must be positive");

    Rng rng(seed);
    const long nnz_per_row = std::max<long>(1, std::lround(density * static_cast<double>(n)));

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz_per_row * p));
    std::vector<long> columns(n);
    for (long j = 0; j < n; ++j) columns[j] = j;
    for (long i = 0; i < p; ++i) {
        // partial Fisher-Yates picks nnz distinct columns
        for (long t = 0; t < nnz_per_row; ++t) {
            const long pick =
                t + static_cast<long>(rng.uniform_int(0, static_cast<std::uint64_t>(n - 1 - t)));
            std::swap(columns[t], columns[pick]);
            triplets.emplace_back(i, columns[t], rng.uniform());
        }
    }

    SvmInstance instance;
    instance.features.resize(p, n);
    instance.features.setFromTriplets(triplets.begin(), triplets.end());
    instance.features.makeCompressed();
    instance.lambda = lambda;
    instance.r = r;

    const Eigen::VectorXd separator = sample_ball(n, r, rng);
    instance.labels.resize(p);
    for (long i = 0; i < p; ++i) {
        const double inner = instance.features.row(i).dot(separator);
        instance.labels[i] = inner < 0.0 ? -1.0 : 1.0;
    }
    return instance;
}

ProblemOracle make_oracle(const SvmInstance& instance) {
    auto data = std::make_shared<const SvmInstance>(instance);
    const double p = static_cast<double>(data->p());
    const double r = data->r;
    const double lambda = data->lambda;

    ProblemOracle oracle;
    oracle.dimension = data->n();
    oracle.curvature = data->curvature();

    oracle.f_value = [data, p, lambda](const Point& z) {
        const Eigen::VectorXd margins =
            data->labels.cwiseProduct(data->features * z);
        double loss = 0.0;
        for (long i = 0; i < margins.size(); ++i) loss += 1.0 - std::tanh(margins[i]);
        return loss / p + 0.5 * lambda * z.squaredNorm();
    };
    oracle.f_gradient = [data, p, lambda](const Point& z) {
        const Eigen::VectorXd margins =
            data->labels.cwiseProduct(data->features * z);
        Eigen::VectorXd weights(margins.size());
        for (long i = 0; i < margins.size(); ++i) {
            const double th = std::tanh(margins[i]);
            weights[i] = -data->labels[i] * (1.0 - th * th);  // d/dt [1 - tanh]
        }
        return Point(data->features.transpose() * weights / p + lambda * z);
    };
    oracle.h_prox = [r](const Point& z, double) { return project_ball(z, r); };
    oracle.h_value = [r](const Point& z) {
        return z.norm() <= r * (1.0 + 1e-9) + 1e-12 ? 0.0
                                                    : std::numeric_limits<double>::infinity();
    };
    oracle.omega_project = [r](const Point& z) { return project_ball(z, r); };
    return oracle;
}

Point initial_point(const SvmInstance& instance, std::uint64_t seed) {
    Rng rng = Rng(seed).derive(0x5a);
    return sample_ball(instance.n(), instance.r, rng);
}

nlohmann::json to_json(const SvmInstance& instance) {
    nlohmann::json j;
    j["family"] = "svm";
    j["n"] = instance.n();
    j["p"] = instance.p();
    j["lambda"] = instance.lambda;
    j["r"] = instance.r;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < instance.features.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(instance.features, i);
             it; ++it)
            rows.push_back({it.row(), it.col(), it.value()});
    j["features"] = std::move(rows);
    j["labels"] = std::vector<double>(instance.labels.data(),
                                      instance.labels.data() + instance.labels.size());
    return j;
}

SvmInstance from_json(const nlohmann::json& j) {
    if (j.at("family").get<std::string>() != "svm")
        throw std::invalid_argument("instance file is not an svm instance");
    SvmInstance instance;
    const long n = j.at("n").get<long>();
    const long p = j.at("p").get<long>();
    instance.lambda = j.at("lambda").get<double>();
    instance.r = j.at("r").get<double>();
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& entry : j.at("features"))
        triplets.emplace_back(entry.at(0).get<long>(), entry.at(1).get<long>(),
                              entry.at(2).get<double>());
    instance.features.resize(p, n);
    instance.features.setFromTriplets(triplets.begin(), triplets.end());
    instance.features.makeCompressed();
    const auto labels = j.at("labels").get<std::vector<double>>();
    instance.labels = Eigen::Map<const Eigen::VectorXd>(labels.data(),
                                                        static_cast<long>(labels.size()));
    return instance;
}

}  // namespace acfista::svm
