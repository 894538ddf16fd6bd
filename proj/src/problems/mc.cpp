#include "acfista/problems/mc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "acfista/prox.hpp"
#include "acfista/rng.hpp"

namespace acfista::mc {

namespace {

double log_sum_penalty(double t, double beta, double tau) {
    return beta * std::log1p(std::abs(t) / tau);
}

}  // namespace

Ratings load_ratings(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw std::runtime_error("load_ratings: cannot open " + path);

    std::map<std::pair<long, long>, double> last_value;
    std::string line;
    long line_number = 0;
    long max_user = 0;
    long max_item = 0;
    while (std::getline(input, line)) {
        ++line_number;
        std::istringstream fields(line);
        long user = 0;
        long item = 0;
        double rating = 0.0;
        if (!(fields >> user >> item >> rating) || user < 1 || item < 1) {
            // allow blank lines, reject anything else malformed
            std::istringstream probe(line);
            std::string token;
            if (probe >> token)
                throw std::runtime_error("load_ratings: malformed line " +
                                         std::to_string(line_number) + " in " + path);
            continue;
        }
        // a trailing timestamp column is tolerated and ignored
        last_value[{user - 1, item - 1}] = rating;
        max_user = std::max(max_user, user);
        max_item = std::max(max_item, item);
    }
    if (last_value.empty()) throw std::runtime_error("load_ratings: no ratings in " + path);

    Ratings ratings;
    ratings.l = max_user;
    ratings.n = max_item;
    ratings.entries.reserve(last_value.size());
    for (const auto& [key, value] : last_value)
        ratings.entries.emplace_back(key.first, key.second, value);
    return ratings;
}

double radius(const Ratings& ratings, double scale_max) {
    if (!(scale_max > 0.0)) throw std::invalid_argument("radius: scale_max must be positive");
    double observed_sq = 0.0;
    for (const auto& entry : ratings.entries) observed_sq += entry.value() * entry.value();
    const double unobserved =
        static_cast<double>(ratings.l) * static_cast<double>(ratings.n) -
        static_cast<double>(ratings.entries.size());
    return std::sqrt(observed_sq + unobserved * scale_max * scale_max);
}

McInstance generate(long l, long n, long rank, double density, double scale_min,
                    double scale_max, double mu, double beta, double tau,
                    std::uint64_t seed) {
    if (rank < 1 || rank > std::min(l, n))
        throw std::invalid_argument("generate(mc): rank must be in [1, min(l,n)]");
    if (!(density > 0.0 && density <= 1.0))
        throw std::invalid_argument("generate(mc): density must be in (0,1]");
    if (!(scale_max > scale_min))
        throw std::invalid_argument("generate(mc): scale_max must exceed scale_min");
    if (!(mu > 0.0 && beta > 0.0 && tau > 0.0))
        throw std::invalid_argument("generate(mc): mu, beta, tau must be positive");

    Rng rng(seed);
    Eigen::MatrixXd left(l, rank);
    Eigen::MatrixXd right(n, rank);
    for (long i = 0; i < l; ++i)
        for (long k = 0; k < rank; ++k) left(i, k) = rng.normal();
    for (long j = 0; j < n; ++j)
        for (long k = 0; k < rank; ++k) right(j, k) = rng.normal();
    Eigen::MatrixXd truth = left * right.transpose();
    const double lo = truth.minCoeff();
    const double hi = truth.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    truth = ((truth.array() - lo) / span * (scale_max - scale_min) + scale_min).matrix();

    const long cells = l * n;
    const long count = std::max<long>(1, std::lround(density * static_cast<double>(cells)));
    std::unordered_set<long> picked;
    picked.reserve(static_cast<std::size_t>(count) * 2);
    std::vector<long> order;
    order.reserve(count);
    for (long j = cells - count; j < cells; ++j) {
        const long t = static_cast<long>(rng.uniform_int(0, static_cast<std::uint64_t>(j)));
        if (picked.insert(t).second)
            order.push_back(t);
        else {
            picked.insert(j);
            order.push_back(j);
        }
    }

    Ratings observed;
    observed.l = l;
    observed.n = n;
    observed.entries.reserve(order.size());
    for (const long cell : order) {
        const long row = cell / n;
        const long col = cell % n;
        observed.entries.emplace_back(row, col, truth(row, col));
    }
    return from_ratings(observed, scale_max, mu, beta, tau);
}

McInstance from_ratings(const Ratings& ratings, double scale_max, double mu, double beta,
                        double tau) {
    McInstance instance;
    instance.l = ratings.l;
    instance.n = ratings.n;
    instance.observed.resize(ratings.l, ratings.n);
    instance.observed.setFromTriplets(
        ratings.entries.begin(), ratings.entries.end(),
        [](const double&, const double& b) { return b; });  // keep last duplicate
    instance.observed.makeCompressed();
    instance.mu = mu;
    instance.beta = beta;
    instance.tau_pen = tau;
    instance.R = radius(ratings, scale_max);
    return instance;
}

ProblemOracle make_oracle(const McInstance& instance) {
    auto data = std::make_shared<const McInstance>(instance);
    const long rows = data->l;
    const long cols = data->n;
    const double R = data->R;
    const double nuclear_weight = data->mu * data->p0();

    auto as_matrix = [rows, cols](const Point& z) {
        return Eigen::Map<const Eigen::MatrixXd>(z.data(), rows, cols);
    };
    auto as_point = [](const Eigen::MatrixXd& Z) {
        return Point(Eigen::Map<const Point>(Z.data(), Z.size()));
    };

    ProblemOracle oracle;
    oracle.dimension = rows * cols;
    oracle.curvature = data->curvature();

    oracle.f_value = [data, as_matrix](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        double fit = 0.0;
        for (int outer = 0; outer < data->observed.outerSize(); ++outer)
            for (Eigen::SparseMatrix<double>::InnerIterator it(data->observed, outer); it; ++it) {
                const double residual = Z(it.row(), it.col()) - it.value();
                fit += residual * residual;
            }
        const Eigen::VectorXd sigma = svd_factorize(Z).values;
        const double p0 = data->p0();
        double penalty = 0.0;
        for (long i = 0; i < sigma.size(); ++i)
            penalty += log_sum_penalty(sigma[i], data->beta, data->tau_pen) - p0 * sigma[i];
        return 0.5 * fit + data->mu * penalty;
    };
    oracle.f_gradient = [data, as_matrix, as_point](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(Z.rows(), Z.cols());
        for (int outer = 0; outer < data->observed.outerSize(); ++outer)
            for (Eigen::SparseMatrix<double>::InnerIterator it(data->observed, outer); it; ++it)
                grad(it.row(), it.col()) = Z(it.row(), it.col()) - it.value();
        const SpectralFactorization f = svd_factorize(Z);
        const double p0 = data->p0();
        Eigen::VectorXd spectral(f.values.size());
        for (long i = 0; i < f.values.size(); ++i) {
            // p'(t) - p0 = -beta t / (tau (tau + t)), zero at t = 0
            const double t = f.values[i];
            spectral[i] = data->beta / (data->tau_pen + t) - p0;
        }
        grad.noalias() += data->mu * f.left * spectral.asDiagonal() * f.right.transpose();
        return as_point(grad);
    };
    oracle.h_prox = [as_matrix, as_point, nuclear_weight, R](const Point& z, double stepsize) {
        return as_point(prox_nuclear_ball(as_matrix(z), nuclear_weight * stepsize, R));
    };
    oracle.h_value = [as_matrix, nuclear_weight, R](const Point& z) {
        const Eigen::MatrixXd Z = as_matrix(z);
        if (Z.norm() > R * (1.0 + 1e-9) + 1e-12)
            return std::numeric_limits<double>::infinity();
        return nuclear_weight * svd_factorize(Z).values.sum();
    };
    oracle.omega_project = [R](const Point& z) { return project_ball(z, R); };
    return oracle;
}

Point initial_point(const McInstance& instance, std::uint64_t seed) {
    Rng rng = Rng(seed).derive(0x5a);
    Point z(instance.l * instance.n);
    for (long i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const double norm = z.norm();
    if (norm > instance.R) z *= instance.R / norm;
    return z;
}

nlohmann::json to_json(const McInstance& instance) {
    nlohmann::json j;
    j["family"] = "mc";
    j["l"] = instance.l;
    j["n"] = instance.n;
    j["mu"] = instance.mu;
    j["beta"] = instance.beta;
    j["tau"] = instance.tau_pen;
    j["R"] = instance.R;
    nlohmann::json entries = nlohmann::json::array();
    for (int outer = 0; outer < instance.observed.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(instance.observed, outer); it; ++it)
            entries.push_back({it.row(), it.col(), it.value()});
    j["observed"] = std::move(entries);
    return j;
}

McInstance from_json(const nlohmann::json& j) {
    if (j.at("family").get<std::string>() != "mc")
        throw std::invalid_argument("instance file is not an mc instance");
    McInstance instance;
    instance.l = j.at("l").get<long>();
    instance.n = j.at("n").get<long>();
    instance.mu = j.at("mu").get<double>();
    instance.beta = j.at("beta").get<double>();
    instance.tau_pen = j.at("tau").get<double>();
    instance.R = j.at("R").get<double>();
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& entry : j.at("observed"))
        triplets.emplace_back(entry.at(0).get<long>(), entry.at(1).get<long>(),
                              entry.at(2).get<double>());
    instance.observed.resize(instance.l, instance.n);
    instance.observed.setFromTriplets(triplets.begin(), triplets.end());
    instance.observed.makeCompressed();
    return instance;
}

}  // namespace acfista::mc
