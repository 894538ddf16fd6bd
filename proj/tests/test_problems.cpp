#include "doctest.h"

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>

#include "acfista/problems/mc.hpp"
#include "acfista/problems/qp.hpp"
#include "acfista/problems/svm.hpp"
#include "acfista/prox.hpp"
#include "support/test_problems.hpp"

using namespace acfista;
using namespace testsupport;

namespace {

class TempFile {
public:
    explicit TempFile(const std::string& contents) {
        char name[] = "/tmp/acfista_test_XXXXXX";
        const int fd = mkstemp(name);
        REQUIRE(fd >= 0);
        path_ = name;
        std::ofstream out(path_);
        out << contents;
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

svm::SvmInstance single_point_instance() {
    svm::SvmInstance instance;
    instance.features.resize(1, 2);
    instance.features.insert(0, 0) = 1.0;
    instance.features.makeCompressed();
    instance.labels = Eigen::VectorXd::Ones(1);
    instance.lambda = 0.0;
    instance.r = 50.0;
    return instance;
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("svm oracle values and gradient at zero for a single data point") {
    const auto oracle = svm::make_oracle(single_point_instance());
    const Point zero = Point::Zero(2);
    CHECK(oracle.f_value(zero) == doctest::Approx(1.0).epsilon(1e-14));  // 1 - tanh(0)
    const Point grad = oracle.f_gradient(zero);
    CHECK(grad[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(grad[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(oracle.curvature.M == doctest::Approx(4.0 * std::sqrt(3.0) / 9.0).epsilon(1e-12));
}

TEST_CASE("svm objective stays inside its analytic band") {
    const auto instance = svm::generate(60, 25, 0.1, 1.0 / 25.0, 50.0, 21);
    const auto oracle = svm::make_oracle(instance);
    Rng rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        Point z(60);
        for (long i = 0; i < 60; ++i) z[i] = rng.uniform(-5.0, 5.0);
        const double ridge = 0.5 * instance.lambda * z.squaredNorm();
        const double f = oracle.f_value(z);
        CHECK(f >= ridge);
        CHECK(f <= 2.0 + ridge);
    }
}

TEST_CASE("svm gradient agrees with finite differences") {
    const auto instance = svm::generate(80, 30, 0.05, 1.0 / 30.0, 50.0, 23);
    const auto oracle = svm::make_oracle(instance);
    Rng rng(24);
    for (int point = 0; point < 20; ++point) {
        const Point z = svm::initial_point(instance, 100 + point);
        CHECK(max_directional_fd_error(oracle, z, rng) <= 1e-5);
    }
}

TEST_CASE("svm observed curvature never exceeds the formula bound") {
    const auto instance = svm::generate(120, 40, 0.05, 1.0 / 40.0, 50.0, 25);
    const auto oracle = svm::make_oracle(instance);
    acfista::SolverConfig config;
    config.M_cap = oracle.curvature.M / 0.9;
    config.rho_hat = 1e-7;
    config.max_iterations = 3000;
    const auto result = acfista::run_ac_fista(oracle, config, svm::initial_point(instance, 26));
    CHECK(result.reason == acfista::StopReason::ToleranceMet);
    for (const double C : result.ledger.C_values) CHECK(C <= oracle.curvature.M + 1e-8);
}

TEST_CASE("svm generator shapes, density and determinism") {
    const auto table1 = svm::generate(5000, 500, 0.05, 0.002, 50.0, 1);
    CHECK(table1.n() == 5000);
    CHECK(table1.p() == 500);
    CHECK(table1.features.nonZeros() == 500 * 250);  // 5% of 5000 per row
    for (long i = 0; i < table1.p(); ++i)
        CHECK(std::abs(table1.labels[i]) == 1.0);

    const auto dense = svm::generate(2, 1, 1.0, 0.5, 1.0, 2);
    CHECK(dense.features.nonZeros() == 2);

    const auto a = svm::generate(50, 20, 0.1, 0.05, 50.0, 77);
    const auto b = svm::generate(50, 20, 0.1, 0.05, 50.0, 77);
    CHECK(svm::to_json(a).dump() == svm::to_json(b).dump());
    CHECK_THROWS_AS(svm::generate(10, 5, 0.0, 0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("svm instances round-trip through json") {
    const auto instance = svm::generate(30, 10, 0.2, 0.1, 50.0, 5);
    const auto restored = svm::from_json(svm::to_json(instance));
    CHECK(svm::to_json(restored).dump() == svm::to_json(instance).dump());
}

TEST_CASE("qp gradient vanishes at the centroid when the residual does") {
    auto data = qp::generate(4, 6, 0.3, 31);
    const Eigen::MatrixXd centroid = Eigen::MatrixXd::Identity(6, 6) / 6.0;
    data.b = qp::apply_Q(data, centroid);
    qp::QpInstance instance;
    instance.data = std::move(data);
    instance.alpha1 = 0.0;
    instance.alpha2 = 3.0;
    instance.M_target = 1.0;
    instance.m_target = 0.0;
    const auto oracle = qp::make_oracle(instance);
    const Point z0 = qp::initial_point(instance);
    CHECK(oracle.f_gradient(z0).norm() <= 1e-12);
}

TEST_CASE("qp oracle reduces to the trace form for a single identity operator") {
    qp::QpInstance instance;
    instance.data.l = 0;
    instance.data.n = 3;
    Eigen::SparseMatrix<double> identity(3, 3);
    for (int i = 0; i < 3; ++i) identity.insert(i, i) = 1.0;
    identity.makeCompressed();
    instance.data.P_ops = {identity};
    instance.data.D = Eigen::VectorXd::Ones(1);
    instance.data.b.resize(0);
    instance.alpha1 = 0.7;
    instance.alpha2 = 1.0;
    instance.M_target = 1.0;
    instance.m_target = 0.7;
    const auto oracle = qp::make_oracle(instance);

    Eigen::MatrixXd Z(3, 3);
    Z << 1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, -0.3;
    const Point z = Eigen::Map<const Point>(Z.data(), 9);
    const double trace = Z.trace();
    CHECK(oracle.f_value(z) == doctest::Approx(-0.35 * trace * trace).epsilon(1e-12));
    const Eigen::MatrixXd grad =
        Eigen::Map<const Eigen::MatrixXd>(oracle.f_gradient(z).data(), 3, 3);
    CHECK((grad + 0.7 * trace * Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("qp gradient agrees with finite differences") {
    const auto instance = qp::assemble(qp::generate(6, 12, 0.15, 33), 100.0, 10.0);
    const auto oracle = qp::make_oracle(instance);
    Rng rng(34);
    for (int point = 0; point < 10; ++point) {
        Eigen::MatrixXd S(12, 12);
        for (int i = 0; i < 12; ++i)
            for (int j = i; j < 12; ++j) {
                S(i, j) = rng.uniform(-1.0, 1.0);
                S(j, i) = S(i, j);
            }
        const Point z = Eigen::Map<const Point>(S.data(), S.size());
        CHECK(max_directional_fd_error(oracle, z, rng) <= 1e-5);
    }
}

TEST_CASE("qp calibration hits the rank-one closed form") {
    qp::QpOperatorData data;
    data.l = 1;
    data.n = 4;
    Eigen::SparseMatrix<double> identity(4, 4);
    for (int i = 0; i < 4; ++i) identity.insert(i, i) = 1.0;
    identity.makeCompressed();
    data.Q_ops = {identity};
    data.b = Eigen::VectorXd::Zero(1);
    data.P_ops = {identity};
    data.D = Eigen::VectorXd::Ones(1);
    // T(Z) = tr(Z) I has largest eigenvalue n on the symmetric space
    const auto [alpha1, alpha2] = qp::calibrate(data, 12.0, 0.0);
    CHECK(alpha2 == doctest::Approx(12.0 / 4.0).epsilon(1e-7));
    CHECK(alpha1 == 0.0);
}

TEST_CASE("qp calibration bounds the Hessian spectrum") {
    const double M_target = 1e4;
    const double m_target = 1e2;
    const auto instance = qp::assemble(qp::generate(10, 20, 0.1, 35), M_target, m_target);
    Rng rng(36);
    const double eps = 1e-6 * M_target;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd E(20, 20);
        for (int i = 0; i < 20; ++i)
            for (int j = i; j < 20; ++j) {
                E(i, j) = rng.normal();
                E(j, i) = E(i, j);
            }
        const double rayleigh =
            qp::hessian_apply(instance, E).cwiseProduct(E).sum() / E.squaredNorm();
        CHECK(rayleigh <= M_target + eps);
        CHECK(rayleigh >= -m_target - eps);
    }
}

TEST_CASE("qp calibration copes with the large-M regime") {
    const auto instance = qp::assemble(qp::generate(6, 12, 0.2, 37), 1e6, 1e3);
    CHECK(instance.alpha1 > 0.0);
    CHECK(instance.alpha2 > 0.0);
    CHECK(instance.curvature().L == doctest::Approx(1e6));
}

TEST_CASE("qp generator shapes and determinism") {
    const auto data = qp::generate(50, 200, 0.025, 39);
    CHECK(data.b.size() == 50);
    CHECK(data.D.size() == 200);
    CHECK(data.P_ops.size() == 200);
    CHECK(data.Q_ops.size() == 50);
    CHECK(data.D.minCoeff() >= 1.0);
    CHECK(data.D.maxCoeff() <= 1000.0);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(data.P_ops[0]);
    CHECK((dense - dense.transpose()).norm() <= 1e-15);

    const auto a = qp::generate(5, 10, 0.2, 40);
    const auto b = qp::generate(5, 10, 0.2, 40);
    CHECK((a.b - b.b).norm() == 0.0);
    CHECK((a.D - b.D).norm() == 0.0);
    CHECK((Eigen::MatrixXd(a.P_ops[3]) - Eigen::MatrixXd(b.P_ops[3])).norm() == 0.0);
    CHECK_THROWS_AS(qp::generate(5, 10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("mc curvature triple and radius formulas") {
    const auto instance = mc::generate(10, 12, 2, 0.3, 1.0, 5.0, 1.0, 2.0, 1.0, 41);
    CHECK(instance.kappa() == doctest::Approx(2.0));
    const auto triple = instance.curvature();
    CHECK(triple.m == doctest::Approx(4.0));
    CHECK(triple.M == doctest::Approx(1.0));
    CHECK(triple.L == doctest::Approx(4.0));

    mc::Ratings single;
    single.l = 1;
    single.n = 1;
    single.entries.emplace_back(0, 0, 3.0);
    CHECK(mc::radius(single, 5.0) == doctest::Approx(3.0));

    mc::Ratings partial;
    partial.l = 1;
    partial.n = 2;
    partial.entries.emplace_back(0, 0, 0.0);
    CHECK(mc::radius(partial, 4.0) == doctest::Approx(4.0));
}

TEST_CASE("mc spectral gradient vanishes at the zero matrix") {
    const auto instance = mc::generate(5, 7, 2, 0.4, 1.0, 5.0, 1.5, 2.0, 1.0, 43);
    const auto oracle = mc::make_oracle(instance);
    const Point zero = Point::Zero(35);
    const Eigen::MatrixXd grad =
        Eigen::Map<const Eigen::MatrixXd>(oracle.f_gradient(zero).data(), 5, 7);
    const Eigen::MatrixXd expected = -Eigen::MatrixXd(instance.observed);
    CHECK((grad - expected).norm() <= 1e-12);
}

TEST_CASE("mc gradient agrees with finite differences") {
    const auto instance = mc::generate(6, 8, 2, 0.5, 1.0, 5.0, 1.0, 2.0, 1.0, 45);
    const auto oracle = mc::make_oracle(instance);
    Rng rng(46);
    for (int point = 0; point < 5; ++point) {
        const Point z = mc::initial_point(instance, 200 + point);
        CHECK(max_directional_fd_error(oracle, z, rng) <= 1e-4);
    }
    // near a low-rank matrix the spectral term must still differentiate
    Eigen::MatrixXd rank1 = Eigen::MatrixXd::Zero(6, 8);
    rank1.col(0).setOnes();
    Point z = Eigen::Map<const Point>(rank1.data(), rank1.size());
    z *= std::min(1.0, 0.5 * instance.R / z.norm());
    CHECK(max_directional_fd_error(oracle, z, rng, 4) <= 1e-4);
}

TEST_CASE("mc prox respects the ball and the nuclear shrinkage") {
    const auto instance = mc::generate(6, 8, 2, 0.5, 1.0, 5.0, 1.0, 2.0, 1.0, 47);
    const auto oracle = mc::make_oracle(instance);
    Rng rng(48);
    Point z(48);
    for (long i = 0; i < z.size(); ++i) z[i] = rng.uniform(-3.0, 3.0);
    const Point out = oracle.h_prox(z, 0.7);
    CHECK(out.norm() <= instance.R + 1e-8);
    CHECK(oracle.h_value(out) < std::numeric_limits<double>::infinity());
    // re-projection onto Omega is a fixed point
    const Point projected = oracle.omega_project(z);
    CHECK((oracle.omega_project(projected) - projected).norm() <= 1e-12);
}

TEST_CASE("load_ratings parses, dedups and reports errors") {
    TempFile simple("1\t2\t3.5\n");
    const auto single = mc::load_ratings(simple.path());
    CHECK(single.l == 1);
    CHECK(single.n == 2);
    REQUIRE(single.entries.size() == 1);
    CHECK(single.entries[0].value() == doctest::Approx(3.5));

    TempFile with_timestamps("1 1 4.0 881250949\n2 3 2.5 891717742\n1 1 1.0 878887116\n");
    const auto parsed = mc::load_ratings(with_timestamps.path());
    CHECK(parsed.l == 2);
    CHECK(parsed.n == 3);
    CHECK(parsed.entries.size() == 2);
    for (const auto& entry : parsed.entries)
        if (entry.row() == 0 && entry.col() == 0) CHECK(entry.value() == doctest::Approx(1.0));

    TempFile malformed("1 2 3.0\nnot a rating\n");
    try {
        mc::load_ratings(malformed.path());
        FAIL("malformed file was accepted");
    } catch (const std::runtime_error& err) {
        CHECK(std::string(err.what()).find("line 2") != std::string::npos);
    }

    TempFile empty("");
    CHECK_THROWS_AS(mc::load_ratings(empty.path()), std::runtime_error);
}

TEST_CASE("mc generator density, rejection and determinism") {
    const auto full = mc::generate(4, 5, 2, 1.0, 1.0, 5.0, 1.0, 1.0, 1.0, 49);
    CHECK(full.observed.nonZeros() == 20);
    CHECK_THROWS_AS(mc::generate(4, 5, 0, 0.5, 1.0, 5.0, 1.0, 1.0, 1.0, 49),
                    std::invalid_argument);

    const auto a = mc::generate(6, 7, 2, 0.3, 1.0, 5.0, 1.0, 1.0, 1.0, 50);
    const auto b = mc::generate(6, 7, 2, 0.3, 1.0, 5.0, 1.0, 1.0, 1.0, 50);
    CHECK(mc::to_json(a).dump() == mc::to_json(b).dump());
    // entries live inside the requested scale
    for (int outer = 0; outer < a.observed.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a.observed, outer); it; ++it) {
            CHECK(it.value() >= 1.0 - 1e-12);
            CHECK(it.value() <= 5.0 + 1e-12);
        }
}

TEST_CASE("oracle membership and re-projection fixed points per family") {
    const auto svm_instance = svm::generate(20, 8, 0.2, 0.125, 50.0, 51);
    const auto svm_oracle = svm::make_oracle(svm_instance);
    const Point z = svm::initial_point(svm_instance, 52);
    const Point prox_out = svm_oracle.h_prox(2.0 * z, 1.0);
    CHECK(svm_oracle.h_value(prox_out) < std::numeric_limits<double>::infinity());
    const Point reproj = svm_oracle.omega_project(prox_out);
    CHECK((svm_oracle.omega_project(reproj) - reproj).norm() <= 1e-12);

    const auto qp_instance = qp::assemble(qp::generate(4, 8, 0.2, 53), 100.0, 10.0);
    const auto qp_oracle = qp::make_oracle(qp_instance);
    Rng rng(54);
    Point w(64);
    for (long i = 0; i < w.size(); ++i) w[i] = rng.normal();
    const Point qp_prox = qp_oracle.h_prox(w, 1.0);
    CHECK(qp_oracle.h_value(qp_prox) < std::numeric_limits<double>::infinity());
    const Point qp_reproj = qp_oracle.omega_project(w);
    CHECK((qp_oracle.omega_project(qp_reproj) - qp_reproj).norm() <= 1e-12);
}

}  // TEST_SUITE
