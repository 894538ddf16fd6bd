// Benchmark harness: runs configured solver sets over the bundled problem
// families and writes traces, summaries and reports. See README.md for the
// config and file formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "acfista/bench/experiment.hpp"
#include "acfista/problems/mc.hpp"
#include "acfista/problems/qp.hpp"
#include "acfista/problems/svm.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<long> max_iter,
            std::optional<double> tol, std::optional<std::string> mode,
            std::optional<std::string> out_dir, std::optional<std::uint64_t> seed) {
    auto config = acfista::bench::load_config(config_path);
    acfista::bench::apply_overrides(config, max_iter, tol, mode, out_dir, seed);
    const auto outcome = acfista::bench::run_experiment(config);
    std::cout << acfista::bench::emit_summary_table(outcome.rows);
    std::cout << "summary: " << outcome.summary_file << "\n"
              << "report:  " << outcome.report_file << "\n";
    for (const auto& path : outcome.trace_files) std::cout << "trace:   " << path << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const auto config = acfista::bench::load_config(config_path);
    acfista::bench::validate_config(config);
    std::cout << "ok: " << config_path << "\n";
    return 0;
}

void write_instance(const nlohmann::json& j, const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << j.dump(2) << '\n';
    std::cout << "wrote " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for average-curvature FISTA solvers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;

    // run
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "experiment config (json)")->required();
    std::optional<long> max_iter;
    std::optional<double> tol;
    std::optional<std::string> mode;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;
    run->add_option("--max-iter", max_iter, "override max iterations for every solver");
    run->add_option("--tol", tol, "override the termination tolerance");
    run->add_option("--mode", mode, "termination mode: abs or rel")
        ->check(CLI::IsMember({"abs", "rel"}));
    run->add_option("--out-dir", out_dir, "override the output directory");
    run->add_option("--seed", seed_override, "override the experiment seed");

    // validate
    auto* validate = app.add_subcommand("validate", "schema-check a config; writes nothing");
    validate->add_option("config", config_path, "experiment config (json)")->required();

    // gen-instance
    auto* gen = app.add_subcommand("gen-instance", "generate and serialize a problem instance");
    gen->require_subcommand(1);

    long svm_n = 500, svm_p = 100;
    double svm_density = 0.05, svm_lambda = 0.0, svm_r = 50.0;
    auto* gen_svm = gen->add_subcommand("svm", "sigmoid-loss SVM over a ball");
    gen_svm->add_option("--n", svm_n, "feature dimension");
    gen_svm->add_option("--p", svm_p, "number of data points");
    gen_svm->add_option("--density", svm_density, "feature density in (0,1]");
    gen_svm->add_option("--lambda", svm_lambda, "ridge weight (default 1/p)");
    gen_svm->add_option("--r", svm_r, "ball radius");

    long qp_l = 20, qp_n = 60;
    double qp_density = 0.05, qp_M = 1e4, qp_m = 1e2;
    auto* gen_qp = gen->add_subcommand("qp", "indefinite quadratic over the spectraplex");
    gen_qp->add_option("--l", qp_l, "number of Q operators");
    gen_qp->add_option("--n", qp_n, "matrix order");
    gen_qp->add_option("--density", qp_density, "operator density in (0,1]");
    gen_qp->add_option("--M-target", qp_M, "largest Hessian eigenvalue bound");
    gen_qp->add_option("--m-target", qp_m, "negative curvature bound");

    long mc_l = 80, mc_n = 120, mc_rank = 5;
    double mc_density = 0.2, mc_smin = 1.0, mc_smax = 5.0;
    double mc_mu = 2.0, mc_beta = 1.0, mc_tau = 1.0;
    auto* gen_mc = gen->add_subcommand("mc", "low-rank completion with log-sum penalty");
    gen_mc->add_option("--l", mc_l, "rows");
    gen_mc->add_option("--n", mc_n, "columns");
    gen_mc->add_option("--rank", mc_rank, "ground-truth rank");
    gen_mc->add_option("--density", mc_density, "observed fraction in (0,1]");
    gen_mc->add_option("--scale-min", mc_smin, "smallest entry of the ground truth");
    gen_mc->add_option("--scale-max", mc_smax, "largest entry of the ground truth");
    gen_mc->add_option("--mu", mc_mu, "penalty weight");
    gen_mc->add_option("--beta", mc_beta, "log-sum beta");
    gen_mc->add_option("--tau", mc_tau, "log-sum tau");

    for (auto* sub : {gen_svm, gen_qp, gen_mc}) {
        sub->add_option("--seed", seed, "generator seed");
        sub->add_option("--out", out_path, "output instance file")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) return cmd_run(config_path, max_iter, tol, mode, out_dir, seed_override);
        if (validate->parsed()) return cmd_validate(config_path);
        if (gen->parsed()) {
            if (gen_svm->parsed()) {
                const double lambda =
                    svm_lambda > 0.0 ? svm_lambda : 1.0 / static_cast<double>(svm_p);
                const auto instance =
                    acfista::svm::generate(svm_n, svm_p, svm_density, lambda, svm_r, seed);
                auto j = acfista::svm::to_json(instance);
                j["seed"] = seed;
                write_instance(j, out_path);
            } else if (gen_qp->parsed()) {
                const auto instance =
                    acfista::qp::assemble(acfista::qp::generate(qp_l, qp_n, qp_density, seed),
                                          qp_M, qp_m);
                auto j = acfista::qp::to_json(instance);
                j["seed"] = seed;
                write_instance(j, out_path);
            } else if (gen_mc->parsed()) {
                const auto instance =
                    acfista::mc::generate(mc_l, mc_n, mc_rank, mc_density, mc_smin, mc_smax,
                                          mc_mu, mc_beta, mc_tau, seed);
                auto j = acfista::mc::to_json(instance);
                j["seed"] = seed;
                write_instance(j, out_path);
            }
            return 0;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
