#include "acfista/bench/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "acfista/problems/mc.hpp"
#include "acfista/problems/qp.hpp"
#include "acfista/problems/svm.hpp"
#include "acfista/prox.hpp"
#include "acfista/rng.hpp"
#include "acfista/solver.hpp"

namespace acfista::bench {

namespace {

const std::set<std::string> kMethods = {"ac_fista", "ac_fista_restart", "ac_acg",
                                        "fista_constant"};

std::string sanitize(const std::string& label) {
    std::string out;
    out.reserve(label.size());
    for (const char c : label)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
                          ? c
                          : '_');
    return out.empty() ? std::string("solver") : out;
}

SolverConfig config_for(const ProblemOracle& oracle, const nlohmann::json& overrides) {
    SolverConfig cfg;
    cfg.M_cap = oracle.curvature.M / 0.9;
    if (overrides.contains("alpha")) cfg.alpha = overrides.at("alpha").get<double>();
    if (overrides.contains("gamma")) cfg.gamma = overrides.at("gamma").get<double>();
    if (overrides.contains("M_cap")) cfg.M_cap = overrides.at("M_cap").get<double>();
    if (overrides.contains("M_init")) cfg.M_init = overrides.at("M_init").get<double>();
    if (overrides.contains("rho_hat")) cfg.rho_hat = overrides.at("rho_hat").get<double>();
    if (overrides.contains("max_iterations"))
        cfg.max_iterations = overrides.at("max_iterations").get<long>();
    if (overrides.contains("good_threshold"))
        cfg.good_threshold = overrides.at("good_threshold").get<double>();
    if (overrides.contains("termination")) {
        const auto mode = overrides.at("termination").get<std::string>();
        if (mode == "absolute")
            cfg.termination = TerminationMode::Absolute;
        else if (mode == "relative")
            cfg.termination = TerminationMode::Relative;
        else
            throw std::runtime_error("unknown termination mode: " + mode);
    }
    if (overrides.contains("iterate_rule")) {
        const auto rule = overrides.at("iterate_rule").get<std::string>();
        if (rule == "monotone")
            cfg.iterate_rule = IterateRule::Monotone;
        else if (rule == "non_monotone")
            cfg.iterate_rule = IterateRule::NonMonotone;
        else
            throw std::runtime_error("unknown iterate rule: " + rule);
    }
    if (overrides.contains("seed")) cfg.seed = overrides.at("seed").get<std::uint64_t>();
    return cfg;
}

SolverResult execute(const SolverSpec& spec, const ProblemOracle& oracle,
                     const SolverConfig& cfg, const Point& z0) {
    if (spec.method == "ac_fista") return run_ac_fista(oracle, cfg, z0);
    if (spec.method == "ac_fista_restart") {
        SolverConfig with_restart = cfg;
        with_restart.restart = true;
        return run_ac_fista(oracle, with_restart, z0);
    }
    if (spec.method == "ac_acg") return run_ac_acg(oracle, cfg, z0);
    if (spec.method == "fista_constant") {
        const double M_const = spec.overrides.contains("M_const")
                                   ? spec.overrides.at("M_const").get<double>()
                                   : oracle.curvature.L / 0.9;
        return run_fista_constant(oracle, M_const, cfg, z0);
    }
    throw std::runtime_error("unknown method: " + spec.method);
}

void write_trace_csv(const std::string& path, const Trace& trace, long stride) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,a_k,M_k,C_k,L_k,good,v_norm,phi,resolvents,restarted\n";
    if (stride < 1) stride = 1;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != trace.size()) continue;
        const IterationRecord& rec = trace[i];
        out << rec.k << ',' << format_double(rec.a_k) << ',' << format_double(rec.M_k) << ','
            << format_double(rec.C_k) << ',' << format_double(rec.L_k) << ','
            << (rec.is_good ? 1 : 0) << ',' << format_double(rec.v_norm) << ','
            << format_double(rec.phi) << ',' << rec.resolvents << ','
            << (rec.restarted ? 1 : 0) << '\n';
    }
}

Point seeded_ball_point(long n, double radius, std::uint64_t seed) {
    Rng rng = Rng(seed).derive(0x5a);
    Point z(n);
    for (long i = 0; i < n; ++i) z[i] = rng.normal();
    const double norm = z.norm();
    if (norm == 0.0) return Point::Zero(n);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    return (r / norm) * z;
}

BuiltProblem build_quadratic(const nlohmann::json& p, std::uint64_t seed) {
    const long n = p.value("n", 20L);
    const double q_min = p.value("q_min", 1.0);
    const double q_max = p.value("q_max", 4.0);
    const double omega_radius = p.value("radius", 1e6);
    const double start_radius = p.value("start_radius", 1.0);
    if (!(n >= 1 && q_min > 0.0 && q_max >= q_min))
        throw std::runtime_error("quadratic: need n >= 1 and 0 < q_min <= q_max");

    Eigen::VectorXd q(n);
    for (long i = 0; i < n; ++i)
        q[i] = n == 1 ? q_max
                      : q_min * std::pow(q_max / q_min,
                                         static_cast<double>(i) / static_cast<double>(n - 1));

    BuiltProblem built;
    built.oracle.dimension = n;
    built.oracle.curvature = CurvatureTriple{0.0, q_max, q_max};
    built.oracle.f_value = [q](const Point& z) { return 0.5 * (q.array() * z.array().square()).sum(); };
    built.oracle.f_gradient = [q](const Point& z) { return Point(q.cwiseProduct(z)); };
    built.oracle.h_prox = [](const Point& z, double) { return z; };
    built.oracle.h_value = [](const Point&) { return 0.0; };
    built.oracle.omega_project = [omega_radius](const Point& z) {
        return Point(project_ball(z, omega_radius));
    };
    built.z0 = seeded_ball_point(n, start_radius, seed);
    built.descriptor = {{"family", "quadratic"}, {"n", n},      {"q_min", q_min},
                        {"q_max", q_max},        {"radius", omega_radius},
                        {"start_radius", start_radius}};
    return built;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream input(path);
    if (!input) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    input >> j;
    return j;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig config;
    config.name = j.value("name", "experiment");
    config.seed = j.value("seed", 0ULL);
    config.output_dir = j.value("output_dir", "out");
    config.trace_stride = j.value("trace_stride", 1L);
    if (!j.contains("problem")) throw std::runtime_error("config: missing \"problem\"");
    config.problem = j.at("problem");
    if (!j.contains("solvers") || !j.at("solvers").is_array() || j.at("solvers").empty())
        throw std::runtime_error("config: needs a non-empty \"solvers\" array");
    std::set<std::string> used;
    for (const auto& entry : j.at("solvers")) {
        SolverSpec spec;
        spec.method = entry.at("method").get<std::string>();
        spec.label = entry.value("label", spec.method);
        spec.overrides = entry.value("config", nlohmann::json::object());
        if (entry.contains("M_const")) spec.overrides["M_const"] = entry.at("M_const");
        std::string label = sanitize(spec.label);
        int suffix = 2;
        while (used.count(label)) label = sanitize(spec.label) + "_" + std::to_string(suffix++);
        used.insert(label);
        spec.label = label;
        config.solvers.push_back(std::move(spec));
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(load_json_file(path));
}

void validate_config(const ExperimentConfig& config) {
    if (config.solvers.empty()) throw std::runtime_error("config: no solvers");
    for (const auto& spec : config.solvers)
        if (!kMethods.count(spec.method))
            throw std::runtime_error("config: unknown method " + spec.method);
    if (!config.problem.contains("family"))
        throw std::runtime_error("config: problem needs a \"family\"");
    const auto family = config.problem.at("family").get<std::string>();
    if (family != "svm" && family != "qp" && family != "mc" && family != "quadratic")
        throw std::runtime_error("config: unknown family " + family);
    for (const char* key : {"instance_file", "ratings_file"})
        if (config.problem.contains(key)) {
            const auto path = config.problem.at(key).get<std::string>();
            if (!std::filesystem::exists(path))
                throw std::runtime_error(std::string("config: missing file ") + path);
        }
    if (config.trace_stride < 1) throw std::runtime_error("config: trace_stride must be >= 1");
}

BuiltProblem build_problem(const nlohmann::json& problem, std::uint64_t seed) {
    const auto family = problem.at("family").get<std::string>();
    BuiltProblem built;
    if (family == "quadratic") return build_quadratic(problem, seed);
    if (family == "svm") {
        svm::SvmInstance instance;
        if (problem.contains("instance_file"))
            instance = svm::from_json(
                load_json_file(problem.at("instance_file").get<std::string>()));
        else {
            const long n = problem.at("n").get<long>();
            const long p = problem.at("p").get<long>();
            const double density = problem.value("density", 0.05);
            const double lambda = problem.value("lambda", 1.0 / static_cast<double>(p));
            const double r = problem.value("r", 50.0);
            instance = svm::generate(n, p, density, lambda, r, seed);
        }
        built.oracle = svm::make_oracle(instance);
        built.z0 = svm::initial_point(instance, seed);
        built.descriptor = {{"family", "svm"},      {"n", instance.n()},
                            {"p", instance.p()},    {"lambda", instance.lambda},
                            {"r", instance.r},      {"M_formula", instance.curvature().M}};
        return built;
    }
    if (family == "qp") {
        qp::QpInstance instance;
        if (problem.contains("instance_file"))
            instance = qp::from_json(
                load_json_file(problem.at("instance_file").get<std::string>()));
        else {
            const long l = problem.at("l").get<long>();
            const long n = problem.at("n").get<long>();
            const double density = problem.value("density", 0.025);
            const double M_target = problem.value("M_target", 1e4);
            const double m_target = problem.value("m_target", 1e2);
            instance = qp::assemble(qp::generate(l, n, density, seed), M_target, m_target);
        }
        built.oracle = qp::make_oracle(instance);
        built.z0 = qp::initial_point(instance);
        built.descriptor = {{"family", "qp"},
                            {"l", instance.data.l},
                            {"n", instance.data.n},
                            {"M_target", instance.M_target},
                            {"m_target", instance.m_target},
                            {"alpha1", instance.alpha1},
                            {"alpha2", instance.alpha2}};
        return built;
    }
    if (family == "mc") {
        mc::McInstance instance;
        if (problem.contains("instance_file"))
            instance = mc::from_json(
                load_json_file(problem.at("instance_file").get<std::string>()));
        else if (problem.contains("ratings_file")) {
            const auto ratings =
                mc::load_ratings(problem.at("ratings_file").get<std::string>());
            instance = mc::from_ratings(ratings, problem.value("scale_max", 5.0),
                                        problem.value("mu", 2.0), problem.value("beta", 1.0),
                                        problem.value("tau", 1.0));
        } else {
            instance = mc::generate(problem.at("l").get<long>(), problem.at("n").get<long>(),
                                    problem.value("rank", 5L), problem.value("density", 0.2),
                                    problem.value("scale_min", 1.0),
                                    problem.value("scale_max", 5.0), problem.value("mu", 2.0),
                                    problem.value("beta", 1.0), problem.value("tau", 1.0), seed);
        }
        built.oracle = mc::make_oracle(instance);
        built.z0 = mc::initial_point(instance, seed);
        built.descriptor = {{"family", "mc"},       {"l", instance.l},
                            {"n", instance.n},      {"mu", instance.mu},
                            {"beta", instance.beta}, {"tau", instance.tau_pen},
                            {"R", instance.R},      {"m", instance.curvature().m}};
        return built;
    }
    throw std::runtime_error("unknown family " + family);
}

std::string format_double(double value, int significant) {
    if (std::isnan(value)) return "nan";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", significant, value);
    return buffer;
}

std::string emit_summary_table(const std::vector<SummaryRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("emit_summary_table: no rows");
    std::ostringstream out;
    out << "method,reason,iterations,resolvents,final_phi,final_residual,theta_bar,tau_bar,"
           "bad_fraction\n";
    for (const auto& row : rows) {
        out << row.method << ',' << row.reason << ',' << row.iterations << ','
            << row.resolvents << ',' << format_double(row.final_phi, 6) << ','
            << format_double(row.final_residual, 6) << ','
            << (row.theta_bar ? format_double(*row.theta_bar, 6) : "") << ','
            << (row.tau_bar ? format_double(*row.tau_bar, 6) : "") << ','
            << format_double(row.bad_fraction, 6) << '\n';
    }
    return out.str();
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const BuiltProblem built = build_problem(config.problem, config.seed);
    std::filesystem::create_directories(config.output_dir);

    ExperimentOutcome outcome;
    nlohmann::json report;
    report["name"] = config.name;
    report["seed"] = config.seed;
    report["problem"] = built.descriptor;
    report["solvers"] = nlohmann::json::array();
    nlohmann::json timings = nlohmann::json::object();

    for (const auto& spec : config.solvers) {
        SolverConfig cfg = config_for(built.oracle, spec.overrides);
        const auto started = std::chrono::steady_clock::now();
        SolverResult result;
        try {
            result = execute(spec, built.oracle, cfg, built.z0);
        } catch (const OracleError& err) {
            throw std::runtime_error("solver " + spec.label + ": " + err.what());
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        const DiagnosticsReport diag = build_report(result);
        SummaryRow row;
        row.method = spec.label;
        row.reason = to_string(result.reason);
        row.iterations = static_cast<long>(result.ledger.size());
        row.resolvents = result.total_resolvents;
        row.final_phi = result.final_phi;
        row.final_residual = result.final_residual;
        row.theta_bar = diag.theta_bar;
        row.tau_bar = diag.tau_bar;
        row.bad_fraction = diag.bad_fraction;
        outcome.rows.push_back(row);

        const std::string trace_path =
            (std::filesystem::path(config.output_dir) / (spec.label + "_trace.csv")).string();
        write_trace_csv(trace_path, result.trace, config.trace_stride);
        outcome.trace_files.push_back(trace_path);

        nlohmann::json entry;
        entry["label"] = spec.label;
        entry["method"] = spec.method;
        entry["reason"] = row.reason;
        entry["iterations"] = row.iterations;
        entry["completed_iterations"] = result.iterations;
        entry["resolvents"] = row.resolvents;
        entry["final_phi"] = row.final_phi;
        entry["final_residual"] = row.final_residual;
        entry["grad_z0_norm"] = result.grad_z0_norm;
        entry["wall_seconds"] = wall;
        entry["diagnostics"] = to_json(diag);
        report["solvers"].push_back(std::move(entry));
        timings[spec.label] = wall;
    }

    outcome.summary_file =
        (std::filesystem::path(config.output_dir) / "summary.csv").string();
    {
        std::ofstream out(outcome.summary_file);
        if (!out) throw std::runtime_error("cannot write " + outcome.summary_file);
        out << emit_summary_table(outcome.rows);
    }

    outcome.report_file = (std::filesystem::path(config.output_dir) / "report.json").string();
    {
        std::ofstream out(outcome.report_file);
        if (!out) throw std::runtime_error("cannot write " + outcome.report_file);
        out << report.dump(2) << '\n';
    }

    outcome.metadata_file =
        (std::filesystem::path(config.output_dir) / "metadata.json").string();
    {
        nlohmann::json metadata;
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        metadata["timestamp"] = stamp;
        metadata["wall_seconds"] = std::move(timings);
        std::ofstream out(outcome.metadata_file);
        if (!out) throw std::runtime_error("cannot write " + outcome.metadata_file);
        out << metadata.dump(2) << '\n';
    }
    return outcome;
}

void apply_overrides(ExperimentConfig& config, std::optional<long> max_iter,
                     std::optional<double> tol, std::optional<std::string> mode,
                     std::optional<std::string> out_dir, std::optional<std::uint64_t> seed) {
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = *seed;
    for (auto& spec : config.solvers) {
        if (max_iter) spec.overrides["max_iterations"] = *max_iter;
        if (tol) spec.overrides["rho_hat"] = *tol;
        if (mode) spec.overrides["termination"] = *mode == "abs" ? "absolute" : "relative";
    }
}

}  // namespace acfista::bench
