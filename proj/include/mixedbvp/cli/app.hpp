#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixedbvp/analysis/refinement.hpp"
#include "mixedbvp/analysis/regularity.hpp"
#include "mixedbvp/barriers/certificate.hpp"
#include "mixedbvp/barriers/conical.hpp"
#include "mixedbvp/io/config.hpp"
#include "mixedbvp/io/csv.hpp"
#include "mixedbvp/io/json.hpp"
#include "mixedbvp/solver/solver.hpp"

#define MIXEDBVP_VERSION "0.1.0"

namespace mixedbvp::cli {

enum class Command { Solve, CertifyBarriers, Zaremba, Compare, Refine };

inline std::string_view to_string(Command c) {
    switch (c) {
    case Command::Solve: return "solve";
    case Command::CertifyBarriers: return "certify-barriers";
    case Command::Zaremba: return "zaremba";
    case Command::Compare: return "compare";
    case Command::Refine: return "refine";
    }
    return "?";
}

inline std::optional<Command> parse_command(const std::string& s) {
    for (Command c : {Command::Solve, Command::CertifyBarriers, Command::Zaremba, Command::Compare, Command::Refine})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

enum ExitCode : int { Success = 0, ConfigOrModuleError = 1, NotConverged = 2, CheckFailed = 3 };

struct RunFlags {
    std::string out = ".";
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> h;
};

/// Report and artifacts of one command, before anything touches disk.
struct RunResult {
    int exit_code = Success;
    Json report;
    std::optional<GridField> field;
    std::vector<double> history;
};

/// Largest gap tolerated by the compare command.
inline constexpr double kComparisonTolerance = 1e-10;

inline RunConfig apply_flags(RunConfig cfg, const RunFlags& flags) {
    if (flags.h) cfg.h = *flags.h;
    if (flags.tol) cfg.tol = *flags.tol;
    if (flags.seed) cfg.seed = *flags.seed;
    return cfg;
}

inline Json error_entry(const Error& e, const std::string& field = "") {
    Json j;
    j["code"] = std::string(mixedbvp::to_string(e.code()));
    if (!field.empty()) j["field"] = field;
    j["message"] = e.what();
    return j;
}

inline double exact_error(const GridField& u, const ScalarField& exact) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.node_class[i] != NodeClass::Exterior) m = std::max(m, std::abs(u[i] - exact(u.coord(i))));
    return m;
}

inline double sector_angle(const RunConfig& cfg) { return cfg.shape == "disk_sector" ? cfg.theta1 : std::numbers::pi; }

namespace detail {

inline void run_solve(const RunConfig& cfg, RunResult& res, bool zaremba) {
    const ProblemSpec problem = build_problem(cfg, cfg.seed);
    SolveReport rep = solve(problem, build_solve_options(cfg));
    res.report["solve"] = to_json(rep);
    if (cfg.exact == "dirichlet")
        res.report["error_to_exact"] = json_number(exact_error(rep.field, problem.dirichlet_value));
    if (zaremba) {
        const Vec center = to_vec(cfg.center);
        res.report["holder_fit"] = to_json(holder_fit(rep.field, problem.domain, center));
        res.report["modulus"] = to_json(modulus_report(rep.field, rep.field, cfg.gamma));
        Json theory;
        theory["laplace_wedge_exponent"] = std::numbers::pi / (2.0 * sector_angle(cfg));
        try {
            const auto p = choose_gamma(cfg.a, cfg.big_a, cfg.kappa, to_vec(cfg.nu), sector_angle(cfg));
            theory["barrier_gamma"] = p.gamma;
        } catch (const Error& e) {
            theory["barrier_gamma"] = nullptr;
            theory["barrier_note"] = e.what();
        }
        res.report["theory"] = theory;
    }
    if (!rep.converged) res.exit_code = NotConverged;
    res.history = rep.residual_history;
    res.field = std::move(rep.field);
}

inline void run_certify(const RunConfig& cfg, RunResult& res) {
    const Vec nu = to_vec(cfg.nu);
    const auto params = choose_gamma(cfg.a, cfg.big_a, cfg.kappa, nu, sector_angle(cfg));
    Json barrier;
    barrier["gamma"] = params.gamma;
    barrier["kappa"] = params.kappa;
    barrier["sigma1"] = params.sigma1;
    barrier["sigma2"] = params.sigma2;
    barrier["c1"] = params.c1;
    barrier["c2"] = params.c2;
    res.report["barrier"] = barrier;
    CertificateOptions co;
    co.r_count = cfg.r_count;
    co.theta_count = cfg.theta_count;
    co.r_min = cfg.r_min;
    co.r_max = cfg.r_max;
    co.seed = cfg.seed;
    Json certs = Json::array();
    bool all = true;
    for (double alpha : cfg.alphas) {
        const OperatorSpec op = cfg.op_kind == OperatorKind::PucciPlus ? OperatorSpec::pucci_plus(cfg.a, cfg.big_a, alpha)
                                                                       : OperatorSpec::pucci_minus(cfg.a, cfg.big_a, alpha);
        const BarrierCertificate c = verify_supersolution(params, op, nu, co);
        Json j = to_json(c);
        j["alpha"] = alpha;
        certs.push_back(j);
        all = all && c.passed;
    }
    res.report["certificates"] = certs;
    res.report["passed"] = all;
    if (!all) res.exit_code = CheckFailed;
}

inline void run_compare(const RunConfig& cfg, RunResult& res) {
    const ProblemSpec base = build_problem(cfg, cfg.seed);
    const SolveOptions opts = build_solve_options(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> wave(1, 3);
    Json pairs = Json::array();
    double worst = -std::numeric_limits<double>::infinity();
    bool converged = true;
    std::optional<GridField> last;
    for (int k = 0; k < cfg.pairs; ++k) {
        const double c0 = 2.0 * unit(rng) - 1.0, c1 = unit(rng), p1 = 2.0 * std::numbers::pi * unit(rng);
        const int k1 = wave(rng), k2 = wave(rng), m = wave(rng);
        const double d0 = 0.01 + 0.49 * unit(rng), d1 = 0.5 * unit(rng);
        const ScalarField f0 = base.f;
        const ScalarField f = [=](const Vec& x) {
            return f0(x) + c0 + c1 * std::sin(k1 * std::numbers::pi * x[0] + p1) * std::cos(k2 * std::numbers::pi * x[1]);
        };
        const ScalarField g = [=](const Vec& x) { return f(x) + d0 + d1 * (1.0 + std::cos(m * std::numbers::pi * x[0])); };
        ProblemSpec pf = base, pg = base;
        pf.f = f;
        pg.f = g;
        const SolveReport u = solve(pf, opts);
        SolveOptions og = opts;
        og.initial = u.field;
        const SolveReport v = solve(pg, og);
        const ComparisonGap gap = comparison_gap(u.field, v.field);
        Json j;
        j["pair"] = k;
        j["max_gap"] = json_number(gap.max_gap);
        j["witness"] = json_vec(u.field.coord(gap.witness));
        j["converged"] = u.converged && v.converged;
        j["iterations"] = {u.iterations, v.iterations};
        pairs.push_back(j);
        worst = std::max(worst, gap.max_gap);
        converged = converged && u.converged && v.converged;
        last = u.field;
    }
    res.report["pairs"] = pairs;
    res.report["max_gap"] = json_number(cfg.pairs > 0 ? worst : 0.0);
    res.report["tolerance"] = kComparisonTolerance;
    const bool passed = cfg.pairs == 0 || worst <= kComparisonTolerance;
    res.report["passed"] = passed;
    if (!converged) res.exit_code = NotConverged;
    else if (!passed) res.exit_code = CheckFailed;
    res.field = std::move(last);
}

inline void run_refine(const RunConfig& cfg, RunResult& res) {
    const ProblemSpec problem = build_problem(cfg, cfg.seed);
    RefinementOptions ro;
    ro.solve = build_solve_options(cfg);
    ro.gamma = cfg.gamma;
    if (cfg.exact == "dirichlet") ro.exact = problem.dirichlet_value;
    RefinementTable t = refinement_study(problem, cfg.h_list, ro);
    res.report["refinement"] = to_json(t);
    bool converged = true;
    for (const auto& r : t.rows) converged = converged && r.converged;
    if (!t.complete) {
        res.exit_code = *t.error_code == ErrorCode::NotConverged ? NotConverged : ConfigOrModuleError;
        res.report["error"] = {{"code", std::string(mixedbvp::to_string(*t.error_code))}, {"message", t.error}};
    } else if (!converged) {
        res.exit_code = NotConverged;
    }
    if (!t.fields.empty()) res.field = std::move(t.fields.back());
}

} // namespace detail

/// Runs one command on an already parsed config; module errors become an
/// "error" entry with exit code 1 (2 for NotConverged).
inline RunResult execute(const RunConfig& cfg, Command cmd) {
    RunResult res;
    res.report["command"] = std::string(to_string(cmd));
    res.report["seed"] = cfg.seed;
    try {
        switch (cmd) {
        case Command::Solve: detail::run_solve(cfg, res, false); break;
        case Command::Zaremba: detail::run_solve(cfg, res, true); break;
        case Command::CertifyBarriers: detail::run_certify(cfg, res); break;
        case Command::Compare: detail::run_compare(cfg, res); break;
        case Command::Refine: detail::run_refine(cfg, res); break;
        }
    } catch (const ConfigError& e) {
        res.report["error"] = error_entry(e, e.field());
        res.exit_code = ConfigOrModuleError;
    } catch (const Error& e) {
        res.report["error"] = error_entry(e);
        res.exit_code = e.code() == ErrorCode::NotConverged ? NotConverged : ConfigOrModuleError;
    }
    res.report["exit_code"] = res.exit_code;
    return res;
}

inline Json versions() {
    Json v;
    v["mixedbvp"] = MIXEDBVP_VERSION;
    v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                         "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    v["cli11"] = CLI11_VERSION;
#ifdef __VERSION__
    v["compiler"] = __VERSION__;
#endif
    return v;
}

inline Json make_manifest(const std::string& config_text, const std::string& config_path, Command cmd,
                          const RunFlags& flags, std::uint64_t seed) {
    Json m;
    m["tool"] = "mixedbvp";
    m["command"] = std::string(to_string(cmd));
    m["config_path"] = config_path;
    m["config"] = config_text;
    Json f;
    f["threads"] = flags.threads;
    f["seed"] = flags.seed ? Json(*flags.seed) : Json(nullptr);
    f["tol"] = flags.tol ? Json(*flags.tol) : Json(nullptr);
    f["h"] = flags.h ? Json(*flags.h) : Json(nullptr);
    m["flags"] = f;
    m["seed"] = seed;
    m["versions"] = versions();
    return m;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
    out << s;
}

inline void write_outputs(const RunResult& res, const Json& manifest, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", res.report.dump(2) + "\n");
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    if (res.field) {
        std::ostringstream f;
        write_field_csv(f, *res.field);
        write_text(dir / "field.csv", f.str());
    }
    if (!res.history.empty()) {
        std::ostringstream h;
        write_history_csv(h, res.history);
        write_text(dir / "residual_history.csv", h.str());
    }
}

/// Parses `config_text`, applies the flag overrides, runs and writes all
/// artifacts. Config errors still produce report.json with an error entry.
inline int run_text(const std::string& config_text, const std::string& config_path, Command cmd,
                    const RunFlags& flags, std::ostream& err) {
    RunResult res;
    std::string canonical = config_text;
    std::uint64_t seed = flags.seed.value_or(0);
    try {
        const RunConfig parsed = parse_config(config_text, config_path);
        canonical = serialize_config(parsed);
        const RunConfig cfg = apply_flags(parsed, flags);
        seed = cfg.seed;
        res = execute(cfg, cmd);
    } catch (const ConfigError& e) {
        res.report["command"] = std::string(to_string(cmd));
        res.report["error"] = error_entry(e, e.field());
        res.exit_code = ConfigOrModuleError;
        res.report["exit_code"] = res.exit_code;
    }
    if (res.report.contains("error")) err << "error: " << res.report["error"]["message"].get<std::string>() << "\n";
    try {
        write_outputs(res, make_manifest(canonical, config_path, cmd, flags, seed), flags.out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ConfigOrModuleError;
    }
    return res.exit_code;
}

inline int run_file(const std::string& config_path, Command cmd, const RunFlags& flags, std::ostream& err) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        RunResult res;
        res.report["command"] = std::string(to_string(cmd));
        res.report["error"] = error_entry(ConfigError(ErrorCode::ConfigParse, "", config_path + ": cannot open config file"));
        res.exit_code = ConfigOrModuleError;
        res.report["exit_code"] = res.exit_code;
        err << "error: " << config_path << ": cannot open config file\n";
        try {
            write_outputs(res, make_manifest("", config_path, cmd, flags, flags.seed.value_or(0)), flags.out);
        } catch (const std::exception&) {
        }
        return ConfigOrModuleError;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return run_text(ss.str(), config_path, cmd, flags, err);
}

/// Re-executes the command recorded in a manifest; `out` replaces the
/// output directory.
inline int rerun_manifest(const std::string& manifest_path, const std::string& out, std::ostream& err) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) {
        err << "error: " << manifest_path << ": cannot open manifest\n";
        return ConfigOrModuleError;
    }
    Json m;
    try {
        m = Json::parse(in);
    } catch (const std::exception& e) {
        err << "error: " << manifest_path << ": " << e.what() << "\n";
        return ConfigOrModuleError;
    }
    const auto cmd = parse_command(m.value("command", std::string()));
    if (!cmd || !m.contains("config") || !m.contains("flags")) {
        err << "error: " << manifest_path << ": not a mixedbvp manifest\n";
        return ConfigOrModuleError;
    }
    RunFlags flags;
    flags.out = out;
    const Json& f = m["flags"];
    flags.threads = f.value("threads", 1);
    if (!f["seed"].is_null()) flags.seed = f["seed"].get<std::uint64_t>();
    if (!f["tol"].is_null()) flags.tol = f["tol"].get<double>();
    if (!f["h"].is_null()) flags.h = f["h"].get<double>();
    return run_text(m["config"].get<std::string>(), m.value("config_path", std::string("<manifest>")), *cmd, flags, err);
}

inline int main(int argc, char** argv) {
    CLI::App app{"Mixed Dirichlet/Neumann solver for degenerate fully nonlinear elliptic problems"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", MIXEDBVP_VERSION);

    RunFlags flags;
    std::string config_path, command;
    std::uint64_t seed = 0;
    double tol = 0.0, h = 0.0;
    auto* run = app.add_subcommand("run", "Run a command on a config file");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("command", command, "solve | certify-barriers | zaremba | compare | refine")
        ->required()
        ->check(CLI::IsMember({"solve", "certify-barriers", "zaremba", "compare", "refine"}));
    run->add_option("--out", flags.out, "Output directory")->capture_default_str();
    run->add_option("--threads", flags.threads, "Worker cap (runs are single-threaded)")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Sampling seed");
    auto* tol_opt = run->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
    auto* h_opt = run->add_option("--h", h, "Grid spacing override")->check(CLI::PositiveNumber);

    std::string manifest_path, rerun_out = ".";
    auto* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
    rerun->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();
    rerun->add_option("--out", rerun_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ConfigOrModuleError;
    }
    if (*rerun) return rerun_manifest(manifest_path, rerun_out, std::cerr);
    if (*seed_opt) flags.seed = seed;
    if (*tol_opt) flags.tol = tol;
    if (*h_opt) flags.h = h;
    return run_file(config_path, *parse_command(command), flags, std::cerr);
}

} // namespace mixedbvp::cli
