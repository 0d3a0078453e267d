#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ratiep/ratiep.hpp"

namespace {

using namespace ratiep;

constexpr int kUsage = 1;
constexpr int kFailedRows = 2;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    f << text;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(item);
    return out;
}

bool is_usage_error(const Error& e) {
    return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::ShapeError;
}

struct SolveArgs {
    std::string problem;
    std::string output = "-";
    std::string strategy = "update";
};

int run_solve(const SolveArgs& a) {
    ProblemFile p = problem_from_json(parse_json_text(read_file(a.problem)));
    PencilSolution s;
    if (a.strategy == "update") {
        s = p.tridiagonal() ? tpiep_solve(p.measure, p.xi, *p.psi) : hpiep_solve(p.measure, p.xi);
    } else if (a.strategy == "krylov") {
        s = p.tridiagonal() ? rational_lanczos(p.measure, p.xi, *p.psi) : rational_arnoldi(p.measure, p.xi);
    } else {
        throw Error(ErrorCode::ParseError, "unknown strategy '" + a.strategy + "'");
    }
    write_text(a.output, to_json(s).dump(1) + "\n");
    return 0;
}

struct MetricsArgs {
    std::string solution;
    bool no_kappa = false;
};

int run_metrics(const MetricsArgs& a) {
    PencilSolution s = solution_from_json(parse_json_text(read_file(a.solution)));
    MetricReport r = compute_metrics(s, {!a.no_kappa, true});
    std::cout << "m=" << r.m << "\n"
              << "err_o=" << format_real(r.err_o) << "\n"
              << "err_r=" << format_real(r.err_r) << "\n"
              << "err_f=" << format_real(r.err_f) << "\n"
              << "err_f_trunc=" << format_real(r.err_f_truncated.value_or(0.0)) << "\n"
              << "err_p=" << format_real(r.err_p) << "\n"
              << "kappa=" << format_real(r.kappa) << "\n";
    return 0;
}

struct ExperimentArgs {
    std::string id;
    std::string sizes;
    std::optional<double> radius_xi;
    std::optional<double> radius_psi;
    std::optional<long> perturb_at;
    std::optional<double> theta;
    std::string strategies;
    std::string out_dir;
    std::string weight_v;
    std::string weight_w;
    bool skip_kappa = false;
    bool timing = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    auto id = parse_experiment_id(a.id);
    if (!id) throw Error(ErrorCode::ParseError, "unknown experiment '" + a.id + "'");
    ExperimentSpec spec = default_spec(*id);
    if (!a.sizes.empty()) spec.sizes = parse_sizes(a.sizes);
    if (a.radius_xi) spec.radius_xi = *a.radius_xi;
    if (a.radius_psi) spec.radius_psi = *a.radius_psi;
    if (a.perturb_at) spec.perturb_index = *a.perturb_at;
    if (a.theta) spec.theta = *a.theta;
    if (!a.strategies.empty()) {
        spec.strategies.clear();
        for (const auto& t : split_list(a.strategies)) {
            auto st = parse_strategy(t);
            if (!st) throw Error(ErrorCode::ParseError, "unknown strategy '" + t + "'");
            spec.strategies.push_back(*st);
        }
    }
    if (!a.weight_v.empty()) spec.weight_v = parse_complex(a.weight_v);
    if (!a.weight_w.empty()) spec.weight_w = parse_complex(a.weight_w);
    spec.kappa = !a.skip_kappa;
    spec.timing = a.timing;
    try {
        validate(spec);
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }

    std::filesystem::path dir = a.out_dir.empty() ? std::filesystem::path("results") / a.id : std::filesystem::path(a.out_dir);
    auto rows = run_experiment(spec, dir);
    size_t failed = 0;
    for (const auto& r : rows) failed += r.failed();
    std::cout << to_csv(rows);
    std::cerr << rows.size() << " rows, " << failed << " failed, written to " << dir.string() << "\n";
    return failed ? kFailedRows : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal rational function pencils from inverse eigenvalue problems"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "solve a problem file and write the solution file");
    solve->add_option("problem", sa.problem, "problem file (JSON)")->required();
    solve->add_option("-o,--output", sa.output, "solution file, '-' for stdout");
    solve->add_option("--strategy", sa.strategy, "update or krylov")->check(CLI::IsMember({"update", "krylov"}));

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "print the error metrics of a solution file");
    metrics->add_option("solution", ma.solution, "solution file (JSON)")->required();
    metrics->add_flag("--no-kappa", ma.no_kappa, "skip the condition number");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "run a numerical experiment sweep");
    exp->add_option("id", ea.id, "hp-unit-circle, hp-perturbed, tp-chebyshev or tp-ellipse")->required();
    exp->add_option("--sizes", ea.sizes, "a:b:s or comma list (default 3:393:15)");
    exp->add_option("--radius-xi", ea.radius_xi, "radius of the Xi pole circle");
    exp->add_option("--radius-psi", ea.radius_psi, "radius of the Psi pole circle");
    exp->add_option("--perturb-at", ea.perturb_at, "index of the perturbed node");
    exp->add_option("--theta", ea.theta, "angular perturbation in radians");
    exp->add_option("--strategies", ea.strategies, "comma list of krylov, update, krylov-hp, update-hp");
    exp->add_option("--out-dir", ea.out_dir, "output directory (default results/<id>)");
    exp->add_option("--weight-v", ea.weight_v, "constant weight v as re+imi");
    exp->add_option("--weight-w", ea.weight_w, "constant weight w as re+imi");
    exp->add_flag("--skip-kappa", ea.skip_kappa, "skip the condition number (costly for large m)");
    exp->add_flag("--timing", ea.timing, "record wall time per row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*solve) return run_solve(sa);
        if (*metrics) return run_metrics(ma);
        return run_experiment_cmd(ea);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_usage_error(e) ? kUsage : kFailedRows;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
