#pragma once
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "metrics.hpp"
#include "updating.hpp"

namespace ratiep {

enum class ExperimentId { hp_unit_circle, hp_perturbed, tp_chebyshev, tp_ellipse };

inline const char* to_string(ExperimentId id) {
    switch (id) {
    case ExperimentId::hp_unit_circle: return "hp-unit-circle";
    case ExperimentId::hp_perturbed: return "hp-perturbed";
    case ExperimentId::tp_chebyshev: return "tp-chebyshev";
    case ExperimentId::tp_ellipse: return "tp-ellipse";
    }
    return "";
}

inline std::optional<ExperimentId> parse_experiment_id(const std::string& s) {
    for (auto id : {ExperimentId::hp_unit_circle, ExperimentId::hp_perturbed, ExperimentId::tp_chebyshev,
                    ExperimentId::tp_ellipse})
        if (s == to_string(id)) return id;
    return std::nullopt;
}

inline bool is_tridiagonal(ExperimentId id) {
    return id == ExperimentId::tp_chebyshev || id == ExperimentId::tp_ellipse;
}

// krylov/update solve the experiment's own problem; the -hp variants solve the Hessenberg problem on
// the nodes and Xi poles of a tridiagonal experiment
enum class Strategy { krylov, update, krylov_hp, update_hp };

inline const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::krylov: return "krylov";
    case Strategy::update: return "update";
    case Strategy::krylov_hp: return "krylov-hp";
    case Strategy::update_hp: return "update-hp";
    }
    return "";
}

inline std::optional<Strategy> parse_strategy(const std::string& s) {
    for (auto x : {Strategy::krylov, Strategy::update, Strategy::krylov_hp, Strategy::update_hp})
        if (s == to_string(x)) return x;
    return std::nullopt;
}

struct ExperimentSpec {
    ExperimentId id = ExperimentId::hp_unit_circle;
    std::vector<Eigen::Index> sizes;
    double radius_xi = 1.5;
    std::optional<double> radius_psi;
    Eigen::Index perturb_index = 50;
    double theta = 1e-6;
    std::vector<Strategy> strategies{Strategy::krylov, Strategy::update};
    std::uint64_t seed = 0;     // generators are deterministic; kept for reproducible extensions
    cplx weight_v = 1.0;
    cplx weight_w = 1.0;
    bool kappa = true;
    bool timing = false;        // wall time makes output run-dependent, so it is opt-in
};

inline std::vector<Eigen::Index> default_sizes() {
    std::vector<Eigen::Index> s;
    for (Eigen::Index m = 3; m <= 393; m += 15) s.push_back(m);
    return s;
}

// "a:b:s" (a, a+s, ... <= b) or a comma list "3,18,33"
inline std::vector<Eigen::Index> parse_sizes(const std::string& text) {
    auto number = [&](const std::string& t) {
        long long v = 0;
        auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
            throw Error(ErrorCode::ParseError, "bad size '" + t + "' in '" + text + "'");
        return Eigen::Index(v);
    };
    auto split = [](const std::string& t, char sep) {
        std::vector<std::string> parts;
        std::string cur;
        std::istringstream is(t);
        while (std::getline(is, cur, sep)) parts.push_back(cur);
        if (!t.empty() && t.back() == sep) parts.push_back("");
        return parts;
    };
    if (text.empty()) throw Error(ErrorCode::ParseError, "empty size list");
    std::vector<Eigen::Index> out;
    if (text.find(':') != std::string::npos) {
        auto p = split(text, ':');
        if (p.size() != 3) throw Error(ErrorCode::ParseError, "range must be a:b:s");
        Eigen::Index a = number(p[0]), b = number(p[1]), st = number(p[2]);
        if (st <= 0) throw Error(ErrorCode::ParseError, "range step must be positive");
        for (Eigen::Index m = a; m <= b; m += st) out.push_back(m);
    } else {
        for (const auto& t : split(text, ',')) out.push_back(number(t));
    }
    return out;
}

// parameter defaults of each experiment
inline ExperimentSpec default_spec(ExperimentId id) {
    ExperimentSpec s;
    s.id = id;
    s.sizes = default_sizes();
    s.radius_xi = id == ExperimentId::hp_unit_circle ? 1.5 : 3.0;
    if (id == ExperimentId::tp_ellipse) s.radius_psi = 4.0;
    return s;
}

inline void validate(const ExperimentSpec& s) {
    if (s.sizes.empty()) throw Error(ErrorCode::DegenerateInput, "no problem sizes");
    for (size_t i = 0; i < s.sizes.size(); ++i) {
        if (s.sizes[i] < 1) throw Error(ErrorCode::DegenerateInput, "sizes must be positive");
        if (i > 0 && s.sizes[i] <= s.sizes[i - 1]) throw Error(ErrorCode::DegenerateInput, "sizes must increase");
    }
    if (!(s.radius_xi > 1.0) || (s.radius_psi && !(*s.radius_psi > 1.0)))
        throw Error(ErrorCode::DegenerateInput, "pole radii must exceed 1");
    if (s.strategies.empty()) throw Error(ErrorCode::DegenerateInput, "no strategies");
    for (auto st : s.strategies)
        if ((st == Strategy::krylov_hp || st == Strategy::update_hp) && !is_tridiagonal(s.id))
            throw Error(ErrorCode::DegenerateInput, "Hessenberg comparison strategies need a tridiagonal experiment");
    if (s.id == ExperimentId::hp_perturbed && (s.perturb_index < 2 || !(s.theta > 0.0)))
        throw Error(ErrorCode::DegenerateInput, "perturbation needs index >= 2 and positive angle");
}

struct Problem {
    DiscreteMeasure measure;
    PoleList xi;
    PoleList psi;
};

inline Problem make_problem(const ExperimentSpec& s, Eigen::Index m) {
    Problem p;
    switch (s.id) {
    case ExperimentId::hp_unit_circle: p.measure.nodes = unit_circle_nodes(m); break;
    case ExperimentId::hp_perturbed: p.measure.nodes = perturbed_nodes(m, s.perturb_index, s.theta); break;
    case ExperimentId::tp_chebyshev: p.measure.nodes = chebyshev_nodes(m); break;
    case ExperimentId::tp_ellipse: p.measure.nodes = ellipse_nodes(m); break;
    }
    p.measure.weights_v = Vector::Constant(m, s.weight_v);
    p.xi = circle_poles(m - 1, s.radius_xi);
    if (is_tridiagonal(s.id)) {
        p.measure.weights_w = Vector::Constant(m, s.weight_w);
        p.psi = conj(circle_poles(m - 1, s.radius_psi.value_or(s.radius_xi)));
    }
    return p;
}

inline PencilSolution solve_problem(const Problem& p, ExperimentId id, Strategy st) {
    DiscreteMeasure hp{p.measure.nodes, p.measure.weights_v, std::nullopt};
    bool tri = is_tridiagonal(id);
    switch (st) {
    case Strategy::krylov:
        return tri ? rational_lanczos(p.measure, p.xi, p.psi) : rational_arnoldi(hp, p.xi);
    case Strategy::update:
        return tri ? tpiep_solve(p.measure, p.xi, p.psi) : hpiep_solve(hp, p.xi);
    case Strategy::krylov_hp: return rational_arnoldi(hp, p.xi);
    case Strategy::update_hp: return hpiep_solve(hp, p.xi);
    }
    throw Error(ErrorCode::DegenerateInput, "unknown strategy");
}

struct ResultRow {
    std::string experiment;
    std::string strategy;
    Eigen::Index m = 0;
    MetricReport report;
    double seconds = 0.0;
    std::string status = "ok";   // error text when the solve failed

    bool failed() const { return status != "ok"; }
};

inline std::vector<ResultRow> run_rows(const ExperimentSpec& spec) {
    validate(spec);
    std::vector<ResultRow> rows;
    for (auto st : spec.strategies) {
        for (auto m : spec.sizes) {
            ResultRow row;
            row.experiment = to_string(spec.id);
            row.strategy = to_string(st);
            row.m = m;
            auto t0 = std::chrono::steady_clock::now();
            try {
                Problem p = make_problem(spec, m);
                PencilSolution sol = solve_problem(p, spec.id, st);
                row.report = compute_metrics(sol, {spec.kappa, true});
            } catch (const Error& e) {
                row.status = e.what();
                row.report = MetricReport{};
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.report.err_o = row.report.err_r = row.report.err_f = row.report.err_p = row.report.kappa = nan;
                row.report.err_f_truncated = nan;
                row.report.m = m;
            }
            auto t1 = std::chrono::steady_clock::now();
            row.seconds = spec.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// shortest decimal string that reads back to the same double
inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline const char* kCsvHeader = "experiment,strategy,m,err_o,err_r,err_f,err_f_trunc,err_p,kappa,seconds,status";

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        const auto& q = r.report;
        os << r.experiment << ',' << r.strategy << ',' << r.m << ',' << format_real(q.err_o) << ','
           << format_real(q.err_r) << ',' << format_real(q.err_f) << ','
           << format_real(q.err_f_truncated.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
           << format_real(q.err_p) << ',' << format_real(q.kappa) << ',' << format_real(r.seconds) << ','
           << (r.failed() ? "\"" + r.status + "\"" : r.status) << "\n";
    }
    return os.str();
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;   // (m, value)
};

// log10-scaled line chart as a standalone SVG document
inline std::string svg_plot(const std::string& title, const std::vector<Series>& series) {
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    auto ly = [](double v) { return std::log10(std::max(v, 1e-18)); };
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, ly(y));
            ymax = std::max(ymax, ly(y));
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1;
    if (xmax <= xmin) xmax = xmin + 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    int ystep = std::max(1, int(std::ceil((ymax - ymin) / 10)));
    for (int e = int(ymin); e <= int(ymax); e += ystep) {
        os << "<line x1=\"" << L - 4 << "\" y1=\"" << py(e) << "\" x2=\"" << W - R << "\" y2=\"" << py(e)
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << py(e) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
    }
    for (int k = 0; k <= 5; ++k) {
        double x = xmin + (xmax - xmin) * k / 5.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << std::lround(x) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">m</text>\n";
    for (size_t i = 0; i < series.size(); ++i) {
        const char* c = colors[i % 6];
        std::ostringstream path;
        bool pen = false;
        for (auto [x, y] : series[i].points) {
            if (!std::isfinite(y)) {
                pen = false;
                continue;
            }
            path << (pen ? " L " : " M ") << px(x) << ' ' << py(ly(y));
            pen = true;
            os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(ly(y)) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
        }
        os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\"/>\n";
        double ly0 = T + 16 + 18 * double(i);
        os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly0 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly0
           << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 35 << "\" y=\"" << ly0 + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
           << series[i].label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline std::map<std::string, std::string> svg_plots(const std::vector<ResultRow>& rows) {
    std::vector<std::string> strategies;
    for (const auto& r : rows)
        if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end())
            strategies.push_back(r.strategy);
    using Getter = double (*)(const MetricReport&);
    const std::vector<std::pair<std::string, Getter>> metrics{
        {"err_o", [](const MetricReport& q) { return q.err_o; }},
        {"err_r", [](const MetricReport& q) { return q.err_r; }},
        {"err_f", [](const MetricReport& q) { return q.err_f; }},
        {"err_p", [](const MetricReport& q) { return q.err_p; }},
        {"kappa", [](const MetricReport& q) { return q.kappa; }},
    };
    std::map<std::string, std::string> out;
    for (const auto& [name, get] : metrics) {
        std::vector<Series> series;
        for (const auto& st : strategies) {
            Series s{st, {}};
            Series t{st + " (first m-1)", {}};
            for (const auto& r : rows) {
                if (r.strategy != st) continue;
                s.points.emplace_back(double(r.m), get(r.report));
                t.points.emplace_back(double(r.m), r.report.err_f_truncated.value_or(kInf));
            }
            series.push_back(std::move(s));
            if (name == "err_f") series.push_back(std::move(t));
        }
        std::string title = rows.empty() ? name : rows.front().experiment + ": " + name;
        out[name + ".svg"] = svg_plot(title, series);
    }
    return out;
}

inline void write_outputs(const std::vector<ResultRow>& rows, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "results.csv", std::ios::binary);
        f << to_csv(rows);
    }
    for (const auto& [name, doc] : svg_plots(rows)) {
        std::ofstream f(dir / name, std::ios::binary);
        f << doc;
    }
}

inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& out_dir) {
    auto rows = run_rows(spec);
    if (out_dir) write_outputs(rows, *out_dir);
    return rows;
}

} // namespace ratiep
