#pragma once
#include <charconv>
#include <string>

#include <nlohmann/json.hpp>

#include "types.hpp"

namespace ratiep {

// complex numbers travel as "re+imi" strings; infinite poles as "inf"
inline std::string format_complex(cplx z) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, z.real());
    std::string out(buf, r.ptr);
    double im = z.imag();
    out += std::signbit(im) ? '-' : '+';
    r = std::to_chars(buf, buf + sizeof buf, std::abs(im));
    out.append(buf, r.ptr);
    out += 'i';
    return out;
}

namespace detail {

inline double parse_double(std::string_view s, std::string_view whole) {
    double x = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw Error(ErrorCode::ParseError, "bad number '" + std::string(whole) + "'");
    return x;
}

} // namespace detail

inline cplx parse_complex(std::string_view s) {
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty complex literal");
    if (s.back() != 'i') return {detail::parse_double(s, s), 0.0};
    std::string_view body = s.substr(0, s.size() - 1);
    size_t split = std::string_view::npos;
    for (size_t k = body.size(); k-- > 1;) {
        char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) return {0.0, detail::parse_double(body, s)};
    double re = detail::parse_double(body.substr(0, split), s);
    std::string_view im = body.substr(split + 1);
    double v = detail::parse_double(im, s);
    return {re, body[split] == '-' ? -v : v};
}

inline nlohmann::json to_json(const Vector& v) {
    auto a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(format_complex(v(i)));
    return a;
}

inline nlohmann::json to_json(const Matrix& m) {
    auto a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
    return a;
}

inline nlohmann::json to_json(const PoleList& poles) {
    auto a = nlohmann::json::array();
    for (const auto& p : poles) a.push_back(p.is_infinite() ? std::string("inf") : format_complex(p.value()));
    return a;
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::ParseError, std::string("missing field '") + name + "'");
    return j.at(name);
}

inline std::string text(const nlohmann::json& j) {
    if (!j.is_string()) throw Error(ErrorCode::ParseError, "expected a string");
    return j.get<std::string>();
}

} // namespace detail

inline Vector vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array");
    Vector v(Eigen::Index(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = parse_complex(detail::text(j[i]));
    return v;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of rows");
    const Eigen::Index n = Eigen::Index(j.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector row = vector_from_json(j[size_t(i)]);
        if (row.size() != n) throw Error(ErrorCode::ShapeError, "matrix rows must be square");
        m.row(i) = row.transpose();
    }
    return m;
}

inline PoleList poles_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of poles");
    PoleList out;
    for (const auto& e : j) {
        std::string s = detail::text(e);
        out.push_back(s == "inf" ? Pole::infinity() : Pole::finite(parse_complex(s)));
    }
    return out;
}

struct ProblemFile {
    DiscreteMeasure measure;
    PoleList xi;
    std::optional<PoleList> psi;

    bool tridiagonal() const { return psi.has_value(); }
};

inline nlohmann::json to_json(const ProblemFile& p) {
    nlohmann::json j;
    j["kind"] = p.tridiagonal() ? "tridiagonal" : "hessenberg";
    j["nodes"] = to_json(p.measure.nodes);
    j["weights_v"] = to_json(p.measure.weights_v);
    if (p.measure.weights_w) j["weights_w"] = to_json(*p.measure.weights_w);
    j["poles_xi"] = to_json(p.xi);
    if (p.psi) j["poles_psi"] = to_json(*p.psi);
    return j;
}

inline ProblemFile problem_from_json(const nlohmann::json& j) {
    ProblemFile p;
    std::string kind = detail::text(detail::field(j, "kind"));
    if (kind != "hessenberg" && kind != "tridiagonal") throw Error(ErrorCode::ParseError, "unknown problem kind '" + kind + "'");
    p.measure.nodes = vector_from_json(detail::field(j, "nodes"));
    p.measure.weights_v = vector_from_json(detail::field(j, "weights_v"));
    p.xi = poles_from_json(detail::field(j, "poles_xi"));
    if (kind == "tridiagonal") {
        p.measure.weights_w = vector_from_json(detail::field(j, "weights_w"));
        p.psi = poles_from_json(detail::field(j, "poles_psi"));
    }
    return p;
}

inline nlohmann::json to_json(const PencilSolution& s) {
    nlohmann::json j;
    j["kind"] = s.kind == SolutionKind::orthogonal ? "orthogonal" : "biorthogonal";
    j["shape"] = s.pencil.shape == PencilShape::hessenberg ? "hessenberg" : "tridiagonal";
    j["problem"] = to_json(ProblemFile{s.measure, s.poles_xi, s.poles_psi});
    j["B"] = to_json(s.pencil.B);
    j["C"] = to_json(s.pencil.C);
    j["V"] = to_json(s.V);
    if (s.W) j["W"] = to_json(*s.W);
    return j;
}

inline PencilSolution solution_from_json(const nlohmann::json& j) {
    PencilSolution s;
    std::string kind = detail::text(detail::field(j, "kind"));
    std::string shape = detail::text(detail::field(j, "shape"));
    if (kind != "orthogonal" && kind != "biorthogonal") throw Error(ErrorCode::ParseError, "unknown solution kind '" + kind + "'");
    if (shape != "hessenberg" && shape != "tridiagonal") throw Error(ErrorCode::ParseError, "unknown pencil shape '" + shape + "'");
    s.kind = kind == "orthogonal" ? SolutionKind::orthogonal : SolutionKind::biorthogonal;
    s.pencil.shape = shape == "hessenberg" ? PencilShape::hessenberg : PencilShape::tridiagonal;
    ProblemFile p = problem_from_json(detail::field(j, "problem"));
    s.measure = p.measure;
    s.poles_xi = p.xi;
    s.poles_psi = p.psi;
    s.pencil.B = matrix_from_json(detail::field(j, "B"));
    s.pencil.C = matrix_from_json(detail::field(j, "C"));
    s.V = matrix_from_json(detail::field(j, "V"));
    if (s.kind == SolutionKind::biorthogonal) s.W = matrix_from_json(detail::field(j, "W"));
    const Eigen::Index m = s.measure.size();
    if (s.pencil.B.rows() != m || s.pencil.C.rows() != m || s.V.rows() != m || (s.W && s.W->rows() != m))
        throw Error(ErrorCode::ShapeError, "matrix size differs from node count");
    return s;
}

inline nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace ratiep
