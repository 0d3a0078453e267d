#pragma once
#include "orf_eval.hpp"

namespace ratiep {

struct MetricReport {
    double err_o = 0.0;
    double err_r = 0.0;
    double err_f = 0.0;
    std::optional<double> err_f_truncated;
    double err_p = 0.0;
    double kappa = 1.0;
    Eigen::Index m = 0;
};

// ||W^H V - I||_2
inline double err_orthogonality(const PencilSolution& s) {
    const Eigen::Index m = s.size();
    return norm2(Matrix(s.basis_w().adjoint() * s.V - Matrix::Identity(m, m)));
}

// ||Z V C - V B||_2 / max(||Z V C||_2, ||V B||_2)
inline double err_recurrence(const PencilSolution& s) {
    Matrix zvc = s.measure.nodes.asDiagonal() * (s.V * s.pencil.C);
    Matrix vb = s.V * s.pencil.B;
    double den = std::max(norm2(zvc), norm2(vb));
    if (den == 0.0) throw Error(ErrorCode::DegenerateInput, "both recurrence sides vanish");
    return norm2(Matrix(zvc - vb)) / den;
}

inline double err_functions_from(const Matrix& F, bool truncate_last) {
    Eigen::Index n = F.rows() - (truncate_last ? 1 : 0);
    if (n <= 0) return 0.0;
    return norm2(Matrix(F.topLeftCorner(n, n) - Matrix::Identity(n, n)));
}

// ||F - I||_2 for the function Gram matrix F, optionally over the first m-1 functions only
inline double err_functions(const PencilSolution& s, bool truncate_last = false) {
    return err_functions_from(function_moment_matrix(s), truncate_last);
}

namespace detail {

inline double ratio_error(cplx b, cplx c, const Pole& pole) {
    if (pole.is_infinite()) {
        double n = std::hypot(std::abs(b), std::abs(c));
        return n == 0.0 ? kInf : std::abs(c) / n;
    }
    if (c == 0.0) return kInf;
    cplx xi = pole.value();
    double err = std::abs(b / c - xi);
    return std::abs(xi) > 0.0 ? err / std::abs(xi) : err;
}

} // namespace detail

// largest relative pole error over the constrained sub- and superdiagonal positions
inline double err_poles(const PencilSolution& s) {
    const auto& p = s.pencil;
    const Eigen::Index m = p.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        worst = std::max(worst, detail::ratio_error(p.B(i + 1, i), p.C(i + 1, i), s.poles_xi.at(i)));
    if (p.shape == PencilShape::tridiagonal && s.poles_psi)
        for (Eigen::Index i = 1; i + 1 < m; ++i)
            worst = std::max(worst, detail::ratio_error(p.B(i, i + 1), p.C(i, i + 1), s.poles_psi->at(i - 1)));
    return worst;
}

struct MetricOptions {
    bool kappa = true;
    bool truncated = true;
};

inline MetricReport compute_metrics(const PencilSolution& s, const MetricOptions& opt = {}) {
    MetricReport r;
    r.m = s.size();
    r.err_o = err_orthogonality(s);
    r.err_r = err_recurrence(s);
    r.err_p = err_poles(s);
    try {
        Matrix F = function_moment_matrix(s);
        r.err_f = err_functions_from(F, false);
        if (opt.truncated) r.err_f_truncated = err_functions_from(F, true);
    } catch (const EvaluationSingularError&) {
        r.err_f = kInf;
        if (opt.truncated) r.err_f_truncated = kInf;
    }
    if (opt.kappa) {
        r.kappa = kappa(primal_handle(s), s.measure);
    } else {
        r.kappa = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

} // namespace ratiep
