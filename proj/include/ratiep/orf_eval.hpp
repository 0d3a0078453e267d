#pragma once
#include "types.hpp"

namespace ratiep {

enum class OrfKind { orthogonal, biorthogonal_primal, biorthogonal_dual };

struct OrfSequenceHandle {
    Matrix B;
    Matrix C;
    cplx r0;
    OrfKind kind = OrfKind::orthogonal;
    PencilShape shape = PencilShape::hessenberg;

    Eigen::Index size() const { return B.rows(); }
};

struct EvalConfig {
    double singular = 1e-14;   // relative size of a vanishing pivot in the evaluation system
};

inline OrfSequenceHandle primal_handle(const PencilSolution& s) {
    OrfSequenceHandle h;
    h.B = s.pencil.B;
    h.C = s.pencil.C;
    h.shape = s.pencil.shape;
    if (s.kind == SolutionKind::orthogonal) {
        h.kind = OrfKind::orthogonal;
        h.r0 = 1.0 / s.measure.weights_v.norm();
    } else {
        h.kind = OrfKind::biorthogonal_primal;
        h.r0 = 1.0 / principal_sqrt(s.measure.w().dot(s.measure.weights_v));
    }
    return h;
}

// dual functions of a biorthogonal solution, evaluated from the transposed recurrence of (T, S)
inline OrfSequenceHandle dual_handle(const PencilSolution& s) {
    if (s.kind != SolutionKind::biorthogonal || s.pencil.shape != PencilShape::tridiagonal)
        throw Error(ErrorCode::ShapeError, "dual functions need a biorthogonal tridiagonal solution");
    OrfSequenceHandle h = primal_handle(s);
    h.kind = OrfKind::biorthogonal_dual;
    return h;
}

// M(z) = [e1, (B - z C)(:, 1:m-1)]
inline Matrix evaluation_matrix(const OrfSequenceHandle& h, cplx z) {
    const Eigen::Index m = h.size();
    Matrix M(m, m);
    M.col(0).setZero();
    M(0, 0) = 1.0;
    if (m > 1) M.rightCols(m - 1) = h.B.leftCols(m - 1) - z * h.C.leftCols(m - 1);
    return M;
}

namespace detail {

inline void check_pivot(cplx g, cplx b, cplx c, cplx z, double tol, int index) {
    if (std::abs(g) <= tol * (std::abs(b) + std::abs(z * c)) || g == 0.0) throw EvaluationSingularError(z, index);
}

// forward substitution: M(z)^T is lower triangular
inline Vector evaluate_primal(const OrfSequenceHandle& h, cplx z, double tol) {
    const Eigen::Index m = h.size();
    Vector x = Vector::Zero(m);
    x(0) = h.r0;
    const bool tri = h.shape == PencilShape::tridiagonal;
    for (Eigen::Index c = 0; c + 1 < m; ++c) {
        cplx s = 0.0;
        for (Eigen::Index i = tri ? std::max<Eigen::Index>(0, c - 1) : 0; i <= c; ++i)
            s += x(i) * (h.B(i, c) - z * h.C(i, c));
        cplx g = h.B(c + 1, c) - z * h.C(c + 1, c);
        check_pivot(g, h.B(c + 1, c), h.C(c + 1, c), z, tol, int(c + 2));
        x(c + 1) = -s / g;
    }
    return x;
}

// null vector of the leading m-1 rows of (T - z S) from a QR factorization of their adjoint
inline Vector dual_null_vector_qr(const OrfSequenceHandle& h, cplx z) {
    const Eigen::Index m = h.size();
    Matrix a = (h.B.topRows(m - 1) - z * h.C.topRows(m - 1)).adjoint();
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(m, m);
    return q.col(m - 1);
}

// null vector y of the leading m-1 rows of (T - z S), scaled so (S y)_1 = s0; returns S y.
// The recurrence runs through the superdiagonal; the (1, 2) ratio is unconstrained and may hit a node,
// in which case the null vector is taken from a QR factorization instead.
inline Vector evaluate_dual(const OrfSequenceHandle& h, cplx z, double tol) {
    const Eigen::Index m = h.size();
    Vector y = Vector::Zero(m);
    y(0) = 1.0;
    for (Eigen::Index r = 0; r + 1 < m; ++r) {
        cplx s = (h.B(r, r) - z * h.C(r, r)) * y(r);
        if (r > 0) s += (h.B(r, r - 1) - z * h.C(r, r - 1)) * y(r - 1);
        cplx g = h.B(r, r + 1) - z * h.C(r, r + 1);
        if (std::abs(g) <= tol * (std::abs(h.B(r, r + 1)) + std::abs(z * h.C(r, r + 1))) || g == 0.0) {
            y = dual_null_vector_qr(h, z);
            break;
        }
        y(r + 1) = -s / g;
    }
    Vector sy = Vector::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = std::max<Eigen::Index>(0, j - 1); i <= std::min<Eigen::Index>(m - 1, j + 1); ++i)
            sy(j) += h.C(j, i) * y(i);
    if (sy(0) == 0.0) throw EvaluationSingularError(z, 1);
    sy *= h.r0 / sy(0);
    sy(0) = h.r0;
    return sy;
}

} // namespace detail

// values (f_0(z), ..., f_{m-1}(z)) of the sequence encoded by the handle
inline Vector evaluate_sequence(const OrfSequenceHandle& h, cplx z, const EvalConfig& cfg = {}) {
    if (h.r0 == 0.0) throw Error(ErrorCode::DegenerateInput, "zero constant function");
    if (h.kind == OrfKind::biorthogonal_dual) return detail::evaluate_dual(h, z, cfg.singular);
    return detail::evaluate_primal(h, z, cfg.singular);
}

// rows are nodes, columns are functions
inline Matrix evaluate_at_nodes(const OrfSequenceHandle& h, const Vector& nodes, const EvalConfig& cfg = {}) {
    Matrix R(nodes.size(), h.size());
    for (Eigen::Index k = 0; k < nodes.size(); ++k) R.row(k) = evaluate_sequence(h, nodes(k), cfg).transpose();
    return R;
}

// Gram matrix of the functions under the measure: identity for an exact solution
inline Matrix function_moment_matrix(const OrfSequenceHandle& primal, const std::optional<OrfSequenceHandle>& dual,
                                     const DiscreteMeasure& measure, const EvalConfig& cfg = {}) {
    if (primal.size() != measure.size() || (dual && dual->size() != measure.size()))
        throw Error(ErrorCode::ShapeError, "handle size differs from the measure");
    Matrix R = evaluate_at_nodes(primal, measure.nodes, cfg);
    if (!dual) {
        Vector alpha = measure.weights_v.cwiseAbs2().cast<cplx>();
        return R.transpose() * (alpha.asDiagonal() * R.conjugate());
    }
    Matrix S = evaluate_at_nodes(*dual, measure.nodes, cfg);
    Vector beta = measure.w().conjugate().cwiseProduct(measure.weights_v);
    return R.transpose() * (beta.asDiagonal() * S);
}

inline Matrix function_moment_matrix(const PencilSolution& s, const EvalConfig& cfg = {}) {
    if (s.kind == SolutionKind::orthogonal) return function_moment_matrix(primal_handle(s), std::nullopt, s.measure, cfg);
    return function_moment_matrix(primal_handle(s), dual_handle(s), s.measure, cfg);
}

// largest 2-norm condition number of the evaluation system over the nodes
inline double kappa(const OrfSequenceHandle& h, const DiscreteMeasure& measure,
                    SvdBackend backend = SvdBackend::divide_and_conquer) {
    double worst = 1.0;
    for (Eigen::Index k = 0; k < measure.size(); ++k) {
        Matrix M = evaluation_matrix(h, measure.nodes(k));
        // the e1 column is balanced to the mean column norm so that (aB, aC) leaves the value unchanged
        if (M.cols() > 1) M(0, 0) = M.rightCols(M.cols() - 1).norm() / std::sqrt(double(M.cols() - 1));
        double c = cond2(M, backend);
        if (!std::isfinite(c)) return kInf;
        worst = std::max(worst, c);
    }
    return worst;
}

} // namespace ratiep
