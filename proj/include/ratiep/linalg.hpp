#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"

namespace ratiep {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = std::numeric_limits<double>::min();

// relative pivot tolerance: a pivot p counts as zero when |p| <= pivot * max|operand|
struct LinalgConfig {
    double pivot = 1e-13;
};

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

// 2x2 unitary [conj(a), -conj(b); b, a] embedded at rows/columns (pivot, partner), 1-based
struct PlaneRotation {
    int pivot = 1;
    int partner = 2;
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    Eigen::Matrix2cd block() const {
        Eigen::Matrix2cd g;
        g << std::conj(a), -std::conj(b), b, a;
        return g;
    }

    Matrix materialize(int n) const {
        Matrix p = Matrix::Identity(n, n);
        int i = pivot - 1, e = partner - 1;
        p(i, i) = std::conj(a);
        p(i, e) = -std::conj(b);
        p(e, i) = b;
        p(e, e) = a;
        return p;
    }

    // M <- P M
    template <class Derived>
    void apply_left(Eigen::MatrixBase<Derived>& m) const {
        int i = pivot - 1, e = partner - 1;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            cplx x = m(i, c), y = m(e, c);
            m(i, c) = std::conj(a) * x - std::conj(b) * y;
            m(e, c) = b * x + a * y;
        }
    }

    // M <- P^H M
    template <class Derived>
    void apply_left_adjoint(Eigen::MatrixBase<Derived>& m) const {
        int i = pivot - 1, e = partner - 1;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            cplx x = m(i, c), y = m(e, c);
            m(i, c) = a * x + std::conj(b) * y;
            m(e, c) = -b * x + std::conj(a) * y;
        }
    }

    // M <- M P
    template <class Derived>
    void apply_right(Eigen::MatrixBase<Derived>& m) const {
        int i = pivot - 1, e = partner - 1;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            cplx x = m(r, i), y = m(r, e);
            m(r, i) = x * std::conj(a) + y * b;
            m(r, e) = -x * std::conj(b) + y * a;
        }
    }

    // M <- M P^H
    template <class Derived>
    void apply_right_adjoint(Eigen::MatrixBase<Derived>& m) const {
        int i = pivot - 1, e = partner - 1;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            cplx x = m(r, i), y = m(r, e);
            m(r, i) = x * a - y * b;
            m(r, e) = x * std::conj(b) + y * std::conj(a);
        }
    }
};

// rotation mapping (x, y) to (r, 0) with r = |(x, y)|_2
inline PlaneRotation rotation_to_eliminate(cplx x, cplx y, int pivot = 1, int partner = 2) {
    double r = std::hypot(std::abs(x), std::abs(y));
    if (r == 0.0) throw Error(ErrorCode::DegenerateInput, "rotation of a zero vector");
    PlaneRotation p;
    p.pivot = pivot;
    p.partner = partner;
    p.a = x / r;
    p.b = -y / r;
    return p;
}

// unit triangular matrix with a single off-diagonal entry:
// lower kind has param at (partner, pivot), upper kind at (pivot, partner); 1-based
struct Eliminator {
    enum class Kind { lower, upper };
    Kind kind = Kind::lower;
    int pivot = 1;
    int partner = 2;
    cplx param{0.0, 0.0};

    int row() const { return kind == Kind::lower ? partner - 1 : pivot - 1; }
    int col() const { return kind == Kind::lower ? pivot - 1 : partner - 1; }

    Matrix materialize(int n) const {
        Matrix g = Matrix::Identity(n, n);
        g(row(), col()) = param;
        return g;
    }

    Eliminator inverse() const {
        Eliminator g = *this;
        g.param = -param;
        return g;
    }

    // M <- G M: row(r) += param * row(c)
    template <class Derived>
    void apply_left(Eigen::MatrixBase<Derived>& m) const {
        m.row(row()) += param * m.row(col());
    }

    // M <- M G: col(c) += param * col(r)
    template <class Derived>
    void apply_right(Eigen::MatrixBase<Derived>& m) const {
        m.col(col()) += param * m.col(row());
    }
};

struct LrFactors {
    Matrix L;
    Matrix R;
};

// non-pivoted LR (Doolittle) factorization
inline LrFactors lr_factorize(const Matrix& m, const LinalgConfig& cfg = {}) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeError, "lr_factorize needs a square matrix");
    const Eigen::Index n = m.rows();
    const double tol = cfg.pivot * max_abs(m);
    Matrix a = m;
    Matrix l = Matrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(a(k, k)) <= tol || a(k, k) == 0.0)
            throw Error(ErrorCode::StronglySingular, "vanishing leading minor", int(k + 1));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            cplx f = a(i, k) / a(k, k);
            l(i, k) = f;
            a.row(i).tail(n - k) -= f * a.row(k).tail(n - k);
            a(i, k) = 0.0;
        }
    }
    return {l, a.triangularView<Eigen::Upper>()};
}

// lower triangular L with L L^H = M and real positive diagonal
inline Matrix cholesky(const Matrix& m, const LinalgConfig& cfg = {}) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeError, "cholesky needs a square matrix");
    const Eigen::Index n = m.rows();
    const double scale = max_abs(m);
    if (max_abs(Matrix(m - m.adjoint())) > 1e-10 * scale)
        throw Error(ErrorCode::NotPositiveDefinite, "matrix is not Hermitian");
    const double tol = cfg.pivot * scale;
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j).real();
        for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > tol)) throw Error(ErrorCode::NotPositiveDefinite, "nonpositive pivot", int(j + 1));
        double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            cplx s = m(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

// singular values by one-sided (Hestenes) Jacobi, descending
inline RealVector jacobi_singular_values(const Matrix& m) {
    Matrix a = m.rows() >= m.cols() ? m : Matrix(m.adjoint());
    const Eigen::Index n = a.cols();
    if (n == 0) return RealVector();
    RealVector sq(n);
    for (Eigen::Index j = 0; j < n; ++j) sq(j) = a.col(j).squaredNorm();
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                double alpha = sq(p), beta = sq(q);
                cplx gamma = a.col(p).dot(a.col(q));
                double g = std::abs(gamma);
                if (g == 0.0 || g <= kEps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                cplx phase = gamma / g;
                double zeta = (beta - alpha) / (2.0 * g);
                double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (Eigen::Index r = 0; r < a.rows(); ++r) {
                    cplx x = a(r, p);
                    cplx y = a(r, q) * std::conj(phase);
                    a(r, p) = c * x - s * y;
                    a(r, q) = s * x + c * y;
                }
                sq(p) = a.col(p).squaredNorm();
                sq(q) = a.col(q).squaredNorm();
            }
        }
        if (!rotated) break;
    }
    RealVector s(n);
    for (Eigen::Index j = 0; j < n; ++j) s(j) = std::sqrt(sq(j));
    std::sort(s.data(), s.data() + n, std::greater<double>());
    return s;
}

enum class SvdBackend { jacobi, divide_and_conquer };

// descending singular values
inline RealVector singular_values(const Matrix& m, SvdBackend backend = SvdBackend::divide_and_conquer) {
    if (m.size() == 0) return RealVector();
    if (backend == SvdBackend::jacobi) return jacobi_singular_values(m);
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
}

inline double norm2(const Matrix& m, SvdBackend backend = SvdBackend::divide_and_conquer) {
    if (m.size() == 0) return 0.0;
    if (!m.allFinite()) return kInf;
    return singular_values(m, backend)(0);
}

inline double cond2(const Matrix& m, SvdBackend backend = SvdBackend::divide_and_conquer) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::ShapeError, "cond2 needs a square matrix");
    if (m.size() == 0) return 1.0;
    if (!m.allFinite()) return kInf;
    RealVector s = singular_values(m, backend);
    double smin = s(s.size() - 1);
    if (smin == 0.0) return kInf;
    return s(0) / smin;
}

// x such that x M = rhs (x as a column vector), via partially pivoted LU of M^T
inline Vector solve_row_system(const Matrix& m, const Vector& rhs, const LinalgConfig& cfg = {}) {
    if (m.rows() != m.cols() || rhs.size() != m.rows())
        throw Error(ErrorCode::ShapeError, "solve_row_system shape mismatch");
    const Eigen::Index n = m.rows();
    Matrix a = m.transpose();
    Vector b = rhs;
    const double tol = cfg.pivot * max_abs(m);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p;
        a.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
        p += k;
        if (std::abs(a(p, k)) <= tol || a(p, k) == 0.0)
            throw Error(ErrorCode::Singular, "pivot below tolerance", int(k + 1));
        if (p != k) {
            a.row(p).swap(a.row(k));
            std::swap(b(p), b(k));
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            cplx f = a(i, k) / a(k, k);
            a.row(i).tail(n - k) -= f * a.row(k).tail(n - k);
            b(i) -= f * b(k);
        }
    }
    Vector x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        cplx s = b(i);
        for (Eigen::Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
        x(i) = s / a(i, i);
    }
    return x;
}

// principal square root, branch cut on the negative real axis
inline cplx principal_sqrt(cplx z) { return std::sqrt(z); }

} // namespace ratiep
