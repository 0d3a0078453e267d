#pragma once
#include <optional>
#include <utility>

#include "types.hpp"

namespace ratiep {

struct KrylovConfig {
    double breakdown = 1e-13;   // relative size of a vanishing candidate or pivot
    double collision = 1e-14;   // relative pole-node distance treated as a collision
    double band = 1e-8;         // tolerated out-of-band mass in the Lanczos pencil, per column
    bool strict_band = false;   // throw instead of truncating when the band tolerance is exceeded
};

namespace detail {

inline void check_poles(const PoleList& poles, const Vector& nodes, double tol) {
    for (size_t i = 0; i < poles.size(); ++i)
        for (Eigen::Index k = 0; k < nodes.size(); ++k) {
            if (poles[i].distance_to(nodes(k)) <= tol)
                throw Error(ErrorCode::PoleCollidesWithNode, "pole coincides with a node", int(i + 1));
        }
}

// (mu Z - nu)^{-1} x for a finite pole, Z x for an infinite one; the adjoint variant applies
// (mu Z - nu)^{-H} and Z^H, so real nodes with psi = conj(xi) give the same space on both sides
inline Vector expand(const Vector& nodes, const Pole& pole, const Vector& x, bool adjoint = false) {
    Vector y(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const cplx z = nodes(k);
        if (pole.is_infinite()) y(k) = (adjoint ? std::conj(z) : z) * x(k);
        else {
            const cplx d = pole.mu() * z - pole.nu();
            y(k) = x(k) / (adjoint ? std::conj(d) : d);
        }
    }
    return y;
}

inline Vector times_nodes(const Vector& nodes, const Vector& x) { return nodes.cwiseProduct(x); }

} // namespace detail

// orthonormal basis Q and Hessenberg pencil (H, K) with Z Q K = Q H
inline PencilSolution rational_arnoldi(const DiscreteMeasure& measure, const PoleList& poles,
                                       const KrylovConfig& cfg = {}) {
    measure.validate();
    const Eigen::Index m = measure.size();
    if (Eigen::Index(poles.size()) != m - 1)
        throw Error(ErrorCode::ShapeError, "need exactly m-1 poles");
    detail::check_poles(poles, measure.nodes, cfg.collision);

    const Vector& z = measure.nodes;
    Matrix Q = Matrix::Zero(m, m), H = Matrix::Zero(m, m), K = Matrix::Zero(m, m);
    Q.col(0) = measure.weights_v / measure.weights_v.norm();

    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        const Pole& pole = poles[k];
        Vector c = detail::expand(z, pole, Q.col(k));
        const double c0 = c.norm();
        auto basis = Q.leftCols(k + 1);
        Vector h = basis.adjoint() * c;
        c -= basis * h;
        Vector h2 = basis.adjoint() * c;
        c -= basis * h2;
        h += h2;
        const double hk = c.norm();
        if (!(hk > cfg.breakdown * c0)) throw Error(ErrorCode::Breakdown, "Krylov space lost a dimension", int(k + 1));
        Q.col(k + 1) = c / hk;

        Vector ht = Vector::Zero(m);
        ht.head(k + 1) = h;
        ht(k + 1) = hk;
        if (pole.is_infinite()) {
            K(k, k) = 1.0;
            H.col(k) = ht;
        } else {
            K.col(k) = pole.mu() * ht;
            H.col(k) = pole.nu() * ht;
            H(k, k) += 1.0;
        }
        if (H(k + 1, k) == 0.0 && K(k + 1, k) == 0.0)
            throw Error(ErrorCode::Breakdown, "pencil not proper", int(k + 1));
    }
    // the basis spans C^m, so Z q_m lies in range(Q)
    if (m == 1) {
        H(0, 0) = z(0);
    } else {
        H.col(m - 1) = Q.adjoint() * detail::times_nodes(z, Q.col(m - 1));
    }
    K(m - 1, m - 1) = 1.0;
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = j + 2; i < m; ++i) H(i, j) = K(i, j) = 0.0;

    PencilSolution s;
    s.kind = SolutionKind::orthogonal;
    s.V = std::move(Q);
    s.pencil = Pencil{PencilShape::hessenberg, std::move(H), std::move(K)};
    s.measure = measure;
    s.poles_xi = poles;
    return s;
}

struct LanczosResult {
    PencilSolution solution;
    double band_defect = 0.0;   // largest relative out-of-band entry removed
};

// biorthonormal bases V, W (W^H V = I) and tridiagonal pencil (T, S) with Z V S = V T
inline LanczosResult rational_lanczos_detailed(const DiscreteMeasure& measure, const PoleList& xi, const PoleList& psi,
                                               const KrylovConfig& cfg = {}) {
    measure.validate();
    const Eigen::Index m = measure.size();
    if (Eigen::Index(xi.size()) != m - 1 || Eigen::Index(psi.size()) != m - 1)
        throw Error(ErrorCode::ShapeError, "need exactly m-1 poles in each list");
    detail::check_poles(xi, measure.nodes, cfg.collision);
    detail::check_poles(psi, measure.nodes, cfg.collision);

    const Vector& z = measure.nodes;
    const Vector& v = measure.weights_v;
    const Vector& w = measure.w();
    Matrix V = Matrix::Zero(m, m), W = Matrix::Zero(m, m);

    auto place = [&](Eigen::Index k, const Vector& x, const Vector& y) {
        cplx d = y.dot(x);
        if (!(std::abs(d) > cfg.breakdown * x.norm() * y.norm()))
            throw Error(ErrorCode::Breakdown, "vanishing bilinear pivot", int(k + 1));
        cplx r = principal_sqrt(d);
        V.col(k) = x / r;
        W.col(k) = y / std::conj(r);
    };
    place(0, v, w);

    for (Eigen::Index k = 0; k + 1 < m; ++k) {
        Vector x = detail::expand(z, xi[k], V.col(k));
        Vector y = detail::expand(z, psi[k], W.col(k), true);
        auto Vk = V.leftCols(k + 1);
        auto Wk = W.leftCols(k + 1);
        for (int pass = 0; pass < 2; ++pass) {
            x -= Vk * (Wk.adjoint() * x);
            y -= Wk * (Vk.adjoint() * y);
        }
        place(k + 1, x, y);
    }

    // column c combines u = g v_{c-1} + d v_c so that its image stays inside the band
    Matrix T = Matrix::Zero(m, m), S = Matrix::Zero(m, m);
    const Matrix Wh = W.adjoint();
    double defect = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
        const bool infinite = c + 1 == m || xi[c].is_infinite();
        auto image = [&](const Vector& u) -> Vector {
            return infinite ? detail::times_nodes(z, u) : detail::expand(z, xi[c], u);
        };
        cplx g = 0.0, d = 1.0;
        if (c >= 2) {
            Matrix A(c - 1, 2);
            A.col(0) = (Wh * image(V.col(c - 1))).head(c - 1);
            A.col(1) = (Wh * image(V.col(c))).head(c - 1);
            Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
            Eigen::Vector2cd n = svd.matrixV().col(1);
            g = n(0);
            d = n(1);
        }
        Vector u = d * V.col(c);
        if (c >= 1) u += g * V.col(c - 1);
        Vector coeff = Vector::Zero(m);
        coeff(c) = d;
        if (c >= 1) coeff(c - 1) = g;
        Vector sc = Wh * image(u);
        Vector scol, tcol;
        if (infinite) {
            scol = coeff;
            tcol = sc;
        } else {
            scol = xi[c].mu() * sc;
            tcol = xi[c].nu() * sc + coeff;
        }
        const double scale = std::max(max_abs(scol), max_abs(tcol));
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i + 1 >= c && i <= c + 1) continue;
            defect = std::max(defect, std::max(std::abs(scol(i)), std::abs(tcol(i))) / scale);
            scol(i) = 0.0;
            tcol(i) = 0.0;
        }
        S.col(c) = scol;
        T.col(c) = tcol;
    }
    if (cfg.strict_band && defect > cfg.band)
        throw Error(ErrorCode::Breakdown, "recurrence coefficients leave the tridiagonal band");

    LanczosResult out;
    out.band_defect = defect;
    auto& s = out.solution;
    s.kind = SolutionKind::biorthogonal;
    s.V = std::move(V);
    s.W = std::move(W);
    s.pencil = Pencil{PencilShape::tridiagonal, std::move(T), std::move(S)};
    s.measure = measure;
    if (!s.measure.weights_w) s.measure.weights_w = w;
    s.poles_xi = xi;
    s.poles_psi = psi;
    return out;
}

inline PencilSolution rational_lanczos(const DiscreteMeasure& measure, const PoleList& xi, const PoleList& psi,
                                       const KrylovConfig& cfg = {}) {
    return rational_lanczos_detailed(measure, xi, psi, cfg).solution;
}

enum class KrylovSide { primal, dual };

// shift_invert multiplies by (mu z - nu)^{-1}; reflected by the Moebius factor (conj(nu) z - conj(mu)) / (mu z - nu),
// whose zero sits at the pole reflected in the unit circle. Both span the same nested spaces, but the reflected
// columns stay far better conditioned for nodes near the unit circle.
enum class KrylovExpansion { reflected, shift_invert };

namespace detail {

inline bool reflection_usable(const Pole& p) {
    if (p.is_infinite()) return false;
    const double r = std::abs(p.value());
    return r != 0.0 && std::abs(1.0 - r * r) >= 0.1;
}

} // namespace detail

// nested basis t_{j-1}(Z) v (primal) or u_{j-1}(Z^H) w (dual), continuation on the latest column
inline Matrix krylov_basis(const DiscreteMeasure& measure, const PoleList& poles, KrylovSide side,
                           const KrylovConfig& cfg = {}, KrylovExpansion expansion = KrylovExpansion::reflected) {
    measure.validate();
    const Eigen::Index m = measure.size();
    if (Eigen::Index(poles.size()) < m - 1) throw Error(ErrorCode::ShapeError, "need m-1 poles");
    const bool adjoint = side == KrylovSide::dual;
    detail::check_poles(PoleList(poles.begin(), poles.begin() + (m - 1)), measure.nodes, cfg.collision);
    const Vector& start = adjoint ? measure.w() : measure.weights_v;
    Matrix K(m, m);
    K.col(0) = start / start.norm();
    for (Eigen::Index j = 1; j < m; ++j) {
        const Pole& p = poles[size_t(j - 1)];
        Vector c = detail::expand(measure.nodes, p, K.col(j - 1), adjoint);
        if (expansion == KrylovExpansion::reflected && detail::reflection_usable(p))
            for (Eigen::Index k = 0; k < m; ++k) {
                const cplx n = std::conj(p.nu()) * measure.nodes(k) - std::conj(p.mu());
                c(k) *= adjoint ? std::conj(n) : n;
            }
        K.col(j) = c / c.norm();
    }
    return K;
}

inline Matrix moment_matrix(const Matrix& Kv, const Matrix& Kw) {
    if (Kv.rows() != Kw.rows()) throw Error(ErrorCode::ShapeError, "row counts differ");
    return Kw.adjoint() * Kv;
}

namespace detail {

// V = Kv R^{-1}, W = Kw L^{-H} from the moment matrix M = Kw^H Kv = L R;
// for Kw == Kv the Cholesky factor gives L = R^H
inline std::pair<Matrix, Matrix> moment_pass(const Matrix& Kv, const Matrix& Kw, bool hermitian, const LinalgConfig& cfg) {
    Matrix M = moment_matrix(Kv, Kw);
    Matrix L, R;
    if (hermitian) {
        L = cholesky(M, cfg);
        R = L.adjoint();
    } else {
        auto f = lr_factorize(M, cfg);
        L = std::move(f.L);
        R = std::move(f.R);
    }
    // V R = Kv and W L^H = Kw
    Matrix V = R.transpose().triangularView<Eigen::Lower>().solve(Kv.transpose()).transpose();
    Matrix W = L.conjugate().triangularView<Eigen::Lower>().solve(Kw.transpose()).transpose();
    return {V, W};
}

} // namespace detail

// a second pass on the first-pass bases removes the cond(K)^2 loss of a single factorization;
// both passes are triangular, so column j still spans the j-th nested Krylov space
inline std::pair<Matrix, Matrix> biorth_from_moment(const Matrix& Kv, const Matrix& Kw, const LinalgConfig& cfg = {},
                                                    int passes = 2) {
    const bool hermitian = Kv == Kw;
    auto vw = detail::moment_pass(Kv, Kw, hermitian, cfg);
    for (int k = 1; k < passes; ++k) vw = detail::moment_pass(vw.first, hermitian ? vw.first : vw.second, hermitian, cfg);
    return vw;
}

} // namespace ratiep
