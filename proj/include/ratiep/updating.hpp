#pragma once
#include <vector>

#include "krylov.hpp"

namespace ratiep {

enum class RotationSide { modulus_ratio, larger_column };

struct UpdateConfig {
    double collision = 1e-14;
    double breakdown = 1e-12;          // relative to the largest entry of the affected row or column
    RotationSide rotation_side = RotationSide::modulus_ratio;
    bool rescale = true;               // balance V/W column norms and (T, S) column scale after each update
};

struct HpUpdateRequest {
    PencilSolution prior;
    cplx new_node;
    cplx new_weight;
    Pole new_pole;
};

struct TpUpdateRequest {
    PencilSolution prior;
    cplx new_node;
    cplx new_weight_v;
    cplx new_weight_w;
    Pole new_pole_xi;
    Pole new_pole_psi;
};

namespace detail {

inline Matrix embed(const Matrix& a, cplx corner) {
    const Eigen::Index m = a.rows();
    Matrix b = Matrix::Zero(m + 1, m + 1);
    b.topLeftCorner(m, m) = a;
    b(m, m) = corner;
    return b;
}

// embedding seed pair with ratio equal to the node, entries kept O(1)
inline std::pair<cplx, cplx> seed_pair(cplx z) {
    if (std::abs(z) <= 1.0) return {z, 1.0};
    return {1.0, 1.0 / z};
}

inline void check_new_node(const DiscreteMeasure& prior, cplx z, const std::vector<Pole>& poles, double collision) {
    for (Eigen::Index k = 0; k < prior.size(); ++k)
        if (prior.nodes(k) == z) throw Error(ErrorCode::DuplicateNode, "node already present", int(k + 1));
    for (const auto& pole : poles) {
        for (Eigen::Index k = 0; k <= prior.size(); ++k) {
            cplx x = k < prior.size() ? prior.nodes(k) : z;
            if (pole.distance_to(x) <= collision)
                throw Error(ErrorCode::PoleCollidesWithNode, "new pole coincides with a node", int(k + 1));
        }
    }
}

inline DiscreteMeasure extend(const DiscreteMeasure& d, cplx z, cplx v, std::optional<cplx> w) {
    const Eigen::Index m = d.size();
    DiscreteMeasure e;
    e.nodes.resize(m + 1);
    e.nodes << d.nodes, z;
    e.weights_v.resize(m + 1);
    e.weights_v << d.weights_v, v;
    if (w) {
        Vector ww(m + 1);
        ww << d.w(), *w;
        e.weights_w = ww;
    }
    return e;
}

} // namespace detail

// working state of a Hessenberg update: Z Q K = Q H with the new node appended at index m
struct HpWork {
    Matrix Q, H, K;
    Eigen::Index e() const { return Q.cols() - 1; }
};

// P1 acting on rows (1, m+1) so that the updated first basis vector is parallel to the extended weights
inline PlaneRotation enforce_orthogonality(HpWork& w, double prior_weight_norm, cplx new_weight) {
    const int e = int(w.e());
    PlaneRotation p = rotation_to_eliminate(prior_weight_norm, new_weight, 1, e + 1);
    p.apply_left(w.H);
    p.apply_left(w.K);
    p.apply_right_adjoint(w.Q);
    return p;
}

// restores Hessenberg form by eliminating row m+1 left to right; prior subdiagonal ratios are preserved
inline void chase_hessenberg(HpWork& w, const UpdateConfig& cfg = {}) {
    const Eigen::Index e = w.e();
    const Eigen::Index m = e;
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        const cplx delta = w.H(j + 1, j), gamma = w.H(e, j), eta = w.H(e, e);
        const cplx beta = w.K(j + 1, j), alpha = w.K(e, j), eps = w.K(e, e);

        // right rotation on columns (j, e) making both first columns of the 2x2 blocks parallel
        cplx x = delta * eps - beta * eta;
        cplx y = -(delta * alpha - beta * gamma);
        double r = std::hypot(std::abs(x), std::abs(y));
        if (r > 0.0) {
            PlaneRotation pd;
            pd.pivot = int(j + 1);
            pd.partner = int(e + 1);
            pd.a = std::conj(x) / r;
            pd.b = y / r;
            pd.apply_right(w.H);
            pd.apply_right(w.K);
        }

        // choose which matrix defines the eliminating rotation
        const cplx hd = w.H(j + 1, j), hg = w.H(e, j);
        const cplx kb = w.K(j + 1, j), ka = w.K(e, j);
        const double hn = std::hypot(std::abs(hd), std::abs(hg));
        const double kn = std::hypot(std::abs(kb), std::abs(ka));
        bool use_h;
        if (cfg.rotation_side == RotationSide::modulus_ratio) {
            double lhs = std::abs(eps) == 0.0 ? kInf : std::abs(eta) / std::abs(eps);
            double rhs = std::abs(alpha) == 0.0 ? kInf : std::abs(delta) / std::abs(alpha);
            use_h = lhs < rhs;
        } else {
            use_h = hn / (max_abs(w.H) + kTiny) >= kn / (max_abs(w.K) + kTiny);
        }
        if (use_h && hn == 0.0) use_h = false;
        if (!use_h && kn == 0.0) use_h = true;
        if (hn == 0.0 && kn == 0.0) throw Error(ErrorCode::Breakdown, "vanishing column during chase", int(j + 1));

        PlaneRotation p = use_h ? rotation_to_eliminate(hd, hg, int(j + 2), int(e + 1))
                                : rotation_to_eliminate(kb, ka, int(j + 2), int(e + 1));
        p.apply_left(w.H);
        p.apply_left(w.K);
        p.apply_right_adjoint(w.Q);
        w.H(e, j) = 0.0;
        w.K(e, j) = 0.0;
    }
}

// final right rotation on columns (m, m+1) setting the trailing subdiagonal ratio to the new pole
inline void introduce_pole(HpWork& w, const Pole& pole) {
    const Eigen::Index e = w.e();
    const Eigen::Index p = e - 1;
    cplx x = pole.mu() * w.H(e, e) - pole.nu() * w.K(e, e);
    cplx y = -(pole.mu() * w.H(e, p) - pole.nu() * w.K(e, p));
    double r = std::hypot(std::abs(x), std::abs(y));
    if (r == 0.0) throw Error(ErrorCode::PoleInstallFailure, "trailing pencil entries vanish", int(e));
    PlaneRotation pd;
    pd.pivot = int(p + 1);
    pd.partner = int(e + 1);
    pd.a = std::conj(x) / r;
    pd.b = y / r;
    pd.apply_right(w.H);
    pd.apply_right(w.K);
    if (w.H(e, p) == 0.0 && w.K(e, p) == 0.0)
        throw Error(ErrorCode::PoleInstallFailure, "pencil became improper", int(e));
}

inline PencilSolution hpiep_update(const HpUpdateRequest& req, const UpdateConfig& cfg = {}) {
    const PencilSolution& prior = req.prior;
    if (prior.kind != SolutionKind::orthogonal || prior.pencil.shape != PencilShape::hessenberg)
        throw Error(ErrorCode::ShapeError, "Hessenberg update needs an orthogonal Hessenberg solution");
    if (req.new_weight == 0.0) throw Error(ErrorCode::InvalidWeight, "zero weight", int(prior.size() + 1));
    detail::check_new_node(prior.measure, req.new_node, {req.new_pole}, cfg.collision);
    for (size_t i = 0; i < prior.poles_xi.size(); ++i)
        if (prior.poles_xi[i].distance_to(req.new_node) <= cfg.collision)
            throw Error(ErrorCode::PoleCollidesWithNode, "prior pole coincides with the new node", int(i + 1));

    auto [hh, kh] = detail::seed_pair(req.new_node);
    HpWork w{detail::embed(prior.V, 1.0), detail::embed(prior.pencil.B, hh), detail::embed(prior.pencil.C, kh)};
    enforce_orthogonality(w, prior.measure.weights_v.norm(), req.new_weight);
    chase_hessenberg(w, cfg);
    introduce_pole(w, req.new_pole);

    PencilSolution s;
    s.kind = SolutionKind::orthogonal;
    s.V = std::move(w.Q);
    s.pencil = Pencil{PencilShape::hessenberg, std::move(w.H), std::move(w.K)};
    s.measure = detail::extend(prior.measure, req.new_node, req.new_weight, std::nullopt);
    s.poles_xi = prior.poles_xi;
    s.poles_xi.push_back(req.new_pole);
    return s;
}

inline PencilSolution hp_seed(cplx z, cplx v) {
    if (v == 0.0) throw Error(ErrorCode::InvalidWeight, "zero weight", 1);
    PencilSolution s;
    s.kind = SolutionKind::orthogonal;
    s.V = Matrix::Constant(1, 1, v / std::abs(v));
    s.pencil = Pencil{PencilShape::hessenberg, Matrix::Constant(1, 1, z), Matrix::Constant(1, 1, 1.0)};
    s.measure.nodes = Vector::Constant(1, z);
    s.measure.weights_v = Vector::Constant(1, v);
    return s;
}

// callback receives every intermediate solution, sizes 1..m
template <class Visit>
PencilSolution hpiep_solve_visit(const DiscreteMeasure& measure, const PoleList& poles, Visit&& visit,
                                 const UpdateConfig& cfg = {}) {
    measure.validate();
    const Eigen::Index m = measure.size();
    if (Eigen::Index(poles.size()) != m - 1) throw Error(ErrorCode::ShapeError, "need exactly m-1 poles");
    PencilSolution s = hp_seed(measure.nodes(0), measure.weights_v(0));
    visit(s);
    for (Eigen::Index k = 1; k < m; ++k) {
        s = hpiep_update({std::move(s), measure.nodes(k), measure.weights_v(k), poles[k - 1]}, cfg);
        visit(s);
    }
    return s;
}

inline PencilSolution hpiep_solve(const DiscreteMeasure& measure, const PoleList& poles, const UpdateConfig& cfg = {}) {
    return hpiep_solve_visit(measure, poles, [](const PencilSolution&) {}, cfg);
}

// working state of a tridiagonal update: Z V S = V T, W^H V = I, new node at index m
struct TpWork {
    Matrix V, W, T, S;
    Eigen::Index e() const { return V.cols() - 1; }

    // row r += b row c (left), bases follow so that the similarity is exact
    void row_op(Eigen::Index r, Eigen::Index c, cplx b) {
        T.row(r) += b * T.row(c);
        S.row(r) += b * S.row(c);
        V.col(c) -= b * V.col(r);
        W.col(r) += std::conj(b) * W.col(c);
    }

    // unit max-modulus scaling of row and column m+1 of (T, S); the row scaling moves into the bases
    void balance_trailing() {
        const Eigen::Index k = e();
        double c = std::max(T.col(k).cwiseAbs().maxCoeff(), S.col(k).cwiseAbs().maxCoeff());
        if (c > 0.0) {
            T.col(k) /= c;
            S.col(k) /= c;
        }
        double r = std::max(T.row(k).cwiseAbs().maxCoeff(), S.row(k).cwiseAbs().maxCoeff());
        if (r > 0.0) {
            T.row(k) /= r;
            S.row(k) /= r;
            V.col(k) *= r;
            W.col(k) /= r;
        }
    }

    // col c += a col r (right), bases unaffected
    void col_op(Eigen::Index c, Eigen::Index r, cplx a) {
        T.col(c) += a * T.col(r);
        S.col(c) += a * S.col(r);
    }
};

namespace detail {

// solves p + x q = 0 for two proportional (T, S) pairs, choosing the better-scaled one
inline cplx ratio_param(cplx pt, cplx qt, cplx ps, cplx qs, double st, double ss, double tol, int step) {
    double rt = std::abs(qt) / (st + kTiny), rs = std::abs(qs) / (ss + kTiny);
    if (std::max(rt, rs) <= tol) {
        if (std::abs(pt) <= tol * st && std::abs(ps) <= tol * ss) return 0.0;
        throw Error(ErrorCode::Breakdown, "vanishing pivot during tridiagonal chase", step);
    }
    return rt >= rs ? -pt / qt : -ps / qs;
}

// parameter x for which (n0 + x n1) / (d0 + x d1) vanishes; n0, d0 guard the scale
inline cplx colinear_param(cplx num, cplx den, double scale, double tol, int step) {
    if (std::abs(den) <= tol * scale) {
        if (std::abs(num) <= tol * scale) return 0.0;
        throw Error(ErrorCode::Breakdown, "vanishing pivot during tridiagonal chase", step);
    }
    return -num / den;
}

} // namespace detail

// left transformation on rows (1, m+1) making V e1 and W e1 parallel to the extended weights
inline void biorth_weights(TpWork& w, const Vector& v, const Vector& wt, cplx vn, cplx wn, const UpdateConfig& cfg = {}) {
    const Eigen::Index e = w.e();
    const Eigen::Index m = e;
    cplx nu = w.W.col(0).head(m).dot(v);
    cplx dt = wt.dot(v) + std::conj(wn) * vn;
    if (!(std::abs(dt) > cfg.breakdown * std::hypot(v.norm(), std::abs(vn)) * std::hypot(wt.norm(), std::abs(wn))))
        throw Error(ErrorCode::Breakdown, "extended weights are biorthogonal to each other", 1);
    cplx sd = principal_sqrt(dt);
    cplx ad = -vn / nu;
    cplx b = std::conj(wn) / sd;
    cplx d1 = sd / nu;
    Eigen::Matrix2cd x;
    x << d1 + b * ad, b, ad, 1.0;
    Eigen::Matrix2cd xi = x.inverse();
    for (Matrix* a : {&w.T, &w.S}) {
        for (Eigen::Index c = 0; c < a->cols(); ++c) {
            cplx p = (*a)(0, c), q = (*a)(e, c);
            (*a)(0, c) = x(0, 0) * p + x(0, 1) * q;
            (*a)(e, c) = x(1, 0) * p + x(1, 1) * q;
        }
    }
    Eigen::Matrix2cd xh = x.adjoint();
    for (Eigen::Index r = 0; r <= e; ++r) {
        cplx p = w.V(r, 0), q = w.V(r, e);
        w.V(r, 0) = p * xi(0, 0) + q * xi(1, 0);
        w.V(r, e) = p * xi(0, 1) + q * xi(1, 1);
        p = w.W(r, 0);
        q = w.W(r, e);
        w.W(r, 0) = p * xh(0, 0) + q * xh(1, 0);
        w.W(r, e) = p * xh(0, 1) + q * xh(1, 1);
    }
}

// restores tridiagonal form after the first-row/column transformation, keeping prior ratios
inline void chase_tridiagonal(TpWork& w, const UpdateConfig& cfg = {}) {
    const Eigen::Index e = w.e();
    const Eigen::Index m = e;
    const double tol = cfg.breakdown;
    Matrix& T = w.T;
    Matrix& S = w.S;
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        const int step = int(i + 1);
        w.balance_trailing();
        if (i == 0) {
            // column 2 += c column 1 makes row 1 parallel between T and S
            cplx num = T(0, 1) * S(0, e) - S(0, 1) * T(0, e);
            cplx den = T(0, 0) * S(0, e) - S(0, 0) * T(0, e);
            double scale = std::max(std::abs(T(0, 0) * S(0, e)), std::abs(S(0, 0) * T(0, e)));
            w.col_op(1, 0, detail::colinear_param(num, den, scale, tol, step));
        } else {
            cplx num = T(i, i + 1) * S(i, e) - S(i, i + 1) * T(i, e);
            cplx den = T(i, i + 1) * S(e, e) - S(i, i + 1) * T(e, e);
            double scale = std::max(std::abs(T(i, i + 1) * S(e, e)), std::abs(S(i, i + 1) * T(e, e)));
            w.row_op(i, e, detail::colinear_param(num, den, scale, tol, step));
        }
        {
            cplx num = T(i + 1, i) * S(e, i) - S(i + 1, i) * T(e, i);
            cplx den = T(i + 1, i) * S(e, e) - S(i + 1, i) * T(e, e);
            double scale = std::max(std::abs(T(i + 1, i) * S(e, e)), std::abs(S(i + 1, i) * T(e, e)));
            w.col_op(i, e, detail::colinear_param(num, den, scale, tol, step));
        }
        // row e += a row (i+1) removes (e, i)
        cplx ad = detail::ratio_param(T(e, i), T(i + 1, i), S(e, i), S(i + 1, i), T.row(i + 1).cwiseAbs().maxCoeff(),
                                      S.row(i + 1).cwiseAbs().maxCoeff(), tol, step);
        w.row_op(e, i + 1, ad);
        T(e, i) = 0.0;
        S(e, i) = 0.0;
        // column e += b column (i+1) removes (i, e)
        cplx bd = detail::ratio_param(T(i, e), T(i, i + 1), S(i, e), S(i, i + 1), T.col(i + 1).cwiseAbs().maxCoeff(),
                                      S.col(i + 1).cwiseAbs().maxCoeff(), tol, step);
        w.col_op(e, i + 1, bd);
        T(i, e) = 0.0;
        S(i, e) = 0.0;
    }
}

// trailing transformations setting (m+1, m) to xi and, for m >= 2, (m, m+1) to psi
inline void introduce_poles_t(TpWork& w, const Pole& xi, const std::optional<Pole>& psi, const UpdateConfig& cfg = {}) {
    const Eigen::Index e = w.e();
    const Eigen::Index p = e - 1;
    const double tol = cfg.breakdown;
    Matrix& T = w.T;
    Matrix& S = w.S;
    auto solve = [&](cplx num, cplx den, double scale) -> cplx {
        if (std::abs(den) <= tol * scale) {
            if (std::abs(num) <= tol * scale) return 0.0;
            throw Error(ErrorCode::PoleInstallFailure, "trailing diagonal pair vanishes", int(e));
        }
        return -num / den;
    };
    if (psi) {
        const Pole& q = *psi;
        double scale = std::max(std::abs(q.mu() * T(e, e)), std::abs(q.nu() * S(e, e)));
        cplx b = solve(q.mu() * T(p, e) - q.nu() * S(p, e), q.mu() * T(e, e) - q.nu() * S(e, e),
                       std::max(scale, std::max(std::abs(T(p, e)), std::abs(S(p, e)))));
        w.row_op(p, e, b);
    }
    double scale = std::max(std::abs(xi.mu() * T(e, e)), std::abs(xi.nu() * S(e, e)));
    cplx a = solve(xi.mu() * T(e, p) - xi.nu() * S(e, p), xi.mu() * T(e, e) - xi.nu() * S(e, e),
                   std::max(scale, std::max(std::abs(T(e, p)), std::abs(S(e, p)))));
    w.col_op(p, e, a);
    if (T(e, p) == 0.0 && S(e, p) == 0.0)
        throw Error(ErrorCode::PoleInstallFailure, "pencil became improper", int(e));
}

// balances ||V e_j|| = ||W e_j|| for j >= 2 and scales each (T, S) column to unit max entry
inline void rescale(TpWork& w) {
    const Eigen::Index n = w.V.cols();
    for (Eigen::Index j = 1; j < n; ++j) {
        double nv = w.V.col(j).norm(), nw = w.W.col(j).norm();
        if (nv == 0.0 || nw == 0.0) continue;
        double d = std::sqrt(nv / nw);
        w.V.col(j) /= d;
        w.W.col(j) *= d;
        w.T.row(j) *= d;
        w.S.row(j) *= d;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = std::max(w.T.col(j).cwiseAbs().maxCoeff(), w.S.col(j).cwiseAbs().maxCoeff());
        if (s > 0.0) {
            w.T.col(j) /= s;
            w.S.col(j) /= s;
        }
    }
}

inline PencilSolution tpiep_update(const TpUpdateRequest& req, const UpdateConfig& cfg = {}) {
    const PencilSolution& prior = req.prior;
    if (prior.kind != SolutionKind::biorthogonal || prior.pencil.shape != PencilShape::tridiagonal || !prior.W)
        throw Error(ErrorCode::ShapeError, "tridiagonal update needs a biorthogonal tridiagonal solution");
    const Eigen::Index m = prior.size();
    if (req.new_weight_v == 0.0 || req.new_weight_w == 0.0)
        throw Error(ErrorCode::InvalidWeight, "zero weight", int(m + 1));
    const PoleList psi_prior = prior.poles_psi.value_or(PoleList{});
    if (Eigen::Index(prior.poles_xi.size()) != m - 1 || Eigen::Index(psi_prior.size()) != m - 1)
        throw Error(ErrorCode::ShapeError, "prior pole lists must have m-1 entries");
    detail::check_new_node(prior.measure, req.new_node, {req.new_pole_xi, req.new_pole_psi},
                           cfg.collision);
    for (size_t i = 0; i + 1 < size_t(m); ++i)
        if (prior.poles_xi[i].distance_to(req.new_node) <= cfg.collision ||
            psi_prior[i].distance_to(req.new_node) <= cfg.collision)
            throw Error(ErrorCode::PoleCollidesWithNode, "prior pole coincides with the new node", int(i + 1));

    auto [th, sh] = detail::seed_pair(req.new_node);
    TpWork w{detail::embed(prior.V, 1.0), detail::embed(*prior.W, 1.0), detail::embed(prior.pencil.B, th),
             detail::embed(prior.pencil.C, sh)};
    biorth_weights(w, prior.measure.weights_v, prior.measure.w(), req.new_weight_v, req.new_weight_w, cfg);
    chase_tridiagonal(w, cfg);
    std::optional<Pole> psi;
    if (m >= 2) psi = psi_prior[m - 2];
    introduce_poles_t(w, req.new_pole_xi, psi, cfg);
    if (cfg.rescale) rescale(w);

    PencilSolution s;
    s.kind = SolutionKind::biorthogonal;
    s.V = std::move(w.V);
    s.W = std::move(w.W);
    s.pencil = Pencil{PencilShape::tridiagonal, std::move(w.T), std::move(w.S)};
    s.measure = detail::extend(prior.measure, req.new_node, req.new_weight_v, req.new_weight_w);
    s.poles_xi = prior.poles_xi;
    s.poles_xi.push_back(req.new_pole_xi);
    s.poles_psi = psi_prior;
    s.poles_psi->push_back(req.new_pole_psi);
    return s;
}

inline PencilSolution tp_seed(cplx z, cplx v, cplx w) {
    if (v == 0.0 || w == 0.0) throw Error(ErrorCode::InvalidWeight, "zero weight", 1);
    cplx d = std::conj(w) * v;
    cplx r = principal_sqrt(d);
    PencilSolution s;
    s.kind = SolutionKind::biorthogonal;
    s.V = Matrix::Constant(1, 1, v / r);
    s.W = Matrix::Constant(1, 1, w / std::conj(r));
    s.pencil = Pencil{PencilShape::tridiagonal, Matrix::Constant(1, 1, z), Matrix::Constant(1, 1, 1.0)};
    s.measure.nodes = Vector::Constant(1, z);
    s.measure.weights_v = Vector::Constant(1, v);
    s.measure.weights_w = Vector::Constant(1, w);
    s.poles_psi = PoleList{};
    return s;
}

template <class Visit>
PencilSolution tpiep_solve_visit(const DiscreteMeasure& measure, const PoleList& xi, const PoleList& psi, Visit&& visit,
                                 const UpdateConfig& cfg = {}) {
    measure.validate();
    const Eigen::Index m = measure.size();
    if (Eigen::Index(xi.size()) != m - 1 || Eigen::Index(psi.size()) != m - 1)
        throw Error(ErrorCode::ShapeError, "need exactly m-1 poles in each list");
    const Vector& w = measure.w();
    cplx d = w.dot(measure.weights_v);
    if (!(std::abs(d) > cfg.breakdown * w.norm() * measure.weights_v.norm()))
        throw Error(ErrorCode::Breakdown, "weight vectors are biorthogonal", 1);
    PencilSolution s = tp_seed(measure.nodes(0), measure.weights_v(0), w(0));
    visit(s);
    for (Eigen::Index k = 1; k < m; ++k) {
        s = tpiep_update({std::move(s), measure.nodes(k), measure.weights_v(k), w(k), xi[k - 1], psi[k - 1]}, cfg);
        visit(s);
    }
    return s;
}

inline PencilSolution tpiep_solve(const DiscreteMeasure& measure, const PoleList& xi, const PoleList& psi,
                                  const UpdateConfig& cfg = {}) {
    return tpiep_solve_visit(measure, xi, psi, [](const PencilSolution&) {}, cfg);
}

} // namespace ratiep
