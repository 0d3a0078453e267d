#pragma once
#include <optional>
#include <vector>

#include "linalg.hpp"

namespace ratiep {

// point of the extended complex plane stored as nu/mu, scaled so max(|nu|, |mu|) = 1
class ExtendedComplexPole {
public:
    ExtendedComplexPole() : nu_(1.0), mu_(0.0) {}

    static ExtendedComplexPole fraction(cplx nu, cplx mu) {
        double s = std::max(std::abs(nu), std::abs(mu));
        if (s == 0.0 || !std::isfinite(s)) throw Error(ErrorCode::DegenerateInput, "pole fraction 0/0");
        if (std::abs(mu) == 0.0) return infinity();
        ExtendedComplexPole p;
        p.nu_ = nu / s;
        p.mu_ = mu / s;
        return p;
    }

    static ExtendedComplexPole finite(cplx xi) {
        if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) return infinity();
        return std::abs(xi) <= 1.0 ? fraction(xi, 1.0) : fraction(1.0, 1.0 / xi);
    }

    static ExtendedComplexPole infinity() { return ExtendedComplexPole(); }

    cplx nu() const { return nu_; }
    cplx mu() const { return mu_; }
    bool is_infinite() const { return mu_ == 0.0; }

    cplx value() const {
        if (is_infinite()) return {kInf, 0.0};
        return nu_ / mu_;
    }

    ExtendedComplexPole conj() const { return fraction(std::conj(nu_), std::conj(mu_)); }

    // true when the pair (h, k) represents this pole: |h mu - k nu| <= tol (|h mu| + |k nu|)
    bool matches_ratio(cplx h, cplx k, double tol) const {
        double lhs = std::abs(h * mu_ - k * nu_);
        return lhs <= tol * (std::abs(h * mu_) + std::abs(k * nu_) + kTiny);
    }

    // |mu z - nu| relative to the fraction scale; zero when the pole sits on z
    double distance_to(cplx z) const {
        return std::abs(mu_ * z - nu_) / (std::abs(mu_ * z) + std::abs(nu_));
    }

    friend bool operator==(const ExtendedComplexPole& x, const ExtendedComplexPole& y) {
        return x.nu_ == y.nu_ && x.mu_ == y.mu_;
    }

private:
    cplx nu_;
    cplx mu_;
};

using Pole = ExtendedComplexPole;
using PoleList = std::vector<Pole>;

inline PoleList conj(const PoleList& poles) {
    PoleList out;
    out.reserve(poles.size());
    for (const auto& p : poles) out.push_back(p.conj());
    return out;
}

struct DiscreteMeasure {
    Vector nodes;
    Vector weights_v;
    std::optional<Vector> weights_w;

    Eigen::Index size() const { return nodes.size(); }
    bool bilinear() const { return weights_w.has_value(); }
    const Vector& w() const { return weights_w ? *weights_w : weights_v; }

    // sizes, pairwise distinct nodes, nonzero weights
    void validate() const {
        const Eigen::Index m = nodes.size();
        if (m == 0) throw Error(ErrorCode::InvalidMeasure, "empty measure");
        if (weights_v.size() != m || (weights_w && weights_w->size() != m))
            throw Error(ErrorCode::ShapeError, "weight vector length differs from node count");
        if (!nodes.allFinite() || !weights_v.allFinite() || (weights_w && !weights_w->allFinite()))
            throw Error(ErrorCode::InvalidMeasure, "non-finite node or weight");
        for (Eigen::Index i = 0; i < m; ++i) {
            if (weights_v(i) == 0.0 || (weights_w && (*weights_w)(i) == 0.0))
                throw Error(ErrorCode::InvalidWeight, "zero weight", int(i + 1));
            for (Eigen::Index j = 0; j < i; ++j)
                if (nodes(i) == nodes(j)) throw Error(ErrorCode::DuplicateNode, "repeated node", int(i + 1));
        }
    }

    DiscreteMeasure head(Eigen::Index k) const {
        DiscreteMeasure d{nodes.head(k), weights_v.head(k), std::nullopt};
        if (weights_w) d.weights_w = weights_w->head(k);
        return d;
    }
};

enum class PencilShape { hessenberg, tridiagonal };

// (B, C) = (H, K) for the Hessenberg problem, (T, S) for the tridiagonal one
struct Pencil {
    PencilShape shape = PencilShape::hessenberg;
    Matrix B;
    Matrix C;

    Eigen::Index size() const { return B.rows(); }
};

enum class SolutionKind { orthogonal, biorthogonal };

struct PencilSolution {
    SolutionKind kind = SolutionKind::orthogonal;
    Matrix V;
    std::optional<Matrix> W;
    Pencil pencil;
    DiscreteMeasure measure;
    PoleList poles_xi;
    std::optional<PoleList> poles_psi;

    Eigen::Index size() const { return V.cols(); }
    const Matrix& basis_w() const { return W ? *W : V; }
};

// entries outside the band are bitwise zero
inline bool has_exact_band(const Pencil& p) {
    const Eigen::Index m = p.size();
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i) {
            bool outside = i > j + 1 || (p.shape == PencilShape::tridiagonal && j > i + 1);
            if (outside && (p.B(i, j) != 0.0 || p.C(i, j) != 0.0)) return false;
        }
    return true;
}

// no subdiagonal pair (and, for tridiagonal, superdiagonal pair) vanishes entirely
inline bool is_proper(const Pencil& p) {
    const Eigen::Index m = p.size();
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        if (p.B(i + 1, i) == 0.0 && p.C(i + 1, i) == 0.0) return false;
        if (p.shape == PencilShape::tridiagonal && p.B(i, i + 1) == 0.0 && p.C(i, i + 1) == 0.0)
            return false;
    }
    return true;
}

// largest relative cross-product defect over every constrained position:
// subdiagonal (i+1, i) carries xi_i, superdiagonal (i, i+1) carries psi_{i-1} for i >= 2
inline double pole_defect(const PencilSolution& s) {
    const auto& p = s.pencil;
    const Eigen::Index m = p.size();
    auto defect = [](const Pole& pole, cplx h, cplx k) {
        double num = std::abs(h * pole.mu() - k * pole.nu());
        double den = std::abs(h * pole.mu()) + std::abs(k * pole.nu());
        if (num == 0.0) return 0.0;
        return den == 0.0 ? kInf : num / den;
    };
    double worst = 0.0;
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        worst = std::max(worst, defect(s.poles_xi.at(i), p.B(i + 1, i), p.C(i + 1, i)));
    if (p.shape == PencilShape::tridiagonal && s.poles_psi)
        for (Eigen::Index i = 1; i + 1 < m; ++i)
            worst = std::max(worst, defect(s.poles_psi->at(i - 1), p.B(i, i + 1), p.C(i, i + 1)));
    return worst;
}

} // namespace ratiep
