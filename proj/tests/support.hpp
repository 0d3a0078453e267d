#pragma once
#include <random>

#include "ratiep/ratiep.hpp"

namespace ratiep::testing {

inline cplx polar_in_annulus(std::mt19937_64& rng, double r0, double r1) {
    std::uniform_real_distribution<double> rad(r0, r1), ang(0.0, 2.0 * std::numbers::pi);
    return std::polar(rad(rng), ang(rng));
}

inline cplx random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return {n(rng), n(rng)};
}

inline Vector random_weights(std::mt19937_64& rng, Eigen::Index m) {
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = random_complex(rng);
    return v;
}

// m nodes in the annulus r0 <= |z| <= r1 with random complex weights
inline DiscreteMeasure random_measure(std::mt19937_64& rng, Eigen::Index m, bool bilinear, double r0 = 0.5,
                                      double r1 = 1.5) {
    DiscreteMeasure d;
    d.nodes.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) d.nodes(i) = polar_in_annulus(rng, r0, r1);
    d.weights_v = random_weights(rng, m);
    if (bilinear) d.weights_w = random_weights(rng, m);
    return d;
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = random_complex(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(n, n);
}

// least-squares diagonal d with A diag(d) ~ B, columnwise
inline Vector fit_diagonal(const Matrix& a, const Matrix& b) {
    Vector d(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) d(j) = a.col(j).dot(b.col(j)) / a.col(j).squaredNorm();
    return d;
}

// max |A diag(d) - B| with d the fitted diagonal
inline double diagonal_mismatch(const Matrix& a, const Matrix& b) {
    Vector d = fit_diagonal(a, b);
    return max_abs(Matrix(a * d.asDiagonal() - b));
}

// max |A diag(d) - B| with d restricted to unit modulus
inline double unimodular_mismatch(const Matrix& a, const Matrix& b) {
    Vector d = fit_diagonal(a, b);
    for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = std::abs(d(j)) == 0.0 ? cplx(1.0) : d(j) / std::abs(d(j));
    return max_abs(Matrix(a * d.asDiagonal() - b));
}

inline PencilSolution scaled(PencilSolution s, cplx alpha) {
    s.pencil.B *= alpha;
    s.pencil.C *= alpha;
    return s;
}

} // namespace ratiep::testing
