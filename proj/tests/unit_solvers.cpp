#include <gtest/gtest.h>

#include "support.hpp"

using namespace ratiep;
using namespace ratiep::testing;

namespace {

const double kSqrtHalf = std::sqrt(0.5);

DiscreteMeasure unit_measure(const Vector& nodes, bool bilinear = false) {
    DiscreteMeasure d{nodes, Vector::Ones(nodes.size()), std::nullopt};
    if (bilinear) d.weights_w = Vector::Ones(nodes.size());
    return d;
}

DiscreteMeasure two_point() {
    Vector z(2);
    z << 1.0, -1.0;
    return unit_measure(z);
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::ParseError;
}

void expect_structure(const PencilSolution& s, double pole_tol) {
    EXPECT_TRUE(has_exact_band(s.pencil));
    EXPECT_TRUE(is_proper(s.pencil));
    EXPECT_LE(pole_defect(s), pole_tol);
}

// product-form values of the nested rational basis used by the Krylov expansions
Vector product_basis(const Vector& z, const PoleList& poles, Eigen::Index j) {
    Vector t = Vector::Ones(z.size());
    for (Eigen::Index l = 0; l < j; ++l)
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const Pole& p = poles[size_t(l)];
            t(i) *= p.is_infinite() ? z(i) : 1.0 / (p.mu() * z(i) - p.nu());
        }
    return t;
}

} // namespace

// rational Arnoldi

TEST(Arnoldi, OneByOne) {
    DiscreteMeasure d = unit_measure(Vector::Constant(1, 2.0));
    auto s = rational_arnoldi(d, {});
    EXPECT_EQ(s.V(0, 0), cplx(1.0));
    EXPECT_EQ(s.pencil.B(0, 0), cplx(2.0));
    EXPECT_EQ(s.pencil.C(0, 0), cplx(1.0));
}

TEST(Arnoldi, TwoPointPolynomialStep) {
    auto s = rational_arnoldi(two_point(), {Pole::infinity()});
    Matrix q(2, 2);
    q << 1.0, 1.0, 1.0, -1.0;
    q *= kSqrtHalf;
    EXPECT_LE(unimodular_mismatch(s.V, q), 1e-15);
    EXPECT_EQ(s.pencil.C(1, 0), cplx(0.0));
    EXPECT_NE(s.pencil.B(1, 0), cplx(0.0));
    EXPECT_LE(err_recurrence(s), 1e-15);
}

TEST(Arnoldi, UnitCircleTen) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(10));
    auto s = rational_arnoldi(d, circle_poles(9, 1.5));
    EXPECT_LE(err_orthogonality(s), 1e-13);
    EXPECT_LE(err_recurrence(s), 1e-13);
    EXPECT_LE(err_poles(s), 1e-12);
    expect_structure(s, 1e-12);
    EXPECT_LE(std::abs(s.V(0, 0) - d.weights_v(0) / d.weights_v.norm()), 1e-15);
    for (Eigen::Index i = 0; i + 1 < s.size(); ++i) {
        EXPECT_EQ(s.pencil.B(i + 1, i).imag(), 0.0);
        EXPECT_GT(s.pencil.B(i + 1, i).real(), 0.0);
    }
}

TEST(Arnoldi, PoleOnNodeRejected) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(3));
    PoleList poles{Pole::finite(d.nodes(2)), Pole::finite(3.0)};
    EXPECT_EQ(code_of([&] { rational_arnoldi(d, poles); }), ErrorCode::PoleCollidesWithNode);
}

TEST(Arnoldi, LargeUnitCircleStaysOrthogonal) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(200));
    auto s = rational_arnoldi(d, circle_poles(199, 1.5));
    EXPECT_LE(err_orthogonality(s), 1e-12);
    EXPECT_LE(err_recurrence(s), 1e-12);
    expect_structure(s, 1e-12);
}

// rational Lanczos

TEST(Lanczos, OneByOne) {
    DiscreteMeasure d = unit_measure(Vector::Constant(1, 3.0), true);
    auto s = rational_lanczos(d, {}, {});
    EXPECT_EQ(s.V(0, 0), cplx(1.0));
    EXPECT_EQ((*s.W)(0, 0), cplx(1.0));
    EXPECT_EQ(s.pencil.B(0, 0), cplx(3.0));
    EXPECT_EQ(s.pencil.C(0, 0), cplx(1.0));
}

TEST(Lanczos, InnerProductCaseReproducesArnoldi) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector z(3), v(3);
    for (int i = 0; i < 3; ++i) {
        z(i) = u(rng);
        v(i) = 0.5 + std::abs(u(rng));
    }
    DiscreteMeasure d{z, v, v};
    PoleList xi = circle_poles(2, 3.0);
    auto q = rational_arnoldi(DiscreteMeasure{z, v, std::nullopt}, xi);
    auto l = rational_lanczos(d, xi, conj(xi));
    Matrix g = q.V.adjoint() * l.V;
    EXPECT_LE((g.cwiseAbs() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(unimodular_mismatch(l.V, *l.W), 1e-8);
}

TEST(Lanczos, EllipseFive) {
    DiscreteMeasure d = unit_measure(ellipse_nodes(5), true);
    auto s = rational_lanczos(d, circle_poles(4, 3.0), conj(circle_poles(4, 4.0)));
    EXPECT_LE(err_orthogonality(s), 1e-6);
    EXPECT_LE(err_recurrence(s), 1e-6);
    EXPECT_LE(err_poles(s), 1e-6);
    expect_structure(s, 1e-10);
}

TEST(Lanczos, NormalizationSplitsThePivot) {
    std::mt19937_64 rng(32);
    DiscreteMeasure d = random_measure(rng, 6, true);
    auto s = rational_lanczos(d, circle_poles(5, 3.0), circle_poles(5, 3.0, 0.3));
    cplx nu = d.weights_v(0) / s.V(0, 0), eta = d.w()(0) / (*s.W)(0, 0);
    EXPECT_LE(std::abs(nu * std::conj(eta) - d.w().dot(d.weights_v)), 1e-12 * std::abs(d.w().dot(d.weights_v)));
    EXPECT_LE(max_abs(Matrix(s.V.col(0) * nu - d.weights_v)), 1e-13);
    EXPECT_LE(max_abs(Matrix(s.W->col(0) * eta - d.w())), 1e-13);
}

TEST(Lanczos, BiorthogonalWeightsBreakDown) {
    Vector z(2);
    z << 0.5, -0.5;
    DiscreteMeasure d{z, Vector::Ones(2), Vector::Ones(2)};
    (*d.weights_w)(1) = -1.0;
    try {
        rational_lanczos(d, {Pole::finite(3.0)}, {Pole::finite(3.0)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Breakdown);
        EXPECT_EQ(e.index(), 1);
    }
}

TEST(Lanczos, EngineeredSecondStepBreakdown) {
    // moments s0 = 1/3, s1 = -1, s2 = 3 of the form make s0 s2 = s1^2, so the second pivot vanishes
    Vector z(3), v = Vector::Ones(3), w(3);
    z << 1.0, -1.0, 0.0;
    w << 1.0, 2.0, -8.0 / 3.0;
    DiscreteMeasure d{z, v, w};
    PoleList inf{Pole::infinity(), Pole::infinity()};
    try {
        rational_lanczos(d, inf, inf);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Breakdown);
        EXPECT_EQ(e.index(), 2);
    }
}

// Krylov bases and the moment oracle

TEST(KrylovBasis, Examples) {
    auto k1 = krylov_basis(unit_measure(Vector::Constant(1, 0.3)), {}, KrylovSide::primal);
    EXPECT_EQ(k1(0, 0), cplx(1.0));
    auto k2 = krylov_basis(two_point(), {Pole::infinity()}, KrylovSide::primal);
    EXPECT_LE(std::abs(k2(0, 1) - kSqrtHalf) + std::abs(k2(1, 1) + kSqrtHalf), 1e-15);
}

TEST(KrylovBasis, NestedSpansMatchArnoldi) {
    std::mt19937_64 rng(33);
    DiscreteMeasure d = random_measure(rng, 8, false);
    PoleList xi = circle_poles(7, 3.0);
    Matrix K = krylov_basis(d, xi, KrylovSide::primal);
    auto s = rational_arnoldi(d, xi);
    for (Eigen::Index j = 1; j <= 8; ++j) {
        Matrix Qj = s.V.leftCols(j), Kj = K.leftCols(j);
        EXPECT_LE(norm2(Matrix(Kj - Qj * (Qj.adjoint() * Kj))), 1e-10) << "j = " << j;
    }
}

TEST(MomentMatrix, Examples) {
    EXPECT_EQ(moment_matrix(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), Matrix(Matrix::Identity(3, 3)));
    std::mt19937_64 rng(34);
    Matrix q = random_unitary(rng, 5).leftCols(3);
    EXPECT_LE(max_abs(Matrix(moment_matrix(q, q) - Matrix::Identity(3, 3))), 1e-13);
    EXPECT_EQ(code_of([] { moment_matrix(Matrix::Identity(3, 3), Matrix::Identity(2, 2)); }), ErrorCode::ShapeError);
}

TEST(MomentMatrix, MatchesBruteForceSum) {
    std::mt19937_64 rng(35);
    DiscreteMeasure d = random_measure(rng, 3, true);
    PoleList xi = circle_poles(2, 3.0), psi = circle_poles(2, 2.5, 0.4);
    Matrix Kv = krylov_basis(d, xi, KrylovSide::primal, {}, KrylovExpansion::shift_invert),
           Kw = krylov_basis(d, psi, KrylovSide::dual, {}, KrylovExpansion::shift_invert);
    Matrix M = moment_matrix(Kv, Kw);
    for (Eigen::Index j = 0; j < 3; ++j) {
        Vector u = product_basis(d.nodes, psi, j);
        double nu = u.cwiseProduct(d.w()).norm();
        for (Eigen::Index k = 0; k < 3; ++k) {
            Vector tk = product_basis(d.nodes, xi, k);
            double nt = tk.cwiseProduct(d.weights_v).norm();
            cplx sum = 0.0;
            for (Eigen::Index i = 0; i < 3; ++i) sum += std::conj(d.w()(i)) * d.weights_v(i) * u(i) * tk(i);
            EXPECT_LE(std::abs(M(j, k) - sum / (nu * nt)), 1e-14) << j << "," << k;
        }
    }
}

TEST(BiorthFromMoment, OrthonormalInputIsFixed) {
    std::mt19937_64 rng(36);
    Matrix q = random_unitary(rng, 4);
    auto [V, W] = biorth_from_moment(q, q);
    EXPECT_LE(max_abs(Matrix(V - q)), 1e-14);
    EXPECT_LE(max_abs(Matrix(W - q)), 1e-14);
}

TEST(BiorthFromMoment, EssentialUniqueness) {
    std::mt19937_64 rng(37);
    DiscreteMeasure d = random_measure(rng, 7, true);
    PoleList xi = circle_poles(6, 3.0), psi = circle_poles(6, 3.0, 0.5);
    DiscreteMeasure hp{d.nodes, d.weights_v, std::nullopt};
    Matrix Kv = krylov_basis(hp, xi, KrylovSide::primal);
    auto [Vc, Wc] = biorth_from_moment(Kv, Kv);
    EXPECT_LE(unimodular_mismatch(Vc, rational_arnoldi(hp, xi).V), 1e-8);
    Matrix Kw = krylov_basis(d, psi, KrylovSide::dual);
    auto [V, W] = biorth_from_moment(Kv, Kw);
    EXPECT_LE(max_abs(Matrix(W.adjoint() * V - Matrix::Identity(7, 7))), 1e-10);
    auto l = rational_lanczos(d, xi, psi);
    EXPECT_LE(diagonal_mismatch(V, l.V), 1e-6);
    EXPECT_LE(diagonal_mismatch(W, *l.W), 1e-6);
}

// Hessenberg updating

TEST(HpUpdate, SeedAndOneStepMatchArnoldi) {
    Vector z(2);
    z << cplx(0.3, 0.8), cplx(-0.9, 0.1);
    DiscreteMeasure d = unit_measure(z);
    Pole xi = Pole::finite(cplx(0.0, 2.0));
    auto seed = hp_seed(z(0), 1.0);
    EXPECT_EQ(seed.V(0, 0), cplx(1.0));
    EXPECT_EQ(seed.pencil.B(0, 0), z(0));
    EXPECT_EQ(seed.pencil.C(0, 0), cplx(1.0));
    auto s = hpiep_update({seed, z(1), 1.0, xi});
    auto a = rational_arnoldi(d, {xi});
    Matrix g = a.V.adjoint() * s.V;
    EXPECT_LE((g.cwiseAbs() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE(err_recurrence(s), 1e-13);
    expect_structure(s, 1e-13);
}

TEST(HpUpdate, EnforceOrthogonalityAlignsFirstColumn) {
    Vector z = unit_circle_nodes(4);
    std::mt19937_64 rng(41);
    Vector v = random_weights(rng, 4);
    auto s = hpiep_solve(DiscreteMeasure{z.head(3), v.head(3), std::nullopt}, circle_poles(2, 2.0));
    HpWork w{detail::embed(s.V, 1.0), detail::embed(s.pencil.B, z(3)), detail::embed(s.pencil.C, 1.0)};
    enforce_orthogonality(w, v.head(3).norm(), v(3));
    Vector proj = w.Q.adjoint() * v;
    EXPECT_LE(std::abs(proj(0) - v.norm()), 1e-14);
    EXPECT_LE(proj.tail(3).norm(), 1e-14);
}

TEST(HpUpdate, TenStepChain) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(10));
    PoleList xi = circle_poles(9, 1.5);
    int step = 0;
    auto s = hpiep_solve_visit(d, xi, [&](const PencilSolution& x) {
        ++step;
        EXPECT_TRUE(has_exact_band(x.pencil)) << "size " << step;
        EXPECT_LE(pole_defect(x), 1e-10) << "size " << step;
        if (x.size() > 1) EXPECT_LE(err_recurrence(x), 1e-12) << "size " << step;
    });
    EXPECT_EQ(step, 10);
    EXPECT_LE(err_orthogonality(s), 1e-13);
    EXPECT_LE(err_recurrence(s), 1e-13);
    EXPECT_LE(err_poles(s), 1e-12);
    auto k = compute_metrics(rational_arnoldi(d, xi));
    auto u = compute_metrics(s);
    EXPECT_LE(u.err_f, 10.0 * std::max(k.err_f, 1e-14));
}

TEST(HpUpdate, Errors) {
    auto seed = hp_seed(0.5, 1.0);
    EXPECT_EQ(code_of([&] { hpiep_update({seed, 0.5, 1.0, Pole::finite(3.0)}); }), ErrorCode::DuplicateNode);
    EXPECT_EQ(code_of([&] { hpiep_update({seed, 0.25, 0.0, Pole::finite(3.0)}); }), ErrorCode::InvalidWeight);
    EXPECT_EQ(code_of([&] { hpiep_update({seed, 0.25, 1.0, Pole::finite(0.25)}); }), ErrorCode::PoleCollidesWithNode);
    EXPECT_EQ(code_of([&] { hpiep_update({seed, 0.25, 1.0, Pole::finite(0.5)}); }), ErrorCode::PoleCollidesWithNode);
}

TEST(HpUpdate, InfinitePoleInstalledExactly) {
    DiscreteMeasure d = unit_measure(chebyshev_nodes(6));
    PoleList xi{Pole::infinity(), Pole::finite(2.0), Pole::infinity(), Pole::finite(cplx(0.0, 3.0)), Pole::infinity()};
    auto s = hpiep_solve(d, xi);
    EXPECT_LE(err_poles(s), 1e-12);
    EXPECT_LE(err_orthogonality(s), 1e-13);
    auto a = rational_arnoldi(d, xi);
    EXPECT_LE(unimodular_mismatch(a.V, s.V), 1e-8);
}

// tridiagonal updating

TEST(TpUpdate, SeedAndOneStepMatchLanczos) {
    std::mt19937_64 rng(51);
    DiscreteMeasure d = random_measure(rng, 2, true);
    Pole xi = Pole::finite(3.0), psi = Pole::finite(cplx(0.0, -2.5));
    auto seed = tp_seed(d.nodes(0), d.weights_v(0), d.w()(0));
    auto s = tpiep_update({seed, d.nodes(1), d.weights_v(1), d.w()(1), xi, psi});
    auto l = rational_lanczos(d, {xi}, {psi});
    EXPECT_LE(diagonal_mismatch(l.V, s.V), 1e-12);
    EXPECT_LE(diagonal_mismatch(*l.W, *s.W), 1e-12);
    expect_structure(s, 1e-12);
}

TEST(TpUpdate, SeedIsTrivial) {
    auto s = tp_seed(0.7, 1.0, 1.0);
    EXPECT_EQ(s.V(0, 0), cplx(1.0));
    EXPECT_EQ((*s.W)(0, 0), cplx(1.0));
    EXPECT_EQ(s.pencil.B(0, 0), cplx(0.7));
    EXPECT_EQ(s.pencil.C(0, 0), cplx(1.0));
}

TEST(TpUpdate, HermitianChebyshevChain) {
    DiscreteMeasure d = unit_measure(chebyshev_nodes(18), true);
    PoleList xi = circle_poles(17, 3.0);
    auto s = tpiep_solve_visit(d, xi, conj(xi), [](const PencilSolution& x) {
        EXPECT_TRUE(has_exact_band(x.pencil));
        EXPECT_LE(pole_defect(x), 1e-10);
        EXPECT_LE(unimodular_mismatch(x.V, *x.W), 1e-8) << "size " << x.size();
    });
    auto r = compute_metrics(s, {false, true});
    EXPECT_LE(std::abs(std::log10(r.err_f) + 12.9), 2.0) << r.err_f;
}

TEST(TpUpdate, RandomMatchesLanczos) {
    std::mt19937_64 rng(52);
    int compared = 0;
    for (int t = 0; t < 10; ++t) {
        Eigen::Index m = 2 + t % 7;
        DiscreteMeasure d = random_measure(rng, m, true);
        PoleList xi = circle_poles(m - 1, 3.0), psi = circle_poles(m - 1, 3.0, 0.7);
        PencilSolution u, l;
        try {
            l = rational_lanczos(d, xi, psi);
            u = tpiep_solve(d, xi, psi);
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), ErrorCode::Breakdown) << e.what();
            continue;
        }
        ++compared;
        EXPECT_LE(diagonal_mismatch(l.V, u.V), 1e-6) << "m = " << m;
        EXPECT_LE(diagonal_mismatch(*l.W, *u.W), 1e-6) << "m = " << m;
        expect_structure(u, 1e-10);
    }
    EXPECT_GE(compared, 8);
}

TEST(TpUpdate, EllipseEighteen) {
    DiscreteMeasure d = unit_measure(ellipse_nodes(18), true);
    auto s = tpiep_solve(d, circle_poles(17, 3.0), conj(circle_poles(17, 4.0)));
    EXPECT_LE(err_functions(s), 1e-8);
}

TEST(TpUpdate, Errors) {
    auto seed = tp_seed(0.5, 1.0, 1.0);
    Pole p = Pole::finite(3.0);
    EXPECT_EQ(code_of([&] { tpiep_update({seed, 0.25, 1.0, 0.0, p, p}); }), ErrorCode::InvalidWeight);
    EXPECT_EQ(code_of([&] { tpiep_update({seed, 0.5, 1.0, 1.0, p, p}); }), ErrorCode::DuplicateNode);
    Vector z(2);
    z << 0.5, -0.5;
    DiscreteMeasure d{z, Vector::Ones(2), Vector::Ones(2)};
    (*d.weights_w)(1) = -1.0;
    try {
        tpiep_solve(d, {p}, {p});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Breakdown);
        EXPECT_EQ(e.index(), 1);
    }
}

// function evaluation

TEST(OrfEval, SingleFunction) {
    auto s = rational_arnoldi(unit_measure(Vector::Constant(1, 2.0)), {});
    Vector r = evaluate_sequence(primal_handle(s), cplx(0.3, 0.1));
    ASSERT_EQ(r.size(), 1);
    EXPECT_EQ(r(0), cplx(1.0));
    EXPECT_EQ(kappa(primal_handle(s), s.measure), 1.0);
}

TEST(OrfEval, TwoPointPolynomial) {
    DiscreteMeasure d = two_point();
    auto s = rational_arnoldi(d, {Pole::infinity()});
    auto h = primal_handle(s);
    EXPECT_DOUBLE_EQ(h.r0.real(), kSqrtHalf);
    for (cplx z : {cplx(1.0), cplx(-1.0), cplx(0.4, 0.3)}) {
        Vector r = evaluate_sequence(h, z);
        EXPECT_EQ(r(0), h.r0);
        EXPECT_NEAR(std::abs(r(1)), std::abs(z) * kSqrtHalf, 1e-15);
    }
    Matrix R = evaluate_at_nodes(h, d.nodes);
    Matrix G = R.adjoint() * R;
    EXPECT_LE(max_abs(Matrix(G - Matrix::Identity(2, 2))), 1e-15);
}

TEST(OrfEval, GramIsIdentityAndResidualSmall) {
    std::mt19937_64 rng(61);
    DiscreteMeasure d = random_measure(rng, 9, false);
    auto s = rational_arnoldi(d, circle_poles(8, 3.0));
    auto h = primal_handle(s);
    EXPECT_LE(norm2(Matrix(function_moment_matrix(s) - Matrix::Identity(9, 9))), 1e-12);
    cplx z(0.2, -0.4);
    Vector x = evaluate_sequence(h, z);
    Matrix M = evaluation_matrix(h, z);
    Vector rhs = Vector::Zero(9);
    rhs(0) = h.r0;
    EXPECT_LE((x.transpose() * M - rhs.transpose()).norm(), cond2(M) * kEps * std::abs(h.r0) * 100);
    EXPECT_LE(max_abs(Matrix(x - solve_row_system(M, rhs))), 1e-12 * x.norm());
    double k = kappa(h, d);
    EXPECT_NEAR(kappa(primal_handle(scaled(s, cplx(0.0, 4.0))), d), k, 1e-10 * k);
}

TEST(OrfEval, BiorthogonalGram) {
    std::mt19937_64 rng(62);
    DiscreteMeasure d = random_measure(rng, 7, true);
    auto s = rational_lanczos(d, circle_poles(6, 3.0), circle_poles(6, 2.0, 0.2));
    EXPECT_LE(norm2(Matrix(function_moment_matrix(s) - Matrix::Identity(7, 7))), 1e-10);
    auto u = tpiep_solve(d, circle_poles(6, 3.0), circle_poles(6, 2.0, 0.2));
    EXPECT_LE(norm2(Matrix(function_moment_matrix(u) - Matrix::Identity(7, 7))), 1e-10);
}

TEST(OrfEval, SingularAtPole) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(3));
    PoleList xi{Pole::finite(2.0), Pole::finite(-2.0)};
    auto s = rational_arnoldi(d, xi);
    try {
        evaluate_sequence(primal_handle(s), 2.0);
        FAIL();
    } catch (const EvaluationSingularError& e) {
        EXPECT_EQ(e.z(), cplx(2.0));
        EXPECT_EQ(e.index(), 2);
    }
}

// metrics

TEST(Metrics, TrivialValues) {
    PencilSolution s;
    s.V = Matrix::Identity(3, 3);
    s.pencil.B = Matrix::Identity(3, 3);
    s.pencil.C = Matrix::Identity(3, 3);
    s.measure = unit_measure(Vector::Ones(3));
    EXPECT_EQ(err_orthogonality(s), 0.0);
    std::mt19937_64 rng(71);
    s.V = random_unitary(rng, 6);
    EXPECT_LE(err_orthogonality(s), kEps * 6);
    auto one = rational_arnoldi(unit_measure(Vector::Constant(1, 0.5)), {});
    EXPECT_EQ(err_recurrence(one), 0.0);
    EXPECT_EQ(err_functions(one), 0.0);
    EXPECT_EQ(err_poles(one), 0.0);
}

TEST(Metrics, ZeroRecurrenceIsDegenerate) {
    PencilSolution s;
    s.V = Matrix::Identity(2, 2);
    s.pencil.B = Matrix::Zero(2, 2);
    s.pencil.C = Matrix::Zero(2, 2);
    s.measure = unit_measure(unit_circle_nodes(2));
    EXPECT_EQ(code_of([&] { err_recurrence(s); }), ErrorCode::DegenerateInput);
}

TEST(Metrics, Sensitivity) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(50));
    auto s = hpiep_solve(d, circle_poles(49, 1.5));
    EXPECT_LE(err_recurrence(s), 1e-13);
    auto bad = s;
    bad.pencil.B(3, 7) += 1e-3;
    EXPECT_GE(err_recurrence(bad), 1e-5);
    for (double delta : {1e-9, 1e-6, 1e-3}) {
        auto p = s;
        p.pencil.B(11, 10) *= 1.0 + delta;
        double e = err_poles(p);
        EXPECT_GE(e, 0.1 * delta);
        EXPECT_LE(e, 10.0 * delta);
    }
}

TEST(Metrics, UnitCircleHundred) {
    DiscreteMeasure d = unit_measure(unit_circle_nodes(100));
    PoleList xi = circle_poles(99, 1.5);
    auto k = rational_arnoldi(d, xi);
    auto u = hpiep_solve(d, xi);
    EXPECT_LE(err_orthogonality(k), 1e-12);
    EXPECT_LE(err_poles(u), 1e-12);
}

TEST(Metrics, Invariances) {
    std::mt19937_64 rng(72);
    DiscreteMeasure d = random_measure(rng, 12, false);
    auto s = hpiep_solve(d, circle_poles(11, 3.0));
    double ep = err_poles(s), er = err_recurrence(s);
    for (cplx alpha : {cplx(1e-3), cplx(0.0, 7.0), cplx(-2.5, 1.5)}) {
        EXPECT_NEAR(err_poles(scaled(s, alpha)), ep, 1e-12);
        EXPECT_NEAR(err_recurrence(scaled(s, alpha)), er, 1e-12);
    }
    Vector phase(12);
    for (int i = 0; i < 12; ++i) phase(i) = std::polar(1.0, std::uniform_real_distribution<double>(0, 6.283)(rng));
    auto t = s;
    t.V = s.V * phase.asDiagonal();
    t.pencil.B = phase.conjugate().asDiagonal() * s.pencil.B * phase.asDiagonal();
    t.pencil.C = phase.conjugate().asDiagonal() * s.pencil.C * phase.asDiagonal();
    EXPECT_NEAR(err_recurrence(t), er, 1e-12);
    EXPECT_NEAR(err_poles(t), ep, 1e-12);
}

TEST(Metrics, InfinitePoleConvention) {
    PencilSolution s;
    s.V = Matrix::Identity(2, 2);
    s.pencil.B = Matrix::Identity(2, 2);
    s.pencil.C = Matrix::Identity(2, 2);
    s.pencil.B(1, 0) = 3.0;
    s.pencil.C(1, 0) = 4.0;
    s.measure = unit_measure(unit_circle_nodes(2));
    s.poles_xi = {Pole::infinity()};
    EXPECT_NEAR(err_poles(s), 0.8, 1e-15);
    s.pencil.C(1, 0) = 0.0;
    EXPECT_EQ(err_poles(s), 0.0);
}

TEST(Metrics, ReportFields) {
    DiscreteMeasure d = unit_measure(chebyshev_nodes(20), true);
    PoleList xi = circle_poles(19, 3.0);
    auto r = compute_metrics(tpiep_solve(d, xi, conj(xi)));
    EXPECT_EQ(r.m, 20);
    ASSERT_TRUE(r.err_f_truncated.has_value());
    EXPECT_LE(*r.err_f_truncated, r.err_f * (1.0 + 1e-12));
    for (double x : {r.err_o, r.err_r, r.err_f, r.err_p}) EXPECT_GE(x, 0.0);
    EXPECT_GE(r.kappa, 1.0);
    EXPECT_TRUE(std::isnan(compute_metrics(rational_lanczos(d, xi, conj(xi)), {false, false}).kappa));
}
