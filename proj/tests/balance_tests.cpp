#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fbms/balance.hpp"

using namespace fbms;
using Eigen::VectorXd;

namespace {
VectorXd closed_form_ratios(int N) {
    const int n = N / 2;
    VectorXd x(N - 1);
    for (int j = 1; j <= N - 1; ++j)
        x[j - 1] = std::sin(j * M_PI / N) / std::sin(n * M_PI / N);
    return x;
}
}  // namespace

TEST_CASE("mirror projection") {
    VectorXd v(3);
    v << 1, 2, 3;
    const VectorXd vp = balance::mirror_project(v, +1);
    CHECK(vp[0] == doctest::Approx(2.0));
    CHECK(vp[1] == doctest::Approx(2.0));
    CHECK(vp[2] == doctest::Approx(2.0));

    VectorXd odd(3);
    odd << 1, 0, -1;
    CHECK((balance::mirror_project(odd, -1) - odd).norm() < 1e-15);

    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    VectorXd r(6);
    for (int i = 0; i < 6; ++i) r[i] = gauss(rng);
    CHECK((balance::mirror_project(r, +1) + balance::mirror_project(r, -1) - r).norm() < 1e-14);
}

TEST_CASE("limiting waist ratios: small cases") {
    const auto r3 = balance::limiting_waist_ratios(3);
    CHECK(r3.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r3.x[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r3.lambda == doctest::Approx(1.0).epsilon(1e-12));

    const auto r4 = balance::limiting_waist_ratios(4);
    CHECK(r4.x[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
    CHECK(r4.x[1] == doctest::Approx(1.0));
    CHECK(r4.x[2] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
    CHECK(r4.lambda == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const auto r5 = balance::limiting_waist_ratios(5);
    CHECK(r5.x[0] == doctest::Approx(2 * std::cos(M_PI / 5) - 1).epsilon(1e-10));
    CHECK(r5.lambda == doctest::Approx(2 * std::cos(M_PI / 5)).epsilon(1e-12));
}

TEST_CASE("waist ratios match the closed-form oracle for N in [2,12]") {
    for (int N = 2; N <= 12; ++N) {
        const auto r = balance::limiting_waist_ratios(N);
        const VectorXd oracle = closed_form_ratios(N);
        CHECK((r.x - oracle).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(balance::balancing_residual(N, r.x) < 1e-12);
        CHECK(r.lambda < 2.0);
        CHECK(r.lambda == doctest::Approx(2 * std::cos(M_PI / N)).epsilon(1e-12));
        // mirror-even, positive, increasing up to the middle
        CHECK(balance::in_mirror_class(r.x, +1, 1e-10));
        for (int i = 0; i < N - 1; ++i) CHECK(r.x[i] > 0.0);
        for (int i = 0; i + 1 < N / 2; ++i) CHECK(r.x[i] < r.x[i + 1]);
        CHECK(r.x[N / 2 - 1] == doctest::Approx(1.0));
    }
}

TEST_CASE("uniqueness: no other eigenvector balances with positive entries") {
    for (int N = 2; N <= 6; ++N) {
        const int d = N - 1;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i + 1 < d; ++i) B(i, i + 1) = B(i + 1, i) = 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        const auto r = balance::limiting_waist_ratios(N);
        for (int k = 0; k + 1 < d; ++k) {  // all but the Perron eigenvector
            VectorXd v = es.eigenvectors().col(k);
            bool positive = true, negative = true;
            for (int i = 0; i < d; ++i) {
                positive &= v[i] > 1e-12;
                negative &= v[i] < -1e-12;
            }
            CHECK_FALSE(positive);
            CHECK_FALSE(negative);
            // and perturbing x by it breaks the balancing equation
            const VectorXd y = r.x + 0.1 * v;
            CHECK(balance::balancing_residual(N, y) > 1e-6);
        }
    }
}

TEST_CASE("derived parameters: N=2, m=10 closed forms") {
    const auto p = balance::StackingParams::make(2, 10);
    const auto d = balance::derived_parameters(p);
    CHECK(d.taubar[0] == doctest::Approx(std::exp(-5.0) / 10.0).epsilon(1e-14));
    CHECK(d.tau[0] == d.taubar[0]);
    CHECK(d.hK[0] == 0.0);
    const double expected_hB = -d.tau[0] * std::acosh(1.0 / (10 * d.tau[0]));
    CHECK(d.hB[0] == doctest::Approx(expected_hB).epsilon(1e-12));
    CHECK(d.hB[0] == doctest::Approx(-3.836e-3).epsilon(1e-3));
    CHECK(d.hB[1] == doctest::Approx(-d.hB[0]).epsilon(1e-14));
    CHECK(d.matching_residual() < 1e-16);
}

TEST_CASE("anchors and symmetry classes") {
    for (int N = 2; N <= 7; ++N) {
        const int m = 12;
        auto p = balance::StackingParams::make(N, m);
        const auto d = balance::derived_parameters(p);
        if (N % 2 == 0) CHECK(d.hK[N / 2 - 1] == 0.0);
        else CHECK(d.hB[N / 2] == 0.0);
        CHECK(d.disloc.cwiseAbs().maxCoeff() == 0.0);  // xi = 0
        CHECK(balance::in_mirror_class(d.tau, +1, 1e-13));
        CHECK(balance::in_mirror_class(d.hK, -1, 1e-12));
        CHECK(balance::in_mirror_class(d.hB, -1, 1e-12));
        CHECK(d.matching_residual() < 1e-15);
        for (int i = 0; i + 1 < N; ++i) CHECK(d.hB[i] < d.hB[i + 1]);
        for (int i = 0; i < N - 1; ++i) {
            CHECK(d.hB[i] < d.hK[i]);
            CHECK(d.hK[i] < d.hB[i + 1]);
        }
    }
}

TEST_CASE("arcosh domain violation reports the offending ribbon") {
    auto p = balance::StackingParams::make(2, 10);
    p.zeta = VectorXd::Constant(1, 6.0);  // inflates tau beyond 1/m
    CHECK_THROWS_WITH_AS(balance::derived_parameters(p),
                         doctest::Contains("m too small"), std::domain_error);
}

TEST_CASE("negating xi negates the dislocation-induced offsets") {
    // heights are affine in xi, so the xi-induced parts flip sign exactly
    const int N = 5, m = 20;
    VectorXd zeta = VectorXd::Zero(N - 1);
    VectorXd xi(N - 1);
    xi << 0.4, -0.2, 0.2, -0.4;
    auto d0 = balance::derived_parameters(balance::StackingParams::make(N, m));
    auto dplus = balance::derived_parameters(balance::StackingParams::make(N, m, zeta, xi));
    auto dminus = balance::derived_parameters(balance::StackingParams::make(N, m, zeta, -xi));
    CHECK((dplus.hK + dminus.hK - 2 * d0.hK).cwiseAbs().maxCoeff() == 0.0);
    CHECK((dplus.hB + dminus.hB - 2 * d0.hB).cwiseAbs().maxCoeff() == 0.0);
    CHECK((dplus.disloc + dminus.disloc).cwiseAbs().maxCoeff() == 0.0);
    CHECK((dplus.tau - dminus.tau).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dplus.disloc.cwiseAbs().maxCoeff() > 0.0);
    // dislocations are mirror-even with pinned zero ends
    CHECK(balance::in_mirror_class(dplus.disloc, +1, 1e-13));
    CHECK(dplus.disloc[0] == 0.0);
    CHECK(dplus.disloc[N - 1] == 0.0);
}

TEST_CASE("predicted forces: leading order at N=2") {
    const auto d = balance::derived_parameters(balance::StackingParams::make(2, 10));
    const auto f = balance::predicted_forces(d);
    CHECK(f.F[0] / d.tau[0] == doctest::Approx(-2 * M_PI * std::log(2.0)).epsilon(1e-3));
    CHECK(balance::in_mirror_class(f.F, -1, 1e-12));
}

TEST_CASE("forces stay mirror-odd for generic parameters") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int N : {3, 4, 5, 6}) {
        VectorXd zeta(N - 1), xi(N - 1);
        for (int i = 0; i < N - 1; ++i) {
            zeta[i] = uni(rng);
            xi[i] = uni(rng);
        }
        zeta = balance::mirror_project(zeta, +1);
        xi = balance::mirror_project(xi, -1);
        const auto d = balance::derived_parameters(balance::StackingParams::make(N, 40, zeta, xi));
        const auto f = balance::predicted_forces(d);
        CHECK(balance::in_mirror_class(f.F, -1, 1e-10));
    }
}

TEST_CASE("Ftilde stays bounded as m grows") {
    for (int N : {2, 3, 4}) {
        double prev = 0;
        for (int m : {20, 40, 80}) {
            const auto d = balance::derived_parameters(balance::StackingParams::make(N, m));
            const auto f = balance::predicted_forces(d);
            const double norm = f.Ftilde.cwiseAbs().maxCoeff();
            CHECK(norm < 50.0);
            prev = norm;
        }
        (void)prev;
    }
}

TEST_CASE("coker map dimensions and invertibility") {
    const auto r2 = balance::limiting_waist_ratios(2);
    const auto cm2 = balance::coker_map(2, r2.x);
    CHECK(cm2.P.rows() == 1);
    CHECK(cm2.P.cols() == 1);
    CHECK(cm2.basis_xi.cols() == 0);

    const auto r4 = balance::limiting_waist_ratios(4);
    const auto cm4 = balance::coker_map(4, r4.x);
    CHECK(cm4.P.rows() == 3);
    CHECK(cm4.P.cols() == 3);
    CHECK(cm4.norm_P > 0);
    CHECK(std::isfinite(cm4.norm_P_inv));

    // linearity at zero
    const auto [f0, d0] = cm4.apply(VectorXd::Zero(3), VectorXd::Zero(3));
    CHECK(f0.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coker map predicts the scaled forces and dislocations") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int N : {2, 3, 4, 5}) {
        const auto wr = balance::limiting_waist_ratios(N);
        const auto cm = balance::coker_map(N, wr.x);
        VectorXd zeta(N - 1), xi(N - 1);
        for (int i = 0; i < N - 1; ++i) {
            zeta[i] = uni(rng);
            xi[i] = uni(rng);
        }
        zeta = balance::mirror_project(zeta, +1);
        xi = balance::mirror_project(xi, -1);

        double first_norm = -1;
        for (int m : {30, 60, 120}) {
            const auto d =
                balance::derived_parameters(balance::StackingParams::make(N, m, zeta, xi));
            const auto f = balance::predicted_forces(d);
            const auto [Fpred, Dpred] = cm.apply(zeta, xi);
            const double taun = d.tau[d.n - 1];
            const double res = ((f.F / taun - Fpred).squaredNorm() +
                                (d.disloc / taun - Dpred).squaredNorm());
            const double norm = std::sqrt(res);
            CHECK(norm < 25.0);
            if (first_norm < 0) first_norm = norm;
            CHECK(norm < 2.0 * first_norm + 5.0);  // no growth in m
        }
    }
}
