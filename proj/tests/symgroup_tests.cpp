#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fbms/symgroup.hpp"

using namespace fbms;
using Eigen::Vector3d;

TEST_CASE("standard groups have the stated orders") {
    CHECK(sym::standard_group(sym::GroupKind::cyclic, 1).order() == 1);
    CHECK(sym::standard_group(sym::GroupKind::cyclic, 7).order() == 7);
    CHECK(sym::standard_group(sym::GroupKind::pyramidal, 5).order() == 10);
    CHECK(sym::standard_group(sym::GroupKind::prismatic, 8).order() == 32);
    CHECK(sym::standard_group(sym::GroupKind::antiprismatic, 3).order() == 12);
    CHECK_THROWS_AS(sym::standard_group(sym::GroupKind::prismatic, 0), std::invalid_argument);
}

TEST_CASE("closure is verified by exhaustive composition") {
    const auto grp = sym::standard_group(sym::GroupKind::antiprismatic, 3);
    for (const auto& a : grp.elements) {
        CHECK(a.is_orthogonal());
        CHECK(grp.contains(a.inverse()));
        for (const auto& b : grp.elements) CHECK(grp.contains(a * b));
    }
}

TEST_CASE("generate_group basics") {
    CHECK(sym::generate_group({sym::Isometry(Eigen::Matrix3d::Identity())}).order() == 1);
    CHECK(sym::generate_group({sym::rotation_z(2 * M_PI / 5)}).order() == 5);

    // the prismatic generators reproduce the standard element set
    const auto std_grp = sym::standard_group(sym::GroupKind::prismatic, 6);
    const auto gen_grp = sym::generate_group(
        {sym::rotation_z(2 * M_PI / 6), sym::reflection_vertical_plane(M_PI / 12),
         sym::reflection_z()});
    REQUIRE(gen_grp.order() == std_grp.order());
    for (const auto& g : gen_grp.elements) CHECK(std_grp.contains(g));
}

TEST_CASE("non-finite closure hits the cap") {
    CHECK_THROWS_AS(sym::generate_group({sym::rotation_z(1.0)}, 64), std::runtime_error);
}

TEST_CASE("elements preserve the unit ball") {
    std::mt19937 rng(0);
    std::normal_distribution<double> gauss;
    for (auto kind : {sym::GroupKind::pyramidal, sym::GroupKind::prismatic,
                      sym::GroupKind::antiprismatic}) {
        const auto grp = sym::standard_group(kind, 5);
        for (int trial = 0; trial < 20; ++trial) {
            const Vector3d p(gauss(rng), gauss(rng), gauss(rng));
            for (const auto& g : grp.elements) CHECK((g * p).norm() == doctest::Approx(p.norm()).epsilon(1e-12));
        }
    }
}

TEST_CASE("normal sign on flat discs") {
    auto up = [](const Vector3d&) { return Vector3d(0, 0, 1); };
    const Vector3d p(0.3, 0.1, 0.0);
    CHECK(sym::normal_sign(sym::rotation_z(2 * M_PI / 7), p, up) == 1);
    // reflection through {z=0} flips the upward normal of a disc through the origin
    CHECK(sym::normal_sign(sym::reflection_z(), p, up) == -1);

    auto horizontal = [](const Vector3d&) { return Vector3d(1, 0, 0); };
    CHECK_THROWS_AS(sym::normal_sign(sym::rotation_z(M_PI / 2), Vector3d(0, 0, 0.5), horizontal),
                    std::runtime_error);
}

TEST_CASE("empirical character is a homomorphism on the prismatic group") {
    const auto grp = sym::standard_group(sym::GroupKind::prismatic, 4);
    auto up = [](const Vector3d&) { return Vector3d(0, 0, 1); };
    const auto chi = sym::normal_character(grp, Vector3d(0.5, 0.2, 0.0), up);
    CHECK(chi.is_homomorphism(grp));
    bool has_minus = false;
    for (int v : chi.value) has_minus |= (v == -1);
    CHECK(has_minus);  // the z-reflection flips the vertical normal
}

namespace {
std::vector<Vector3d> orbit_points(const sym::SymmetryGroup& grp) {
    std::vector<Vector3d> pts;
    const Vector3d seed(0.42, 0.13, 0.37);
    for (const auto& g : grp.elements) {
        const Vector3d q = g * seed;
        bool found = false;
        for (const auto& p : pts) found |= (p - q).norm() < 1e-9;
        if (!found) pts.push_back(q);
    }
    return pts;
}
}  // namespace

TEST_CASE("equivariant projection") {
    const auto grp = sym::standard_group(sym::GroupKind::prismatic, 3);
    const auto pts = orbit_points(grp);
    const auto chi_triv = sym::trivial_character(grp);

    SUBCASE("constants are fixed") {
        std::vector<double> ones(pts.size(), 1.0);
        const auto proj = sym::project_equivariant(pts, ones, grp, chi_triv);
        for (double v : proj) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("odd function with even character is annihilated") {
        std::vector<double> odd;
        for (const auto& p : pts) odd.push_back(p.z());  // odd under the z-reflection
        const auto proj = sym::project_equivariant(pts, odd, grp, chi_triv);
        for (double v : proj) CHECK(std::abs(v) < 1e-13);
    }

    SUBCASE("projection is idempotent on random data") {
        std::mt19937 rng(1);
        std::normal_distribution<double> gauss;
        std::vector<double> vals;
        for (std::size_t i = 0; i < pts.size(); ++i) vals.push_back(gauss(rng));
        auto up = [](const Vector3d&) { return Vector3d(0, 0, 1); };
        const auto chi = sym::normal_character(grp, Vector3d(0.5, 0.2, 0.0), up);
        const auto once = sym::project_equivariant(pts, vals, grp, chi);
        const auto twice = sym::project_equivariant(pts, once, grp, chi);
        for (std::size_t i = 0; i < once.size(); ++i)
            CHECK(std::abs(once[i] - twice[i]) < 1e-12);
    }

    SUBCASE("missing orbit point is detected") {
        auto pts2 = pts;
        pts2.pop_back();
        std::vector<double> vals(pts2.size(), 0.5);
        CHECK_THROWS_AS(sym::project_equivariant(pts2, vals, grp, chi_triv), std::runtime_error);
    }

    SUBCASE("projection commutes with the twisted action") {
        std::mt19937 rng(4);
        std::normal_distribution<double> gauss;
        std::vector<double> vals;
        for (std::size_t i = 0; i < pts.size(); ++i) vals.push_back(gauss(rng));
        auto up = [](const Vector3d&) { return Vector3d(0, 0, 1); };
        const auto chi = sym::normal_character(grp, Vector3d(0.5, 0.2, 0.0), up);
        sym::OrbitIndex index(pts);
        for (int gi = 0; gi < grp.order(); ++gi) {
            // (g * f)(p) = chi(g) f(g^{-1} p)
            std::vector<double> gf(pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i)
                gf[i] = chi(gi) * vals[index.find(grp.elements[gi].inverse() * pts[i])];
            const auto lhs = sym::project_equivariant(pts, gf, grp, chi);
            const auto pf = sym::project_equivariant(pts, vals, grp, chi);
            std::vector<double> rhs(pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i)
                rhs[i] = chi(gi) * pf[index.find(grp.elements[gi].inverse() * pts[i])];
            for (std::size_t i = 0; i < pts.size(); ++i)
                CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
        }
    }
}
