#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "fbms/mesh_audit.hpp"
#include "fbms/mesh_io.hpp"
#include "fbms/surface.hpp"
#include "fbms/symgroup.hpp"

using namespace fbms;
using Eigen::Vector3d;

TEST_CASE("phi map and its inverse") {
    CHECK((surf::phi_map(0, 0, 0) - Vector3d(1, 0, 0)).norm() < 1e-15);
    CHECK((surf::phi_map(1.0 / 3, 0, 0) - Vector3d(2.0 / 3, 0, 0)).norm() < 1e-15);
    CHECK_THROWS_AS(surf::phi_map(0.5, 0, 0), std::domain_error);
    CHECK_THROWS_AS(surf::phi_map(0.1, 0, 1.0), std::domain_error);

    std::mt19937 rng(0);
    std::uniform_real_distribution<double> us(0, 1.0 / 3), ut(-M_PI + 1e-6, M_PI),
        uw(-M_PI / 4, M_PI / 4);
    for (int i = 0; i < 10000; ++i) {
        const double s = us(rng), t = ut(rng), w = uw(rng);
        const auto c = surf::phi_inverse(surf::phi_map(s, t, w));
        CHECK(std::abs(c.sigma - s) < 1e-12);
        CHECK(std::abs(c.theta - t) < 1e-12);
        CHECK(std::abs(c.omega - w) < 1e-12);
    }
}

TEST_CASE("cutoff profile") {
    CHECK(surf::cutoff(0.5) == 1.0);
    CHECK(surf::cutoff(1.0) == 1.0);
    CHECK(surf::cutoff(2.0) == 0.0);
    CHECK(surf::cutoff(3.0) == 0.0);
    const double mid = surf::cutoff(1.5);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    for (double x = 1.05; x < 1.9; x += 0.05) CHECK(surf::cutoff(x) > surf::cutoff(x + 0.05));
    // smooth at the plateau edges: one-sided derivatives vanish
    CHECK(std::abs(fbms::deriv1([](double x) { return surf::cutoff(x); }, 1.0 - 1e-4, 1e-5)) <
          1e-8);
    CHECK(std::abs((surf::cutoff(2.0) - surf::cutoff(2.0 - 1e-5)) / 1e-5) < 1e-8);
    CHECK(std::isfinite(fbms::deriv2([](double x) { return surf::cutoff(x); }, 1.5, 1e-4)));
}

TEST_CASE("height function limits") {
    const auto p = balance::StackingParams::make(2, 10);
    const auto d = balance::derived_parameters(p);
    const int m = 10;
    const double half = M_PI / (2 * m);

    // far from the boundary only the disc profile survives
    const double w_far = surf::height_function(1, 1.0 / 3, 0.0, d);
    CHECK(w_far == doctest::Approx(std::asin(d.hB[0] / (2.0 / 3))).epsilon(1e-14));

    // the waist circle sits at the catenoid center height
    const double w_waist = surf::height_function(1, 0.0, half - d.tau[0], d);
    CHECK(w_waist == doctest::Approx(d.hK[0]).epsilon(1e-13));

    // mid-blend point: between the disc profile and the pure catenoid value
    const double sg = 1.5 / m, th = M_PI / (4 * m);
    const double w_mid = surf::height_function(1, sg, th, d);
    const double wB = std::asin(d.hB[0] / (1 - sg));
    const double r = std::hypot(sg, th - half);
    const double wK = d.hK[0] - d.tau[0] * std::acosh(r / d.tau[0]);
    CHECK(w_mid >= std::min(wB, wK) - 1e-15);
    CHECK(w_mid <= std::max(wB, wK) + 1e-15);

    // perforation is a domain error naming the side
    CHECK_THROWS_WITH_AS(surf::height_function(1, 0.0, half - 0.5 * d.tau[0], d),
                         doctest::Contains("perforation"), std::domain_error);
}

TEST_CASE("kappa chart and varpi projection") {
    const auto d = balance::derived_parameters(balance::StackingParams::make(3, 12));
    // waist point lies at chart distance tau_1 from the axis point
    const auto c = surf::phi_inverse(surf::kappa_chart(1, 0.0, 0.0, d));
    const double dist = std::hypot(c.sigma - 0.0, c.theta - M_PI / (2.0 * 12));
    CHECK(dist == doctest::Approx(d.tau[0]).epsilon(1e-10));
    CHECK(c.omega == doctest::Approx(d.hK[0]).epsilon(1e-12));

    // varpi: identity on the core and on {z=0}
    CHECK((surf::varpi_chart(20, Vector3d(0.5, 0, 0.2)) - Vector3d(0.5, 0, 0)).norm() < 1e-14);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> uxy(-0.7, 0.7);
    for (int i = 0; i < 1000; ++i) {
        const Vector3d q(uxy(rng), uxy(rng), 0.0);
        CHECK((surf::varpi_chart(15, q) - q).norm() < 1e-14);
    }
    // near the sphere it collapses omega: varpi(Phi(s,t,w)) = Phi(s,t,0)
    for (int i = 0; i < 200; ++i) {
        std::uniform_real_distribution<double> us(0, 4.0 / 15), uw(-0.3, 0.3);
        const double s = us(rng), t = uxy(rng), w = uw(rng);
        const Vector3d p = surf::phi_map(s, t, w);
        if (std::hypot(p.x(), p.y()) < 1 - 5.0 / 15) continue;
        CHECK((surf::varpi_chart(15, p) - surf::phi_map(s, t, 0)).norm() < 1e-12);
    }
}

namespace {
surf::SurfaceMesh make_mesh(int N, int m, double res) {
    return surf::assemble_surface(balance::StackingParams::make(N, m), res);
}
}  // namespace

TEST_CASE("mesh construction invariants at (2,10)") {
    const auto mesh = make_mesh(2, 10, 0.03);
    CHECK(mesh.vertices.size() > 1000);

    int boundary_count = 0;
    for (const auto& v : mesh.vertices) {
        CHECK(v.pos.norm() <= 1.0 + 1e-9);
        if (v.boundary) {
            ++boundary_count;
            CHECK(std::abs(v.pos.norm() - 1.0) <= 1e-9);
        }
        CHECK(v.normal.norm() == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(boundary_count > 0);

    // manifold edges: every edge bounds one or two faces, consistently oriented
    int open_edges = 0;
    for (const auto& e : mesh.edges()) {
        if (e.f1 < 0) {
            ++open_edges;
            continue;
        }
        auto dir = [&](int f) {
            for (int k = 0; k < 3; ++k) {
                if (mesh.faces[f][k] == e.v0 && mesh.faces[f][(k + 1) % 3] == e.v1) return 1;
                if (mesh.faces[f][k] == e.v1 && mesh.faces[f][(k + 1) % 3] == e.v0) return -1;
            }
            return 0;
        };
        CHECK(dir(e.f0) * dir(e.f1) == -1);
    }
    CHECK(open_edges > 0);  // the free boundary

    // region labels: catenoid ribbons of level 1 at m meridians
    std::set<std::pair<int, int>> ribbons;
    bool has_flat = false, has_graph = false, has_inter = false;
    for (const auto& v : mesh.vertices) {
        if (v.region == surf::Region::Catenoid) ribbons.insert({v.catenoid, v.meridian});
        has_flat |= v.region == surf::Region::FlatDisc;
        has_graph |= v.region == surf::Region::DiscGraph;
        has_inter |= v.region == surf::Region::Intermediate;
    }
    CHECK(ribbons.size() == 10);
    CHECK(has_flat);
    CHECK(has_graph);
    CHECK(has_inter);

    // the adjoined disc ends exactly at radius (2/3) sqrt(1 - (3 hB/2)^2),
    // where the graph rim (sigma = 1/3) continues it
    const auto d = balance::derived_parameters(balance::StackingParams::make(2, 10));
    const double rd = (2.0 / 3) * std::sqrt(1 - std::pow(3 * d.hB[0] / 2, 2));
    double rim_lo = 1, rim_hi = 0, flat_hi = 0;
    for (const auto& v : mesh.vertices) {
        if (v.layer != 1) continue;
        const double r = std::hypot(v.pos.x(), v.pos.y());
        if (v.has_chart && v.sigma == surf::kSigmaMax) {
            rim_lo = std::min(rim_lo, r);
            rim_hi = std::max(rim_hi, r);
        }
        if (v.region == surf::Region::FlatDisc) flat_hi = std::max(flat_hi, r);
    }
    CHECK(rim_lo == doctest::Approx(rd).epsilon(1e-12));
    CHECK(rim_hi == doctest::Approx(rd).epsilon(1e-12));
    CHECK(flat_hi < rd);
    CHECK(flat_hi > rd - 3 * mesh.resolution);
}

TEST_CASE("rho weight on the mesh") {
    const auto d = balance::derived_parameters(balance::StackingParams::make(2, 10));
    const auto mesh = make_mesh(2, 10, 0.03);
    double waist_rho = 0;
    for (const auto& v : mesh.vertices) {
        if (v.region == surf::Region::Catenoid && std::abs(v.t) < 1e-12)
            waist_rho = std::max(waist_rho, v.rho);
        if (v.region == surf::Region::FlatDisc) CHECK(v.rho == 10.0);
    }
    CHECK(waist_rho == doctest::Approx(1.0 / d.tau[0]).epsilon(1e-10));
    CHECK(surf::rho_seam_audit(mesh, d) < 0.05);
}

TEST_CASE("adjacent layers alternate catenoid meridians at (3,8)") {
    const auto mesh = make_mesh(3, 8, 0.04);
    std::set<int> mer1, mer2;
    for (const auto& v : mesh.vertices) {
        if (v.region != surf::Region::Catenoid) continue;
        (v.catenoid == 1 ? mer1 : mer2).insert(v.meridian);
    }
    CHECK(mer1.size() == 8);
    CHECK(mer2.size() == 8);
    for (int mm : mer1) CHECK(mm % 2 == 0);
    for (int mm : mer2) CHECK(mm % 2 == 1);  // offset by pi/m from level 1
}

TEST_CASE("(4,8) carries 24 labeled ribbons") {
    const auto mesh = make_mesh(4, 8, 0.04);
    std::set<std::pair<int, int>> ribbons;
    for (const auto& v : mesh.vertices)
        if (v.region == surf::Region::Catenoid) ribbons.insert({v.catenoid, v.meridian});
    CHECK(ribbons.size() == 24);
}

TEST_CASE("boundary conormals are radial") {
    const auto d = balance::derived_parameters(balance::StackingParams::make(2, 10));
    const auto mesh = make_mesh(2, 10, 0.03);
    CHECK(surf::boundary_orthogonality_audit(mesh, d) < 1e-3);
}

TEST_CASE("group closure of the vertex set") {
    {
        const auto mesh = make_mesh(2, 10, 0.04);
        const auto grp = sym::standard_group(sym::GroupKind::prismatic, 10);
        CHECK(surf::symmetry_closure_audit(mesh, grp) < 1e-9);
    }
    {
        const auto mesh = make_mesh(3, 8, 0.04);
        const auto grp = sym::standard_group(sym::GroupKind::antiprismatic, 8);
        CHECK(surf::symmetry_closure_audit(mesh, grp) < 1e-9);
    }
}

TEST_CASE("normal sign across the antiprismatic action is consistent") {
    const auto mesh = make_mesh(3, 8, 0.04);
    std::vector<Vector3d> pts;
    for (const auto& v : mesh.vertices) pts.push_back(v.pos);
    sym::OrbitIndex index(pts, 1e-7);
    const auto rot_pi = sym::rotation_x_pi();
    int sign = 0;
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pts.size()) - 1);
    for (int trial = 0; trial < 100; ++trial) {
        const int i = pick(rng);
        const int j = index.find(rot_pi * pts[i]);
        REQUIRE(j >= 0);
        const double dot = (rot_pi * mesh.vertices[i].normal).dot(mesh.vertices[j].normal);
        if (std::abs(dot) < 0.5) continue;  // skip near-tangential weld ambiguity
        const int s = dot > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        CHECK(s == sign);
    }
    CHECK(sign != 0);
}

TEST_CASE("no self intersections on the validated grid") {
    CHECK(surf::self_intersection_count(make_mesh(2, 10, 0.04)) == 0);
    CHECK(surf::self_intersection_count(make_mesh(3, 8, 0.05)) == 0);
}

TEST_CASE("cokernel bump w_i") {
    const int m = 12;
    const auto mesh = make_mesh(2, m, 0.03);
    const auto w1 = surf::cokernel_w(1, mesh);
    const auto w2 = surf::cokernel_w(2, mesh);
    double at_band = 0;
    bool off_band_clean = true;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const auto& v = mesh.vertices[k];
        if (v.layer != 1 || !v.has_chart) continue;
        if (std::abs(v.sigma - 3.0 / m) < 0.2 / m) at_band = std::max(at_band, w1[k]);
        if (v.sigma < 1.2 / m) off_band_clean &= std::abs(w1[k]) < 1e-15;
    }
    CHECK(at_band == 1.0);  // (-1)^{i-1} = +1 on layer 1
    CHECK(off_band_clean);  // vanishes at sigma = 1/m
    double w2_sign = 0;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k)
        if (mesh.vertices[k].layer == 2 && std::abs(w2[k]) > 0.5) w2_sign = w2[k];
    CHECK(w2_sign < 0);  // (-1)^{i-1} = -1 on layer 2

    // V . w with V mirror-odd is a fixed point of the equivariant projection
    // under the full group, with the character read off the mesh normals
    std::vector<Vector3d> pts;
    std::vector<double> f;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        pts.push_back(mesh.vertices[k].pos);
        f.push_back(1.0 * w1[k] + (-1.0) * w2[k]);  // V = (1,-1)
    }
    const auto grp = sym::standard_group(sym::GroupKind::prismatic, m);
    const sym::OrbitIndex index(pts, 1e-7);
    auto mesh_normal = [&](const Vector3d& q) {
        const int j = index.find(q);
        REQUIRE(j >= 0);
        return mesh.vertices[j].normal;
    };
    int flat_sample = -1;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k)
        if (mesh.vertices[k].region == surf::Region::FlatDisc &&
            mesh.vertices[k].pos.head<2>().norm() > 0.3)
            flat_sample = static_cast<int>(k);
    REQUIRE(flat_sample >= 0);
    const auto chi = sym::normal_character(grp, pts[flat_sample], mesh_normal);
    CHECK(chi.is_homomorphism(grp));
    const auto proj = sym::project_equivariant(pts, f, grp, chi, 1e-7);
    double max_dev = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        max_dev = std::max(max_dev, std::abs(proj[k] - f[k]));
    CHECK(max_dev < 1e-10);
}

TEST_CASE("cokernel wbar lives in the outer band") {
    const int m = 12;
    const auto mesh = make_mesh(3, m, 0.04);
    const auto wb = surf::cokernel_wbar(2, mesh);
    double interior = 0, outer = 0;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const auto& v = mesh.vertices[k];
        if (v.layer != 2) {
            CHECK(wb[k] == 0.0);
            continue;
        }
        const double R = std::hypot(v.pos.x(), v.pos.y());
        if (R < 1 - 3.0 / m) interior = std::max(interior, std::abs(wb[k]));
        else outer = std::max(outer, std::abs(wb[k]));
    }
    CHECK(interior == 0.0);
    CHECK(outer > 0.0);
}

TEST_CASE("vbar_hat is prescribed on the fundamental sector") {
    const int m = 14;
    const double half = M_PI / (2 * m);
    for (double sg : {0.01 / m, 0.5 / m, 1.5 / m}) {
        for (double th : {-half, -half / 2, 0.0, half / 3, half}) {
            const Vector3d q = surf::phi_map(sg, th, 0.0);
            const double psig = surf::cutoff(m * sg);
            const double psip = surf::cutoff(4 * m / M_PI * std::abs(th - half));
            const double psim = surf::cutoff(4 * m / M_PI * std::abs(th + half));
            CHECK(surf::vbar_hat(m, q.x(), q.y()) ==
                  doctest::Approx(psig * (psip - psim)).epsilon(1e-12));
        }
    }
    // pyr_m-invariance: rotation by 2 pi/m and the mirror fold agree
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ur(1 - 2.2 / m, 1.0), uphi(-M_PI, M_PI);
    for (int i = 0; i < 500; ++i) {
        const double R = ur(rng), phi = uphi(rng);
        const double v0 = surf::vbar_hat(m, R * std::cos(phi), R * std::sin(phi));
        const double v1 = surf::vbar_hat(m, R * std::cos(phi + 2 * M_PI / m),
                                         R * std::sin(phi + 2 * M_PI / m));
        const double phim = 2 * (M_PI / (2 * m)) - phi;  // mirror at theta = pi/2m
        const double v2 = surf::vbar_hat(m, R * std::cos(phim), R * std::sin(phim));
        CHECK(v0 == doctest::Approx(v1).epsilon(1e-12));
        CHECK(v0 == doctest::Approx(v2).epsilon(1e-12));
    }
}

TEST_CASE("obj export round trip") {
    const auto mesh = make_mesh(2, 10, 0.05);
    const std::string path = "/tmp/fbms_test_mesh.obj";
    surf::export_obj(mesh, path);
    const auto st = surf::import_obj_stats(path);
    CHECK(st.vertices == mesh.vertices.size());
    CHECK(st.normals == mesh.vertices.size());
    CHECK(st.faces == mesh.faces.size());

    surf::SurfaceMesh empty;
    CHECK_THROWS_AS(surf::export_obj(empty, "/tmp/fbms_empty.obj"), std::invalid_argument);

    surf::export_labels(mesh, "/tmp/fbms_test_mesh.json");
}

TEST_CASE("resolution guardrails") {
    CHECK_THROWS_AS(make_mesh(2, 10, 0.2), std::invalid_argument);
}
