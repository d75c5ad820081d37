#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "fbms/surface.hpp"
#include "fbms/symgroup.hpp"

namespace fbms::surf {

using Eigen::Vector3d;

// Largest angle (radians) between the outward conormal and the radial
// direction over the free boundary, evaluated from the layer charts.
inline double boundary_orthogonality_audit(const SurfaceMesh& mesh,
                                           const balance::DerivedParams& d, double probe = 1e-4) {
    double worst = 0.0;
    std::vector<LayerSpec> specs;
    for (int i = 1; i <= d.N; ++i) specs.push_back(layer_spec(i, d));
    // charts are evaluated in the base sector; angles are isometry-invariant
    for (const auto& v : mesh.vertices) {
        if (!v.boundary || !v.has_chart) continue;
        const LayerSpec& s = specs[v.layer - 1];
        Vector3d conormal, radial;
        if (v.region == Region::Catenoid) {
            // ribbon edge |vartheta| = pi/2: conormal along the vartheta lines
            // of the catenoid chart (the sigma probe is singular at the waist
            // corner where the edge meets the waist circle)
            const Bridge& b = (s.plus && s.plus->cat == v.catenoid) ? *s.plus : *s.minus;
            const double vsign = v.vartheta >= 0 ? 1.0 : -1.0;
            const double axis_th = (&b == &*s.plus) ? M_PI / (2.0 * s.m) : -M_PI / (2.0 * s.m);
            auto kpos = [&](double vt) {
                const double rr = b.tau * std::cosh(v.t);
                return detail::phi_raw(rr * std::cos(vt), axis_th + rr * std::sin(vt),
                                       b.hK + b.tau * v.t);
            };
            const Vector3d p0 = kpos(vsign * M_PI / 2);
            conormal = (p0 - kpos(vsign * (M_PI / 2 - probe))).normalized();
            radial = p0.normalized();
        } else {
            auto pos = [&](double sg) {
                return detail::phi_raw(sg, v.theta, height_local(s, sg, v.theta));
            };
            conormal = (pos(0.0) - pos(probe)).normalized();
            radial = pos(0.0).normalized();
        }
        const double c = std::clamp(conormal.dot(radial), -1.0, 1.0);
        worst = std::max(worst, std::acos(c));
    }
    return worst;
}

// One-sided Hausdorff distance of g(V) from V over every group element.
inline double symmetry_closure_audit(const SurfaceMesh& mesh, const sym::SymmetryGroup& grp,
                                     double lookup_tol = 1e-7) {
    std::vector<Vector3d> pts;
    pts.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) pts.push_back(v.pos);
    sym::OrbitIndex index(pts, lookup_tol);
    double worst = 0.0;
    for (const auto& g : grp.elements) {
        for (const auto& p : pts) {
            const Vector3d q = g * p;
            const int j = index.find(q);
            if (j < 0) return 1.0;  // grossly broken
            worst = std::max(worst, (pts[j] - q).norm());
        }
    }
    return worst;
}

namespace detail {

// Moeller-style triangle intersection with distances normalized to length
// units. Near-coplanar pairs closer than cop_rel * diameter are treated as
// non-crossing: the structured grids never produce overlapping coplanar
// triangles without shared vertices, while the unnormalized test reports
// false positives on thin nearly-flat neighbors.
inline bool tri_tri_intersect(const Vector3d& a0, const Vector3d& a1, const Vector3d& a2,
                              const Vector3d& b0, const Vector3d& b1, const Vector3d& b2,
                              double cop_rel = 1e-8) {
    const double diam =
        std::max({(a1 - a0).norm(), (a2 - a0).norm(), (b1 - b0).norm(), (b2 - b0).norm()});
    if (diam <= 0) return false;
    const double eps = 1e-12 * diam;
    const double cop_eps = cop_rel * diam;

    const Vector3d nb = (b1 - b0).cross(b2 - b0).normalized();
    const double da0 = nb.dot(a0 - b0), da1 = nb.dot(a1 - b0), da2 = nb.dot(a2 - b0);
    if ((da0 > eps && da1 > eps && da2 > eps) || (da0 < -eps && da1 < -eps && da2 < -eps))
        return false;
    const Vector3d na = (a1 - a0).cross(a2 - a0).normalized();
    const double db0 = na.dot(b0 - a0), db1 = na.dot(b1 - a0), db2 = na.dot(b2 - a0);
    if ((db0 > eps && db1 > eps && db2 > eps) || (db0 < -eps && db1 < -eps && db2 < -eps))
        return false;

    if (std::max({std::abs(da0), std::abs(da1), std::abs(da2)}) <= cop_eps ||
        std::max({std::abs(db0), std::abs(db1), std::abs(db2)}) <= cop_eps)
        return false;

    // interval overlap on the line of intersection
    const Vector3d dd = na.cross(nb);
    int axis = 0;
    const Vector3d ad = dd.cwiseAbs();
    if (ad[1] > ad[0]) axis = 1;
    if (ad[2] > ad[axis]) axis = 2;

    auto interval = [&](const Vector3d& p0, const Vector3d& p1, const Vector3d& p2, double d0,
                        double d1, double d2, double& lo, double& hi) {
        double ts[3];
        int n = 0;
        auto edge = [&](const Vector3d& pa, const Vector3d& pb, double fa, double fb) {
            if ((fa > 0 && fb > 0) || (fa < 0 && fb < 0)) return;
            if (std::abs(fa - fb) < 1e-300) return;
            const double t = fa / (fa - fb);
            if (n < 3) ts[n++] = (pa + t * (pb - pa))[axis];
        };
        edge(p0, p1, d0, d1);
        edge(p1, p2, d1, d2);
        edge(p2, p0, d2, d0);
        if (n < 2) {
            lo = 1;
            hi = 0;
            return;
        }
        lo = *std::min_element(ts, ts + n);
        hi = *std::max_element(ts, ts + n);
    };
    double lo1, hi1, lo2, hi2;
    interval(a0, a1, a2, da0, da1, da2, lo1, hi1);
    interval(b0, b1, b2, db0, db1, db2, lo2, hi2);
    const double margin = 1e-10 * diam;
    return hi1 > lo2 + margin && hi2 > lo1 + margin;
}

}  // namespace detail

// Broad-phase + exact test for non-adjacent triangle pairs; returns the
// number of intersecting pairs found (0 for an embedded mesh).
inline long self_intersection_count(const SurfaceMesh& mesh) {
    const auto& V = mesh.vertices;
    const auto& F = mesh.faces;

    double mean_edge = 0;
    for (const auto& f : F) mean_edge += (V[f[0]].pos - V[f[1]].pos).norm();
    mean_edge /= std::max<std::size_t>(1, F.size());
    const double cell = std::max(mean_edge, 1e-8);

    auto key = [](long x, long y, long z) {
        return (static_cast<std::uint64_t>(x) * 73856093u) ^
               (static_cast<std::uint64_t>(y) * 19349663u) ^
               (static_cast<std::uint64_t>(z) * 83492791u);
    };
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    std::vector<Eigen::AlignedBox3d> boxes(F.size());
    for (int f = 0; f < static_cast<int>(F.size()); ++f) {
        Eigen::AlignedBox3d b;
        for (int k = 0; k < 3; ++k) b.extend(V[F[f][k]].pos);
        boxes[f] = b;
        const Vector3d lo = b.min(), hi = b.max();
        for (long x = static_cast<long>(std::floor(lo.x() / cell));
             x <= static_cast<long>(std::floor(hi.x() / cell)); ++x)
            for (long y = static_cast<long>(std::floor(lo.y() / cell));
                 y <= static_cast<long>(std::floor(hi.y() / cell)); ++y)
                for (long z = static_cast<long>(std::floor(lo.z() / cell));
                     z <= static_cast<long>(std::floor(hi.z() / cell)); ++z)
                    grid[key(x, y, z)].push_back(f);
    }

    long hits = 0;
    std::vector<int> last_checked(F.size(), -1);
    for (const auto& [k, bucket] : grid) {
        for (std::size_t a = 0; a < bucket.size(); ++a)
            for (std::size_t b = a + 1; b < bucket.size(); ++b) {
                int fa = bucket[a], fb = bucket[b];
                if (fa > fb) std::swap(fa, fb);
                if (last_checked[fa] == fb) continue;
                last_checked[fa] = fb;
                if (!boxes[fa].intersects(boxes[fb])) continue;
                bool shared = false;
                for (int i = 0; i < 3 && !shared; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (F[fa][i] == F[fb][j]) {
                            shared = true;
                            break;
                        }
                if (shared) continue;
                if (detail::tri_tri_intersect(V[F[fa][0]].pos, V[F[fa][1]].pos, V[F[fa][2]].pos,
                                              V[F[fb][0]].pos, V[F[fb][1]].pos, V[F[fb][2]].pos))
                    ++hits;
            }
    }
    return hits;
}

// Relative mismatch of rho across label seams: at every vertex of an edge
// whose incident faces carry different labels, rho is re-evaluated through
// the charts of both adjacent layers and compared.
inline double rho_seam_audit(const SurfaceMesh& mesh, const balance::DerivedParams& d) {
    std::vector<LayerSpec> specs;
    for (int i = 1; i <= d.N; ++i) specs.push_back(layer_spec(i, d));
    const double period = 2.0 * M_PI / mesh.m;
    const double half = M_PI / (2.0 * mesh.m);

    auto rho_via_layer = [&](const Vector3d& pos, int layer) {
        const auto c = phi_inverse(pos);
        double th = std::remainder(c.theta - specs[layer - 1].beta, period);
        if (th > half) th = period / 2 - th;
        if (th < -half) th = -period / 2 - th;
        return rho_from_chart(specs[layer - 1], c.sigma, th);
    };

    double worst = 0.0;
    for (const auto& e : mesh.edges()) {
        if (e.f1 < 0) continue;
        const int la = mesh.face_layer[e.f0], lb = mesh.face_layer[e.f1];
        if (la == lb) continue;
        for (int v : {e.v0, e.v1}) {
            const double ra = rho_via_layer(mesh.vertices[v].pos, la);
            const double rb = rho_via_layer(mesh.vertices[v].pos, lb);
            worst = std::max(worst, std::abs(ra - rb) / std::max(ra, rb));
        }
    }
    return worst;
}

}  // namespace fbms::surf
