#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fbms/numerics.hpp"
#include "fbms/surface.hpp"

namespace fbms::geom {

using balance::DerivedParams;
using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

struct FundamentalForms {
    Matrix2d g = Matrix2d::Identity();   // induced metric in chart coordinates
    Matrix2d A = Matrix2d::Zero();       // scalar second fundamental form
    Vector3d nu = Vector3d::Zero();      // unit normal (chart-target components)
    double H = 0;                        // tr(g^{-1} A)
    double normA2 = 0;                   // tr((g^{-1} A)^2)

    void finalize() {
        const Matrix2d gi = g.inverse();
        const Matrix2d S = gi * A;
        H = S.trace();
        normA2 = (S * S).trace();
    }
};

// Ambient metric of the Phi coordinates (sigma, theta, omega).
inline Matrix3d metric_phi(const Vector3d& x) {
    const double f = 1.0 - x[0];
    Matrix3d g = Matrix3d::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = f * f * std::cos(x[2]) * std::cos(x[2]);
    g(2, 2) = f * f;
    return g;
}

inline Matrix3d metric_euclidean(const Vector3d&) { return Matrix3d::Identity(); }

using Chart = std::function<Vector3d(double, double)>;
using AmbientMetric = std::function<Matrix3d(const Vector3d&)>;

// Fundamental forms by the normal-field method: the normal is the metric
// cross product of the coordinate fields and
//   -2|nu| A(V,W) = (nu g)(V phi, W phi) + g(V phi, W nu) + g(W phi, V nu),
// everything evaluated with central differences at step fd_step.
inline FundamentalForms forms_generic(const Chart& chart, const AmbientMetric& ambient, double u,
                                      double v, double fd_step, double orient = 1.0) {
    const double h = fd_step;
    // two-level Richardson central difference, O(h^6): the differenced normal
    // field is differenced again, so the rounding floor goes like eps/h^2 and
    // a larger step with higher order wins decisively
    auto rderiv = [&](const std::function<Vector3d(double)>& f, double x0) {
        auto cd = [&](double hh) { return Vector3d((f(x0 + hh) - f(x0 - hh)) / (2 * hh)); };
        const Vector3d d1 = cd(h), d2 = cd(h / 2), d3 = cd(h / 4);
        const Vector3d r1 = (4.0 * d2 - d1) / 3.0;
        const Vector3d r2 = (4.0 * d3 - d2) / 3.0;
        return Vector3d((16.0 * r2 - r1) / 15.0);
    };
    auto nu_raw = [&](double uu, double vv) -> Vector3d {
        const Vector3d du = rderiv([&](double x0) { return chart(x0, vv); }, uu);
        const Vector3d dv = rderiv([&](double x0) { return chart(uu, x0); }, vv);
        return ambient(chart(uu, vv)).inverse() * du.cross(dv);
    };

    const Vector3d x = chart(u, v);
    const Matrix3d g = ambient(x);
    const Vector3d du = rderiv([&](double x0) { return chart(x0, v); }, u);
    const Vector3d dv = rderiv([&](double x0) { return chart(u, x0); }, v);
    if (du.cross(dv).norm() < 1e-14)
        throw std::runtime_error("forms_generic: chart fails to be an immersion at the point");

    const Vector3d nu = orient * nu_raw(u, v);
    const double nu_len = std::sqrt(nu.dot(g * nu));

    // directional derivative of the metric along nu
    Matrix3d nug = Matrix3d::Zero();
    {
        const Vector3d n_unit = nu / nu.norm();  // any scaling works with matching 1/length
        auto cd = [&](double hh) {
            return Matrix3d((ambient(x + hh * n_unit) - ambient(x - hh * n_unit)) / (2 * hh));
        };
        const Matrix3d d1 = cd(h), d2 = cd(h / 2), d3 = cd(h / 4);
        const Matrix3d r1 = (4.0 * d2 - d1) / 3.0;
        const Matrix3d r2 = (4.0 * d3 - d2) / 3.0;
        nug = (16.0 * r2 - r1) / 15.0 * nu.norm();
    }
    const Vector3d dnu_u = orient * rderiv([&](double x0) { return nu_raw(x0, v); }, u);
    const Vector3d dnu_v = orient * rderiv([&](double x0) { return nu_raw(u, x0); }, v);

    auto entry = [&](const Vector3d& a, const Vector3d& b, const Vector3d& dna,
                     const Vector3d& dnb) {
        return -(a.dot(nug * b) + a.dot(g * dnb) + b.dot(g * dna)) / (2.0 * nu_len);
    };

    FundamentalForms f;
    f.g(0, 0) = du.dot(g * du);
    f.g(0, 1) = f.g(1, 0) = du.dot(g * dv);
    f.g(1, 1) = dv.dot(g * dv);
    f.A(0, 0) = entry(du, du, dnu_u, dnu_u);
    f.A(0, 1) = f.A(1, 0) = entry(du, dv, dnu_u, dnu_v);
    f.A(1, 1) = entry(dv, dv, dnu_v, dnu_v);
    f.nu = nu / nu_len;
    f.finalize();
    return f;
}

struct CatenoidForms : FundamentalForms {
    double metric_residual = 0;   // || r^{-2} kappa* g - (dt^2 + dth^2) ||_F
    double normA2_residual = 0;   // rho^{-2} |A|^2 - 2 sech^2 t
};

// Closed-form metric and second fundamental form of the catenoidal pieces in
// (t, vartheta) coordinates.
inline CatenoidForms forms_catenoid(int i, double t, double vt, const DerivedParams& d) {
    if (i < 1 || i > d.N - 1) throw std::invalid_argument("forms_catenoid: ribbon out of range");
    const double tau = d.tau[i - 1];
    const double hK = d.hK[i - 1];
    const double r = tau * std::cosh(t);
    const double si = r * std::cos(vt);
    const double om = hK + tau * t;
    const double sech = 1.0 / std::cosh(t);
    const double tnh = std::tanh(t);
    const double snh = std::sinh(t);
    const double csh = std::cosh(t);
    const double cv = std::cos(vt), sv = std::sin(vt);
    const double s2v = std::sin(2 * vt);
    const double co = std::cos(om), so = std::sin(om);
    const double one = 1.0 - si;

    CatenoidForms f;
    const double M = si * (2.0 - si) * co * co + so * so;
    Matrix2d gm;  // r^{-2} kappa* g
    gm(0, 0) = 1.0 - si * (2.0 - si) * sech * sech - M * tnh * tnh * sv * sv;
    gm(0, 1) = gm(1, 0) = -0.5 * M * tnh * s2v;
    gm(1, 1) = 1.0 - M * cv * cv;
    f.metric_residual = (gm - Matrix2d::Identity()).norm();
    f.g = r * r * gm;

    const double nu_len =
        std::sqrt(1.0 + sech * sech * (so / co) * (so / co) * sv * sv -
                  si * (2.0 - si) * sech * sech * cv * cv);

    const double Btt = one + 2.0 * tau * snh * tnh * cv * cv * cv -
                       2.0 * tau * one * (so / co) * tnh * sv * sv +
                       tau * one * one * co * co * snh * tnh * sv * sv * cv +
                       tau * one * one * sech * cv - tau * one * so * co * snh * snh * tnh * sv * sv;
    const double Btv = tau * one * one * co * co * snh * s2v * cv - 2.0 * tau * snh * s2v * cv -
                       tau * one * (so / co) * (co * co * snh * snh + 1.0) * s2v;
    const double Bvv = (si - 1.0) + 2.0 * tau * csh * sv * sv * cv +
                       tau * one * one * co * co * csh * cv * cv * cv -
                       tau * one * so * co * snh * csh * cv * cv;

    const double sign = (i % 2 == 1) ? 1.0 : -1.0;
    const double scale = sign * tau / nu_len;
    f.A(0, 0) = scale * Btt;
    f.A(0, 1) = f.A(1, 0) = scale * 0.5 * Btv;
    f.A(1, 1) = scale * Bvv;
    f.finalize();
    f.normA2_residual = r * r * f.normA2 - 2.0 * sech * sech;

    const Vector3d nphi = surf::detail::catenoid_normal_phi(tau, hK, t, vt);
    const double axis = (i % 2 == 1 ? 1.0 : -1.0) * M_PI / (2.0 * d.m);
    f.nu = sign * surf::detail::push_phi_vector(si, axis + r * sv, om, nphi).normalized();
    return f;
}

// Closed-form evaluation on the graph regions in (sigma, theta) coordinates,
// with height derivatives by Richardson-extrapolated central differences.
inline FundamentalForms forms_disc_graph(int i, double sigma, double theta,
                                         const DerivedParams& d, double fd_step = 1e-4) {
    const surf::LayerSpec s = surf::layer_spec(i, d);
    auto hfun = [&](double sg, double th) { return surf::height_local(s, sg, th); };
    const double h = hfun(sigma, theta);
    const double h_s = fbms::deriv1([&](double sg) { return hfun(sg, theta); }, sigma, fd_step);
    const double h_t = fbms::deriv1([&](double th) { return hfun(sigma, th); }, theta, fd_step);
    const double h_ss = fbms::deriv2([&](double sg) { return hfun(sg, theta); }, sigma, fd_step);
    const double h_tt = fbms::deriv2([&](double th) { return hfun(sigma, th); }, theta, fd_step);
    const double h_st = fbms::deriv1(
        [&](double sg) {
            return fbms::deriv1([&](double th) { return hfun(sg, th); }, theta, fd_step);
        },
        sigma, fd_step);

    const double one = 1.0 - sigma;
    const double ch = std::cos(h), sh2 = std::sin(2.0 * h), th_h = std::tan(h);

    FundamentalForms f;
    f.g(0, 0) = 1.0 + one * one * h_s * h_s;
    f.g(0, 1) = f.g(1, 0) = one * one * h_s * h_t;
    f.g(1, 1) = one * one * ch * ch + one * one * h_t * h_t;

    const double nu_len = std::sqrt(1.0 + h_s * h_s + h_t * h_t -
                                    sigma * (2.0 - sigma) * h_s * h_s + h_t * h_t * th_h * th_h);

    const double Bss = (sigma - 1.0) * h_ss + 2.0 * h_s + one * one * h_s * h_s * h_s;
    const double Bst =
        2.0 * ((sigma - 1.0) * h_st + one * one * h_s * h_s * h_t - one * h_s * h_t * th_h);
    const double Btt = (sigma - 1.0) * h_tt + one * one * h_s * ch * ch - 0.5 * one * sh2 -
                       2.0 * one * h_t * h_t * th_h + one * one * h_s * h_t * h_t;

    const double sign = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^i
    f.A(0, 0) = sign / nu_len * Bss;
    f.A(0, 1) = f.A(1, 0) = sign / nu_len * 0.5 * Bst;
    f.A(1, 1) = sign / nu_len * Btt;
    f.finalize();

    const Vector3d nphi(one * h_s, h_t / (one * ch * ch), -1.0 / one);
    f.nu = sign * surf::detail::push_phi_vector(sigma, theta, h, nphi).normalized();
    return f;
}

// Generic-oracle evaluation on the catenoid chart, oriented to match the
// global normal convention: the metric cross product of the chart fields is
// opposite to the paper's catenoid normal, so the sign is (-1)^i.
// Differencing is done in coordinates rescaled by the radius at the
// evaluation point (chart/r0 with metric r0^2 g(r0 x), an exact isometry):
// the local scale of the ribbon runs from tau at the waist to 1/(2m) at the
// ends, and without the rescale the second-derivative differences drown in
// cancellation noise wherever the coordinates dwarf the local feature size.
// The step default reflects the unit feature scale of (t, vartheta).
inline FundamentalForms forms_generic_catenoid(int i, double t, double vt,
                                               const DerivedParams& d, double fd_step = 3e-2) {
    const double tau = d.tau[i - 1];
    const double hK = d.hK[i - 1];
    const double r0 = tau * std::cosh(t);
    Chart chart = [=](double tt, double vv) {
        const double rr = tau * std::cosh(tt) / r0;
        return Vector3d(rr * std::cos(vv), rr * std::sin(vv), (hK + tau * tt) / r0);
    };
    AmbientMetric ambient = [=](const Vector3d& x) -> Matrix3d {
        return r0 * r0 * metric_phi(r0 * x);
    };
    const double orient = (i % 2 == 0) ? 1.0 : -1.0;
    return forms_generic(chart, ambient, t, vt, fd_step, orient);
}

// Generic-oracle evaluation on a layer graph chart; the cross product points
// along graph-up, so the global sign is (-1)^{i-1}.
inline FundamentalForms forms_generic_graph(int i, double sigma, double theta,
                                            const DerivedParams& d, double fd_step = 1e-4) {
    const surf::LayerSpec s = surf::layer_spec(i, d);
    Chart chart = [=](double sg, double th) {
        return Vector3d(sg, th, surf::height_local(s, sg, th));
    };
    const double orient = (i % 2 == 1) ? 1.0 : -1.0;
    return forms_generic(chart, metric_phi, sigma, theta, fd_step, orient);
}

// sup over the ribbons of rho^{-1}|H| and of the |A|^2 model residual,
// sampled on (t, vartheta) chart grids.
struct CatenoidSup {
    double rho1H = 0;       // sup tau cosh t |H|
    double normA2_dev = 0;  // sup | rho^{-2}|A|^2 - 2 sech^2 t |
};

inline CatenoidSup catenoid_region_sup(const DerivedParams& d, int nt = 160, int nv = 24) {
    CatenoidSup sup;
    for (int i = 1; i <= d.N - 1; ++i) {
        const double a = d.a[i - 1];
        if (a <= 0) continue;
        for (int jt = 0; jt <= nt; ++jt)
            for (int jv = 0; jv <= nv; ++jv) {
                const double t = -a + 2.0 * a * jt / nt;
                const double vt = -M_PI / 2 + M_PI * jv / nv;
                const auto f = forms_catenoid(i, t, vt, d);
                const double rho = 1.0 / (d.tau[i - 1] * std::cosh(t));
                sup.rho1H = std::max(sup.rho1H, std::abs(f.H) / rho);
                sup.normA2_dev = std::max(sup.normA2_dev, std::abs(f.normA2_residual));
            }
    }
    return sup;
}

struct MeanCurvatureReport {
    std::vector<double> H;                  // per vertex, global orientation
    double sup_cat_rho1H = 0;               // sup over catenoid regions of rho^{-1}|H|
    double sup_cat_rho2H = 0;               // sup over catenoid regions of rho^{-2}|H|
    double sup_disc_weighted = 0;           // sup over graph regions of |rho^{-2} H|
    double sup_disc_residual = 0;           // same after subtracting disloc_i wbar_i
};

// Region-appropriate mean curvature over the mesh plus the weighted sups used
// by the minimality checks.
inline MeanCurvatureReport mean_curvature_field(const surf::SurfaceMesh& mesh,
                                                const DerivedParams& d) {
    MeanCurvatureReport rep;
    rep.H.assign(mesh.vertices.size(), 0.0);

    std::vector<std::vector<double>> wbar(d.N + 1);
    for (int i = 1; i <= d.N; ++i) wbar[i] = surf::cokernel_wbar(i, mesh);

    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const surf::Vertex& v = mesh.vertices[k];
        switch (v.region) {
            case surf::Region::FlatDisc:
                rep.H[k] = 0.0;
                break;
            case surf::Region::Catenoid: {
                rep.H[k] = forms_catenoid(v.catenoid, v.t, v.vartheta, d).H;
                rep.sup_cat_rho1H = std::max(rep.sup_cat_rho1H, std::abs(rep.H[k]) / v.rho);
                rep.sup_cat_rho2H =
                    std::max(rep.sup_cat_rho2H, std::abs(rep.H[k]) / (v.rho * v.rho));
                break;
            }
            default: {
                rep.H[k] = forms_disc_graph(v.layer, v.sigma, v.theta, d).H;
                const double weighted = rep.H[k] / (v.rho * v.rho);
                const double res = weighted - d.disloc[v.layer - 1] * wbar[v.layer][k];
                rep.sup_disc_weighted = std::max(rep.sup_disc_weighted, std::abs(weighted));
                rep.sup_disc_residual = std::max(rep.sup_disc_residual, std::abs(res));
            }
        }
    }
    return rep;
}

// Boundary flux of the vertical field through the rim of region D_i:
// the line integral of <eta, e_z> over the sphere arcs and waist circles.
inline double vertical_force(const surf::SurfaceMesh& mesh, int layer) {
    double F = 0.0;
    const auto edges = mesh.edges();
    std::vector<int> incidence(mesh.vertices.size(), 0);
    bool any = false;
    for (const auto& e : edges) {
        const bool is_boundary = e.f1 < 0;
        const int l0 = mesh.face_layer[e.f0];
        const int l1 = is_boundary ? -1 : mesh.face_layer[e.f1];
        const bool on_rim = is_boundary ? (l0 == layer)
                                        : (l0 != l1 && (l0 == layer || l1 == layer));
        if (!on_rim) continue;
        any = true;
        incidence[e.v0]++;
        incidence[e.v1]++;

        const surf::Vertex& a = mesh.vertices[e.v0];
        const surf::Vertex& b = mesh.vertices[e.v1];
        const double len = (a.pos - b.pos).norm();

        double eta_z = 0.0;
        if (is_boundary && a.boundary && b.boundary) {
            // free boundary: exact conormal is radial
            eta_z = 0.5 * (a.pos.z() + b.pos.z());
        } else if (a.region == surf::Region::Catenoid && b.region == surf::Region::Catenoid) {
            // waist circle: exact conormal is the pushforward of d/dt, outward
            // from the layer owning the lower half
            auto eta_at = [&](const surf::Vertex& v) {
                const auto c = surf::phi_inverse(v.pos);
                const Vector3d up =
                    surf::detail::push_phi_vector(c.sigma, c.theta, c.omega, Vector3d(0, 0, 1))
                        .normalized();
                return up.z();
            };
            const int other = (mesh.face_layer[e.f0] == layer && !is_boundary)
                                  ? mesh.face_layer[e.f1]
                                  : mesh.face_layer[e.f0];
            const double sign = (other > layer) ? 1.0 : -1.0;
            eta_z = sign * 0.5 * (eta_at(a) + eta_at(b));
        } else {
            // fall back to the mesh conormal from the incident face on this layer
            const int f = (mesh.face_layer[e.f0] == layer) ? e.f0 : e.f1;
            const auto& tri = mesh.faces[f];
            int w = tri[0];
            for (int j = 0; j < 3; ++j)
                if (tri[j] != e.v0 && tri[j] != e.v1) w = tri[j];
            const Vector3d ev = (b.pos - a.pos).normalized();
            const Vector3d mid = 0.5 * (a.pos + b.pos);
            Vector3d out = mid - mesh.vertices[w].pos;
            out -= out.dot(ev) * ev;
            eta_z = out.normalized().z();
        }
        F += eta_z * len;
    }
    if (!any) throw std::invalid_argument("vertical_force: no rim edges found for layer");
    for (std::size_t v = 0; v < incidence.size(); ++v)
        if (incidence[v] % 2 != 0)
            throw std::runtime_error("vertical_force: open boundary loop at vertex " +
                                     std::to_string(v));
    return F;
}

inline Eigen::VectorXd vertical_forces(const surf::SurfaceMesh& mesh) {
    Eigen::VectorXd F(mesh.N);
    for (int i = 1; i <= mesh.N; ++i) F[i - 1] = vertical_force(mesh, i);
    return F;
}

// sup of m^{-beta} rho^beta |u| over the mesh vertices.
inline double weighted_sup_norm(const std::vector<double>& field, double beta,
                                const surf::SurfaceMesh& mesh) {
    if (field.size() != mesh.vertices.size())
        throw std::invalid_argument("weighted_sup_norm: field size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k)
        s = std::max(s, std::pow(mesh.vertices[k].rho / mesh.m, beta) * std::abs(field[k]));
    return s;
}

}  // namespace fbms::geom
