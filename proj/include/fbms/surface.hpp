#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fbms/balance.hpp"
#include "fbms/numerics.hpp"

namespace fbms::surf {

using balance::DerivedParams;
using balance::StackingParams;
using Eigen::Vector3d;

constexpr double kSigmaMax = 1.0 / 3.0;
constexpr double kOmegaMax = M_PI / 4.0;

inline double cutoff(double x) { return fbms::smooth_bump(x); }

namespace detail {
inline Vector3d phi_raw(double sigma, double theta, double omega) {
    const double c = (1.0 - sigma) * std::cos(omega);
    return Vector3d(c * std::cos(theta), c * std::sin(theta), (1.0 - sigma) * std::sin(omega));
}
}  // namespace detail

// Boundary-orthogonal coordinates on a neighborhood of the equator.
inline Vector3d phi_map(double sigma, double theta, double omega) {
    if (sigma < -1e-9 || sigma > kSigmaMax + 1e-9 || std::abs(omega) > kOmegaMax + 1e-9)
        throw std::domain_error("phi_map: (sigma, omega) outside the coordinate box");
    return detail::phi_raw(sigma, theta, omega);
}

struct PhiCoords {
    double sigma = 0, theta = 0, omega = 0;
};

inline PhiCoords phi_inverse(const Vector3d& p) {
    const double r = p.norm();
    PhiCoords c;
    c.sigma = 1.0 - r;
    if (c.sigma < -1e-9 || c.sigma > kSigmaMax + 1e-9)
        throw std::domain_error("phi_inverse: radius outside the shell covered by the chart");
    c.omega = std::asin(std::clamp(p.z() / r, -1.0, 1.0));
    if (std::abs(c.omega) > kOmegaMax + 1e-9)
        throw std::domain_error("phi_inverse: point outside the omega range");
    c.theta = std::atan2(p.y(), p.x());
    return c;
}

// One catenoidal bridge attached to a layer, in the layer's local frame.
struct Bridge {
    double tau = 0;
    double hK = 0;
    int cat = 0;  // catenoid level, 1..N-1
};

struct LayerSpec {
    int i = 1, N = 2, m = 10;
    double hB = 0;
    double beta = 0;  // rotation of the layer about the z-axis
    std::optional<Bridge> plus;   // bridge at theta = +pi/(2m)
    std::optional<Bridge> minus;  // bridge at theta = -pi/(2m)
};

// Which bridges a layer carries and how it is rotated. The outermost layer
// is rotated so that its bridges land on the catenoid-(N-1) meridians; this
// is congruent mod 2pi/m (the block's rotational period) to rotating by N pi/m.
inline LayerSpec layer_spec(int i, const DerivedParams& d) {
    if (i < 1 || i > d.N) throw std::invalid_argument("layer_spec: layer index out of range");
    LayerSpec s;
    s.i = i;
    s.N = d.N;
    s.m = d.m;
    s.hB = d.hB[i - 1];
    if (i < d.N)
        s.plus = Bridge{d.tau[i - 1], d.hK[i - 1], i};
    else
        s.plus = Bridge{d.tau[d.N - 2], d.hK[d.N - 2], d.N - 1};
    if (i > 1 && i < d.N) s.minus = Bridge{d.tau[i - 2], d.hK[i - 2], i - 1};
    s.beta = (i == d.N) ? (d.N - 2) * M_PI / d.m : (i - 1) * M_PI / d.m;
    return s;
}

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline double omega_disc(double hB, double sigma) { return std::asin(hB / (1.0 - sigma)); }

// arcosh with the waist circle snapped to zero. Near the corner theta is the
// tiny difference of two order pi/(2m) numbers, so r/tau carries cancellation
// noise of order eps*pi/(2m)/tau (about 1e-7 at m = 40); arcosh would amplify
// it to sqrt scale and break the inter-layer weld. The snap displaces ring
// points by at most tau*arcosh(1+1e-6) ~ 1.4e-3 tau, far below feature size.
inline double waist_arcosh(double ratio) {
    return ratio <= 1.0 + 1e-6 ? 0.0 : fbms::arcosh(ratio);
}

inline double omega_catenoid(const Bridge& b, double hB, double r, const char* side) {
    if (r < b.tau * (1.0 - 1e-6))
        throw std::domain_error(std::string("height_function: point inside the ") + side +
                                " waist perforation (r = " + std::to_string(r) + " < tau)");
    return b.hK + sgn(hB - b.hK) * b.tau * waist_arcosh(r / b.tau);
}

// Glued height function of a layer over its perforated sector: catenoid ends
// blended through a constant plateau into the flat-disc profile.
inline double height_local(const LayerSpec& s, double sigma, double theta) {
    if (sigma < -1e-3 || sigma > kSigmaMax + 1e-3)
        throw std::domain_error("height_function: sigma outside [0, 1/3]");
    const double half = M_PI / (2.0 * s.m);
    if (std::abs(theta) > half * 1.5)
        throw std::domain_error("height_function: theta outside the layer sector");
    const double psig = cutoff(s.m * sigma);
    const double psip = s.plus ? cutoff(4.0 * s.m / M_PI * std::abs(theta - half)) : 0.0;
    const double psim = s.minus ? cutoff(4.0 * s.m / M_PI * std::abs(theta + half)) : 0.0;
    double w = psig * (1.0 - psip - psim) * s.hB;
    if (psig < 1.0) w += (1.0 - psig) * omega_disc(s.hB, sigma);
    if (s.plus && psig * psip > 0.0)
        w += psig * psip * omega_catenoid(*s.plus, s.hB, std::hypot(sigma, theta - half), "+");
    if (s.minus && psig * psim > 0.0)
        w += psig * psim * omega_catenoid(*s.minus, s.hB, std::hypot(sigma, theta + half), "-");
    return w;
}

inline double height_function(int i, double sigma, double theta, const DerivedParams& d) {
    return height_local(layer_spec(i, d), sigma, theta);
}

// Half-catenoid chart of ribbon i at its representative meridian.
inline Vector3d kappa_chart(int i, double t, double vartheta, const DerivedParams& d) {
    if (i < 1 || i > d.N - 1) throw std::invalid_argument("kappa_chart: ribbon index out of range");
    if (std::abs(t) > d.a[i - 1] + 1e-9 || std::abs(vartheta) > M_PI / 2 + 1e-9)
        throw std::domain_error("kappa_chart: (t, vartheta) outside the chart rectangle");
    const double tau = d.tau[i - 1];
    const double axis = (i % 2 == 1 ? 1.0 : -1.0) * M_PI / (2.0 * d.m);
    const double r = tau * std::cosh(t);
    return detail::phi_raw(r * std::cos(vartheta), axis + r * std::sin(vartheta),
                           d.hK[i - 1] + tau * t);
}

inline double psi_varpi(int m, double x, double y) {
    return cutoff(m / 5.0 * (1.0 - std::hypot(x, y)));
}

// Projection of the ball onto the horizontal unit disc; identity on {z=0},
// radial near the sphere so that Phi(sigma,theta,omega) -> Phi(sigma,theta,0).
inline Vector3d varpi_chart(int m, const Vector3d& p) {
    const double r2 = p.x() * p.x() + p.y() * p.y();
    if (r2 < 1e-300) return Vector3d::Zero();
    const double psi = psi_varpi(m, p.x(), p.y());
    const double denom = 1.0 - psi + psi * std::sqrt(r2 / (r2 + p.z() * p.z()));
    return Vector3d(p.x() / denom, p.y() / denom, 0.0);
}

enum class Region : std::uint8_t { FlatDisc, DiscGraph, Intermediate, Catenoid };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::FlatDisc: return "flat-disc";
        case Region::DiscGraph: return "disc-graph";
        case Region::Intermediate: return "intermediate";
        case Region::Catenoid: return "catenoid";
    }
    return "?";
}

struct Vertex {
    Vector3d pos = Vector3d::Zero();
    Vector3d normal = Vector3d::Zero();
    Region region = Region::FlatDisc;
    std::int16_t layer = 0;     // 1..N
    std::int16_t catenoid = 0;  // ribbon level for Region::Catenoid
    std::int16_t meridian = -1; // axis index in [0, 2m) for Region::Catenoid
    bool boundary = false;
    double rho = 0;
    bool has_chart = false;     // graph vertices carry base-sector (sigma, theta)
    double sigma = 0, theta = 0;
    double t = 0, vartheta = 0; // catenoid chart coordinates where applicable
};

struct SurfaceMesh {
    int N = 0, m = 0;
    double resolution = 0;
    std::vector<Vertex> vertices;
    std::vector<Eigen::Vector3i> faces;
    std::vector<std::int16_t> face_layer;

    struct EdgeRef {
        int v0, v1;
        int f0 = -1, f1 = -1;  // incident faces
    };

    // Edge table keyed by sorted vertex pair.
    std::vector<EdgeRef> edges() const {
        std::unordered_map<std::uint64_t, int> lookup;
        std::vector<EdgeRef> out;
        lookup.reserve(faces.size() * 2);
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            for (int e = 0; e < 3; ++e) {
                int a = faces[f][e], b = faces[f][(e + 1) % 3];
                if (a > b) std::swap(a, b);
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
                auto it = lookup.find(key);
                if (it == lookup.end()) {
                    lookup.emplace(key, static_cast<int>(out.size()));
                    out.push_back(EdgeRef{a, b, f, -1});
                } else {
                    out[it->second].f1 = f;
                }
            }
        }
        return out;
    }
};

namespace detail {

struct SectorMesh {
    std::vector<std::array<double, 2>> uv;  // (sigma, theta) in the layer frame
    std::vector<std::array<int, 3>> tris;
};

inline void add_grid_faces(SectorMesh& sm, const std::vector<std::vector<int>>& ids) {
    const int nrow = static_cast<int>(ids.size());
    for (int r = 0; r + 1 < nrow; ++r) {
        const int ncol = static_cast<int>(ids[r].size());
        for (int c = 0; c + 1 < ncol; ++c) {
            const int v00 = ids[r][c], v01 = ids[r][c + 1];
            const int v10 = ids[r + 1][c], v11 = ids[r + 1][c + 1];
            sm.tris.push_back({v00, v10, v11});
            sm.tris.push_back({v00, v11, v01});
        }
    }
}

struct SectorLadders {
    int n_alpha = 8;
    std::vector<double> alpha;     // quarter-circle angles
    std::vector<double> sig_tan;   // corner-square sigma ladder, 0..R_s
    std::vector<double> cot_off;   // offsets R_s*cot(alpha) for alpha in [pi/4, pi/2], descending
    double Rs = 0;
};

inline SectorLadders make_ladders(int m, double resolution) {
    SectorLadders L;
    L.Rs = M_PI / (4.0 * m);
    int na = static_cast<int>(std::ceil((M_PI / 2.0) * L.Rs / resolution));
    na = std::clamp(na, 8, 64);
    if (na % 2) ++na;
    L.n_alpha = na;
    L.alpha.resize(na + 1);
    for (int k = 0; k <= na; ++k) L.alpha[k] = (M_PI / 2.0) * k / na;
    for (int k = 0; k <= na / 2; ++k) L.sig_tan.push_back(L.Rs * std::tan(L.alpha[k]));
    for (int k = na / 2; k <= na; ++k)
        L.cot_off.push_back(L.Rs * (std::cos(L.alpha[k]) / std::sin(L.alpha[k])));
    return L;
}

// Quarter-annulus block around a perforated corner, geometric in radius from
// the waist circle out to the corner square boundary.
inline void add_polar_block(SectorMesh& sm, const SectorLadders& L, double half, int corner_sign,
                            double tau) {
    const int na = L.n_alpha;
    const int nr = std::clamp(static_cast<int>(std::ceil(std::log(L.Rs / tau) / std::log(1.5))),
                              12, 160);
    std::vector<std::vector<int>> ids(nr + 1, std::vector<int>(na + 1));
    for (int j = 0; j <= nr; ++j) {
        for (int k = 0; k <= na; ++k) {
            const double a = L.alpha[k];
            const double sa = std::sin(a), ca = std::cos(a);
            const double rout = L.Rs / std::max(sa, ca);
            const double r = tau * std::pow(rout / tau, double(j) / nr);
            ids[j][k] = static_cast<int>(sm.uv.size());
            sm.uv.push_back({r * sa, corner_sign * (half - r * ca)});
        }
    }
    add_grid_faces(sm, ids);
}

inline void add_tensor_block(SectorMesh& sm, const std::vector<double>& sig,
                             const std::vector<double>& th) {
    std::vector<std::vector<int>> ids(sig.size(), std::vector<int>(th.size()));
    for (std::size_t j = 0; j < sig.size(); ++j)
        for (std::size_t k = 0; k < th.size(); ++k) {
            ids[j][k] = static_cast<int>(sm.uv.size());
            sm.uv.push_back({sig[j], th[k]});
        }
    add_grid_faces(sm, ids);
}

inline std::vector<double> uniform_ladder(double a, double b, double target) {
    const int n = std::max(2, static_cast<int>(std::ceil((b - a) / target)));
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) v[k] = a + (b - a) * k / n;
    return v;
}

// Geometric ladder from a (step delta0) growing by 1.4 per step, capped at
// `cap`, ending exactly at b.
inline std::vector<double> graded_ladder(double a, double b, double delta0, double cap) {
    std::vector<double> v{a};
    double step = delta0;
    while (v.back() + 1.5 * step < b) {
        v.push_back(v.back() + step);
        step = std::min(step * 1.4, cap);
    }
    v.push_back(b);
    return v;
}

// Interior theta ladder between the corner squares.
inline std::vector<double> mid_theta_ladder(const LayerSpec& s, const SectorLadders& L,
                                            double resolution) {
    const double half = M_PI / (2.0 * s.m);
    const double top = s.plus ? half - L.cot_off.front() : half;
    const double bot = s.minus ? -half + L.cot_off.front() : -half;
    const double th_step = std::min(resolution, M_PI * L.Rs / L.n_alpha);
    return uniform_ladder(bot, top, th_step);
}

// Full-sector theta ladder for the bulk block: corner-square edge ordinates
// (cot_off descends from R_s to 0, so both edge ladders ascend in theta)
// spliced with the interior ladder.
inline std::vector<double> bulk_theta_ladder(const LayerSpec& s, const SectorLadders& L,
                                             double resolution) {
    const double half = M_PI / (2.0 * s.m);
    const std::vector<double> th_mid = mid_theta_ladder(s, L, resolution);
    std::vector<double> th_bulk;
    if (s.minus)
        for (std::size_t k = 0; k < L.cot_off.size(); ++k)
            th_bulk.push_back(-half + L.cot_off[L.cot_off.size() - 1 - k]);
    for (std::size_t k = s.minus ? 1 : 0; k < th_mid.size(); ++k) th_bulk.push_back(th_mid[k]);
    if (s.plus)
        for (std::size_t k = 1; k < L.cot_off.size(); ++k)
            th_bulk.push_back(half - L.cot_off[k]);
    return th_bulk;
}

inline SectorMesh build_sector(const LayerSpec& s, const SectorLadders& L, double resolution) {
    SectorMesh sm;
    const double half = M_PI / (2.0 * s.m);

    if (s.plus) add_polar_block(sm, L, half, +1, s.plus->tau);
    if (s.minus) add_polar_block(sm, L, half, -1, s.minus->tau);

    add_tensor_block(sm, L.sig_tan, mid_theta_ladder(s, L, resolution));  // sigma in [0, R_s]

    const std::vector<double> th_bulk = bulk_theta_ladder(s, L, resolution);
    const double dsig0 = L.Rs - L.sig_tan[L.sig_tan.size() - 2];
    std::vector<double> sig_bulk = graded_ladder(L.Rs, kSigmaMax, std::max(dsig0, 1e-6), resolution);
    add_tensor_block(sm, sig_bulk, th_bulk);
    return sm;
}

// Normal of the catenoidal piece in Phi coordinates (before pushforward);
// smooth across the waist, oriented so the global field is (-1)^{cat-1} times it.
inline Vector3d catenoid_normal_phi(double tau, double hK, double t, double vt) {
    const double sigma = tau * std::cosh(t) * std::cos(vt);
    const double omega = hK + tau * t;
    const double sech = 1.0 / std::cosh(t);
    return Vector3d((1.0 - sigma) * sech * std::cos(vt),
                    sech * std::sin(vt) / ((1.0 - sigma) * std::pow(std::cos(omega), 2)),
                    -std::tanh(t) / (1.0 - sigma));
}

inline Vector3d push_phi_vector(double sigma, double theta, double omega, const Vector3d& v) {
    const double cw = std::cos(omega), sw = std::sin(omega);
    const double ct = std::cos(theta), st = std::sin(theta);
    const Vector3d e_sig(-ct * cw, -st * cw, -sw);
    const Vector3d e_th(-(1.0 - sigma) * cw * st, (1.0 - sigma) * cw * ct, 0.0);
    const Vector3d e_om(-(1.0 - sigma) * ct * sw, -(1.0 - sigma) * st * sw, (1.0 - sigma) * cw);
    return v.x() * e_sig + v.y() * e_th + v.z() * e_om;
}

struct WeldHasher {
    double cell;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;
    static std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
        std::uint64_t h = static_cast<std::uint64_t>(x) * 73856093u;
        h ^= static_cast<std::uint64_t>(y) * 19349663u;
        h ^= static_cast<std::uint64_t>(z) * 83492791u;
        return h;
    }
};

}  // namespace detail

// rho weight from a layer-local chart point: 1/d blended into the constant m
// at distance 2/m from the catenoid axes.
inline double rho_from_chart(const LayerSpec& s, double sigma, double theta) {
    const double half = M_PI / (2.0 * s.m);
    double d = std::numeric_limits<double>::infinity();
    if (s.plus) d = std::min(d, std::hypot(sigma, theta - half));
    if (s.minus) d = std::min(d, std::hypot(sigma, theta + half));
    if (!(d < 2.0 / s.m)) return double(s.m);
    const double psi = cutoff(s.m * d);
    return psi / d + (1.0 - psi) * s.m;
}

inline double rho_weight(const SurfaceMesh& mesh, int vertex) {
    return mesh.vertices.at(vertex).rho;
}

// Assembles the N-layer initial surface as a welded triangle mesh with
// region tags, catenoid charts, rho weights, and a consistent orientation.
inline SurfaceMesh assemble_surface(const StackingParams& p, double resolution) {
    const DerivedParams d = balance::derived_parameters(p);
    const int m = p.m, N = p.N;
    const double half = M_PI / (2.0 * m);

    if (resolution > M_PI / (4.0 * m))
        throw std::invalid_argument("assemble_surface: resolution too coarse for the sector width");
    for (int i = 0; i < N - 1; ++i)
        if (d.tau[i] >= M_PI / (4.0 * m))
            throw std::invalid_argument("assemble_surface: waist " + std::to_string(i + 1) +
                                        " too large for the corner blocks (m too small)");

    const detail::SectorLadders L = detail::make_ladders(m, resolution);

    SurfaceMesh mesh;
    mesh.N = N;
    mesh.m = m;
    mesh.resolution = resolution;

    double tau_min = d.tau.minCoeff();
    const double weld_tol = std::min(1e-10, 0.01 * tau_min * (M_PI / 2.0) / L.n_alpha);

    auto classify = [&](const LayerSpec& s, double sigma, double theta, Vertex& v) {
        v.layer = static_cast<std::int16_t>(s.i);
        v.has_chart = true;
        v.sigma = sigma;
        v.theta = theta;
        v.rho = rho_from_chart(s, sigma, theta);
        const Bridge* near = nullptr;
        double r = std::numeric_limits<double>::infinity(), dth = 0;
        if (s.plus) {
            r = std::hypot(sigma, theta - half);
            dth = theta - half;
            near = &*s.plus;
        }
        if (s.minus) {
            const double rm = std::hypot(sigma, theta + half);
            if (rm < r) {
                r = rm;
                dth = theta + half;
                near = &*s.minus;
            }
        }
        if (near && r <= 1.0 / (2.0 * m) + 1e-15) {
            v.region = Region::Catenoid;
            v.catenoid = static_cast<std::int16_t>(near->cat);
            v.t = sgn(s.hB - near->hK) * waist_arcosh(r / near->tau);
            v.vartheta = std::atan2(dth, sigma);
        } else if (sigma < 3.0 / m) {
            v.region = Region::Intermediate;
        } else {
            v.region = Region::DiscGraph;
        }
    };

    // base-sector graph normal, global orientation
    auto sector_normal = [&](const LayerSpec& s, double sigma, double theta, const Vertex& v,
                             double layer_sign) -> Vector3d {
        if (v.region == Region::Catenoid) {
            const Bridge& b = (s.plus && s.plus->cat == v.catenoid) ? *s.plus : *s.minus;
            const Vector3d nphi = detail::catenoid_normal_phi(b.tau, b.hK, v.t, v.vartheta);
            const double omega = b.hK + b.tau * v.t;
            const Vector3d n3 = detail::push_phi_vector(sigma, theta, omega, nphi).normalized();
            return ((b.cat % 2 == 1) ? 1.0 : -1.0) * n3;
        }
        const double h = std::min(1e-5, 0.05 * L.Rs);
        auto pos = [&](double sg, double th) {
            return detail::phi_raw(sg, th, height_local(s, sg, th));
        };
        const Vector3d du = (pos(sigma + h, theta) - pos(sigma - h, theta)) / (2 * h);
        const Vector3d dv = (pos(sigma, theta + h) - pos(sigma, theta - h)) / (2 * h);
        return layer_sign * du.cross(dv).normalized();
    };

    for (int i = 1; i <= N; ++i) {
        const LayerSpec s = layer_spec(i, d);
        const detail::SectorMesh sector = detail::build_sector(s, L, resolution);

        // orientation of the raw cross product against graph-up, probed on the flat part
        double layer_sign;
        {
            auto pos = [&](double sg, double th) {
                return detail::phi_raw(sg, th, height_local(s, sg, th));
            };
            const double h = 1e-5;
            const Vector3d du = (pos(0.25 + h, 0) - pos(0.25 - h, 0)) / (2 * h);
            const Vector3d dv = (pos(0.25, h) - pos(0.25, -h)) / (2 * h);
            layer_sign = (du.cross(dv).z() > 0 ? 1.0 : -1.0) * ((i % 2 == 1) ? 1.0 : -1.0);
        }

        // per-sector vertex data (chart, region, normal, rho)
        std::vector<Vertex> proto(sector.uv.size());
        for (std::size_t k = 0; k < sector.uv.size(); ++k) {
            const double sg = sector.uv[k][0], th = sector.uv[k][1];
            Vertex& v = proto[k];
            classify(s, sg, th, v);
            v.boundary = (sg == 0.0);
            v.normal = sector_normal(s, sg, th, v, layer_sign);
            const double omega = height_local(s, sg, th);
            v.pos = detail::phi_raw(sg, th, omega);
        }

        for (int k = 0; k < m; ++k) {
            for (int refl = 0; refl < 2; ++refl) {
                const double rot = s.beta + 2.0 * M_PI * k / m;
                const int base = static_cast<int>(mesh.vertices.size());
                for (std::size_t vi = 0; vi < proto.size(); ++vi) {
                    Vertex v = proto[vi];
                    const double th_loc = refl ? (M_PI / m - v.theta) : v.theta;
                    const double th_g = rot + th_loc;
                    const double cg = std::cos(rot + (refl ? M_PI / m : 0.0));
                    const double sg2 = std::sin(rot + (refl ? M_PI / m : 0.0));
                    // copy transform: rotation by rot, optionally pre-reflected in theta
                    Eigen::Matrix3d T;
                    if (!refl)
                        T << cg, -sg2, 0, sg2, cg, 0, 0, 0, 1;
                    else
                        T << cg, sg2, 0, sg2, -cg, 0, 0, 0, 1;
                    v.pos = detail::phi_raw(v.sigma, th_g, height_local(s, v.sigma, v.theta));
                    v.normal = T * proto[vi].normal;
                    if (v.region == Region::Catenoid) {
                        const double axis_loc =
                            (s.plus && s.plus->cat == v.catenoid) ? half : -half;
                        double ax = rot + (refl ? (M_PI / m - axis_loc) : axis_loc);
                        ax = std::fmod(std::fmod(ax, 2.0 * M_PI) + 2.0 * M_PI, 2.0 * M_PI);
                        v.meridian = static_cast<std::int16_t>(
                            ((std::lround(ax * m / M_PI - 0.5)) % (2 * m) + 2 * m) % (2 * m));
                    }
                    mesh.vertices.push_back(v);
                }
                for (const auto& tr : sector.tris) {
                    Eigen::Vector3i f(base + tr[0], base + tr[1], base + tr[2]);
                    mesh.faces.push_back(f);
                    mesh.face_layer.push_back(static_cast<std::int16_t>(i));
                }
            }
        }

        // flat inner disc at height hB_i, radius matching the graph rim
        {
            const double rd = std::sqrt(4.0 / 9.0 - s.hB * s.hB);
            // global rim angles from all copies of the bulk theta ladder
            const std::vector<double> th_bulk = detail::bulk_theta_ladder(s, L, resolution);
            std::vector<double> angles;
            for (int k = 0; k < m; ++k)
                for (int refl = 0; refl < 2; ++refl) {
                    const double rot = s.beta + 2.0 * M_PI * k / m;
                    for (double th : th_bulk) {
                        double a = rot + (refl ? M_PI / m - th : th);
                        a = std::remainder(a, 2.0 * M_PI);
                        angles.push_back(a);
                    }
                }
            std::sort(angles.begin(), angles.end());
            angles.erase(std::unique(angles.begin(), angles.end(),
                                     [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                         angles.end());
            if (std::abs((angles.back() - 2 * M_PI) - angles.front()) < 1e-12) angles.pop_back();

            std::vector<double> radii{rd};
            double step = resolution;
            while (radii.back() > 3.5 * step) {
                radii.push_back(radii.back() - step);
                step = std::min(step * 1.5, 0.15);
            }
            const int na = static_cast<int>(angles.size());
            const int base = static_cast<int>(mesh.vertices.size());
            const double nz = (i % 2 == 1) ? 1.0 : -1.0;
            for (std::size_t ri = 0; ri < radii.size(); ++ri)
                for (int k = 0; k < na; ++k) {
                    Vertex v;
                    v.pos = Vector3d(radii[ri] * std::cos(angles[k]),
                                     radii[ri] * std::sin(angles[k]), s.hB);
                    v.normal = Vector3d(0, 0, nz);
                    v.region = Region::FlatDisc;
                    v.layer = static_cast<std::int16_t>(i);
                    v.rho = m;
                    mesh.vertices.push_back(v);
                }
            Vertex center;
            center.pos = Vector3d(0, 0, s.hB);
            center.normal = Vector3d(0, 0, nz);
            center.region = Region::FlatDisc;
            center.layer = static_cast<std::int16_t>(i);
            center.rho = m;
            const int cid = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(center);
            auto vid = [&](std::size_t ri, int k) { return base + static_cast<int>(ri) * na + (k % na); };
            for (std::size_t ri = 0; ri + 1 < radii.size(); ++ri)
                for (int k = 0; k < na; ++k) {
                    mesh.faces.push_back(Eigen::Vector3i(vid(ri, k), vid(ri, k + 1), vid(ri + 1, k)));
                    mesh.face_layer.push_back(static_cast<std::int16_t>(i));
                    mesh.faces.push_back(
                        Eigen::Vector3i(vid(ri, k + 1), vid(ri + 1, k + 1), vid(ri + 1, k)));
                    mesh.face_layer.push_back(static_cast<std::int16_t>(i));
                }
            for (int k = 0; k < na; ++k) {
                mesh.faces.push_back(Eigen::Vector3i(vid(radii.size() - 1, k),
                                                     vid(radii.size() - 1, k + 1), cid));
                mesh.face_layer.push_back(static_cast<std::int16_t>(i));
            }
        }
    }

    // tolerance weld
    {
        const double cell = std::max(weld_tol, 1e-14);
        std::unordered_map<std::uint64_t, std::vector<int>> buckets;
        std::vector<int> remap(mesh.vertices.size(), -1);
        std::vector<Vertex> kept;
        kept.reserve(mesh.vertices.size());
        auto key_of = [&](const Vector3d& p, std::int64_t dx, std::int64_t dy, std::int64_t dz) {
            const std::int64_t x = static_cast<std::int64_t>(std::floor(p.x() / cell)) + dx;
            const std::int64_t y = static_cast<std::int64_t>(std::floor(p.y() / cell)) + dy;
            const std::int64_t z = static_cast<std::int64_t>(std::floor(p.z() / cell)) + dz;
            return detail::WeldHasher::key(x, y, z);
        };
        for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
            const Vector3d& p = mesh.vertices[vi].pos;
            int found = -1;
            for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx)
                for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy)
                    for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
                        auto it = buckets.find(key_of(p, dx, dy, dz));
                        if (it == buckets.end()) continue;
                        for (int cand : it->second)
                            if ((kept[cand].pos - p).norm() <= weld_tol) {
                                found = cand;
                                break;
                            }
                    }
            if (found < 0) {
                found = static_cast<int>(kept.size());
                kept.push_back(mesh.vertices[vi]);
                buckets[key_of(p, 0, 0, 0)].push_back(found);
            } else {
                kept[found].boundary = kept[found].boundary || mesh.vertices[vi].boundary;
            }
            remap[vi] = found;
        }
        std::vector<Eigen::Vector3i> faces;
        std::vector<std::int16_t> face_layer;
        faces.reserve(mesh.faces.size());
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
            Eigen::Vector3i tr(remap[mesh.faces[f][0]], remap[mesh.faces[f][1]],
                               remap[mesh.faces[f][2]]);
            if (tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2]) continue;
            faces.push_back(tr);
            face_layer.push_back(mesh.face_layer[f]);
        }
        mesh.vertices = std::move(kept);
        mesh.faces = std::move(faces);
        mesh.face_layer = std::move(face_layer);
    }

    // consistent winding: face normal should agree with the vertex normals
    for (auto& f : mesh.faces) {
        const Vector3d a = mesh.vertices[f[0]].pos;
        const Vector3d cr = (mesh.vertices[f[1]].pos - a).cross(mesh.vertices[f[2]].pos - a);
        const Vector3d nsum = mesh.vertices[f[0]].normal + mesh.vertices[f[1]].normal +
                              mesh.vertices[f[2]].normal;
        if (cr.dot(nsum) < 0) std::swap(f[1], f[2]);
    }

    // containment sanity
    for (const auto& v : mesh.vertices) {
        if (v.pos.norm() > 1.0 + 1e-9)
            throw std::runtime_error("assemble_surface: vertex escapes the closed unit ball");
        if (v.boundary && std::abs(v.pos.norm() - 1.0) > 1e-9)
            throw std::runtime_error("assemble_surface: boundary vertex off the unit sphere");
    }
    return mesh;
}

// w_i: the pyr_m-invariant bump (-1)^{i-1} Psi(2m|sigma - 3/m|) supported in
// the band sigma in [2/m, 4/m] of layer i, pulled back through varpi.
inline std::vector<double> cokernel_w(int i, const SurfaceMesh& mesh) {
    std::vector<double> out(mesh.vertices.size(), 0.0);
    const double sign = (i % 2 == 1) ? 1.0 : -1.0;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const Vertex& v = mesh.vertices[k];
        if (v.layer != i || !v.has_chart) continue;
        out[k] = sign * cutoff(2.0 * mesh.m * std::abs(v.sigma - 3.0 / mesh.m));
    }
    return out;
}

// The planar profile vbar-hat: pyr_m-invariant on the unit disc, prescribed as
// psi^sigma (psi^+ - psi^-) on the fundamental sector and extended by symmetry.
inline double vbar_hat(int m, double x, double y) {
    const double R = std::hypot(x, y);
    if (R < 1e-14) return 0.0;
    const double sigma = 1.0 - R;
    if (sigma >= 2.0 / m) return 0.0;  // support is contained in {R >= 1 - 2/m}
    double phi = std::atan2(y, x);
    // fold into the fundamental sector [-pi/2m, pi/2m] of the pyramidal action
    const double period = 2.0 * M_PI / m;
    phi = std::remainder(phi, period);
    const double half = M_PI / (2.0 * m);
    if (phi > half) phi = period / 2.0 - phi;
    if (phi < -half) phi = -period / 2.0 - phi;
    const double psig = cutoff(m * std::max(sigma, 0.0));
    const double psip = cutoff(4.0 * m / M_PI * std::abs(phi - half));
    const double psim = cutoff(4.0 * m / M_PI * std::abs(phi + half));
    return psig * (psip - psim);
}

// wbar_i = rho^{-2} (planar Laplacian of vbar-hat) pulled back through varpi.
inline std::vector<double> cokernel_wbar(int i, const SurfaceMesh& mesh) {
    std::vector<double> out(mesh.vertices.size(), 0.0);
    const int m = mesh.m;
    const double h = 1e-3 / m;
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const Vertex& v = mesh.vertices[k];
        if (v.layer != i) continue;
        const Vector3d q = varpi_chart(m, v.pos);
        if (std::hypot(q.x(), q.y()) < 1.0 - 2.5 / m) continue;
        const double lap = (vbar_hat(m, q.x() + h, q.y()) + vbar_hat(m, q.x() - h, q.y()) +
                            vbar_hat(m, q.x(), q.y() + h) + vbar_hat(m, q.x(), q.y() - h) -
                            4.0 * vbar_hat(m, q.x(), q.y())) /
                           (h * h);
        out[k] = lap / (v.rho * v.rho);
    }
    return out;
}

}  // namespace fbms::surf
