#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbms/numerics.hpp"

namespace fbms::spectra {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// ---------------------------------------------------------------------------
// Closed-form eigenvalue families on the half-catenoid rectangle
// ---------------------------------------------------------------------------

enum class Family {
    DirichletTEven,        // tanh(gamma T) = gamma coth T, lambda = -gamma^2
    NeumannTEven,          // f_{+,T}(gamma) = 0, lambda = -gamma^2
    NeumannTOdd,           // f_{-,T}(gamma) = 0 excluding gamma = 1 (empty)
    NeumannOscEven,        // -s cot s tanh T = s^2/T + T sech^2 T, lambda = (s/T)^2
    NeumannOscOdd          //  s tan s tanh T = s^2/T + T sech^2 T, lambda = (s/T)^2
};

struct RootEig {
    double param = 0;   // gamma for hyperbolic families, s for oscillatory ones
    double lambda = 0;
};

inline std::vector<RootEig> catenoid_closed_form(double T, Family family) {
    if (T < 2.0) throw std::invalid_argument("catenoid_closed_form: requires T >= 2");
    const double tT = std::tanh(T);
    const double sech2 = 1.0 / (std::cosh(T) * std::cosh(T));
    std::vector<RootEig> out;
    switch (family) {
        case Family::DirichletTEven: {
            auto f = [&](double g) { return std::tanh(g * T) - g / tT; };
            for (double g : fbms::find_roots(f, 1e-8, 1.0 - 1e-13, 4000, 1e-13))
                out.push_back({g, -g * g});
            break;
        }
        case Family::NeumannTEven: {
            auto f = [&](double g) {
                return g * g - g * (1.0 / std::tanh(g * T)) * tT - sech2;
            };
            for (double g : fbms::find_roots(f, 1e-6, 3.0, 6000, 1e-13))
                out.push_back({g, -g * g});
            break;
        }
        case Family::NeumannTOdd: {
            auto f = [&](double g) { return g * g - g * std::tanh(g * T) * tT - sech2; };
            for (double g : fbms::find_roots(f, 1e-6, 3.0, 6000, 1e-13))
                if (std::abs(g - 1.0) > 1e-6) out.push_back({g, -g * g});
            break;
        }
        case Family::NeumannOscEven: {
            // multiplied through by sin s to remove the cot poles
            auto f = [&](double s) {
                return -s * std::cos(s) * tT - (s * s / T + T * sech2) * std::sin(s);
            };
            for (double s : fbms::find_roots(f, 1e-6, 4.0 * M_PI, 20000, 1e-12))
                out.push_back({s, (s / T) * (s / T)});
            break;
        }
        case Family::NeumannOscOdd: {
            auto f = [&](double s) {
                return s * std::sin(s) * tT - (s * s / T + T * sech2) * std::cos(s);
            };
            for (double s : fbms::find_roots(f, 1e-6, 4.0 * M_PI, 20000, 1e-12))
                out.push_back({s, (s / T) * (s / T)});
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model domains and the finite-difference eigensolver
// ---------------------------------------------------------------------------

enum class DomainKind { CatenoidRect, Rectangle, PerforatedOne, PerforatedTwo };

struct ModelDomain {
    DomainKind kind = DomainKind::Rectangle;
    double T = 3.0;   // half-length of the catenoid rectangle
    double r = 0.3;   // perforation radius for the perforated kinds
    double h = 1.0 / 64.0;  // target grid spacing

    double x0() const { return kind == DomainKind::CatenoidRect ? -T : 0.0; }
    double x1() const { return kind == DomainKind::CatenoidRect ? T : 3.0; }
    double y0() const { return -M_PI / 2; }
    double y1() const { return M_PI / 2; }

    void validate() const {
        if (kind == DomainKind::PerforatedOne || kind == DomainKind::PerforatedTwo) {
            if (!(r > 0 && r < M_PI / 2))
                throw std::invalid_argument("ModelDomain: perforation radius must be in (0, pi/2)");
            if (r / h < 8.0 - 1e-9)
                throw std::invalid_argument(
                    "ModelDomain: grid too coarse, need >= 8 cells across the perforation radius");
        }
        if (h <= 0) throw std::invalid_argument("ModelDomain: h must be positive");
    }

    bool inside(double x, double y) const {
        if (kind == DomainKind::PerforatedOne || kind == DomainKind::PerforatedTwo)
            if (x * x + (y - M_PI / 2) * (y - M_PI / 2) <= r * r) return false;
        if (kind == DomainKind::PerforatedTwo)
            if (x * x + (y + M_PI / 2) * (y + M_PI / 2) <= r * r) return false;
        return true;
    }
};

enum class BC { Dirichlet, Neumann };

// Parity restriction relative to the domain center: reflections in the first
// coordinate (t), the second (theta), or the point reflection through both.
struct SymClass {
    int t = 0;   // +1 even, -1 odd, 0 unrestricted
    int th = 0;
    int origin = 0;  // only combined with t = th = 0

    static SymClass none() { return {}; }
    static SymClass t_parity(int s) { return {s, 0, 0}; }
    static SymClass th_parity(int s) { return {0, s, 0}; }
    static SymClass origin_parity(int s) { return {0, 0, s}; }

    bool trivial() const { return t == 0 && th == 0 && origin == 0; }
};

struct SpectralProblem {
    ModelDomain domain;
    bool catenoid_potential = false;  // q = 2 sech^2 t, otherwise q = 0
    BC bc_x0 = BC::Neumann, bc_x1 = BC::Neumann;
    BC bc_y0 = BC::Neumann, bc_y1 = BC::Neumann;
    SymClass sym;

    void validate() const {
        domain.validate();
        const bool t_symmetric = domain.kind == DomainKind::CatenoidRect;
        const bool th_symmetric = domain.kind != DomainKind::PerforatedOne;
        if ((sym.t != 0 || sym.origin != 0) &&
            (!t_symmetric || bc_x0 != bc_x1))
            throw std::invalid_argument("SpectralProblem: t-parity incompatible with the domain");
        if ((sym.th != 0 || sym.origin != 0) && (!th_symmetric || bc_y0 != bc_y1))
            throw std::invalid_argument("SpectralProblem: theta-parity incompatible with the domain");
    }
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    int n_negative = 0, n_zero = 0, n_positive = 0;
    double h = 0;          // max actual grid spacing
    double zero_tol = 0;
    int unknowns = 0;
    bool converged = true;
    double residual = 0;
    std::vector<VectorXd> vectors;  // eigenvectors on the full active grid

    void recount() {
        n_negative = n_zero = n_positive = 0;
        for (double l : eigenvalues) {
            if (l < -zero_tol)
                ++n_negative;
            else if (l <= zero_tol)
                ++n_zero;
            else
                ++n_positive;
        }
    }
};

namespace detail {

struct Grid {
    int nx = 0, ny = 0;
    double hx = 0, hy = 0;
    double x0 = 0, y0 = 0;
    std::vector<int> active;   // cell -> active index or -1
    std::vector<int> cells;    // active index -> cell
    double cx(int i) const { return x0 + (i + 0.5) * hx; }
    double cy(int j) const { return y0 + (j + 0.5) * hy; }
};

inline Grid make_grid(const ModelDomain& dom) {
    Grid g;
    const double Lx = dom.x1() - dom.x0(), Ly = dom.y1() - dom.y0();
    g.nx = std::max(2, static_cast<int>(std::lround(Lx / dom.h)));
    g.ny = std::max(2, static_cast<int>(std::lround(Ly / dom.h)));
    g.hx = Lx / g.nx;
    g.hy = Ly / g.ny;
    g.x0 = dom.x0();
    g.y0 = dom.y0();
    g.active.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (dom.inside(g.cx(i), g.cy(j))) {
                g.active[static_cast<std::size_t>(j) * g.nx + i] =
                    static_cast<int>(g.cells.size());
                g.cells.push_back(j * g.nx + i);
            }
    return g;
}

// 5-point operator -Delta - q with the requested edge conditions; perforation
// staircase boundaries are Neumann.
inline SpMat assemble(const Grid& g, const SpectralProblem& p) {
    const int n = static_cast<int>(g.cells.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    for (int a = 0; a < n; ++a) {
        const int cell = g.cells[a];
        const int i = cell % g.nx, j = cell / g.nx;
        double diag = 0.0;
        auto couple = [&](int ii, int jj, double w, BC edge_bc, bool off_box) {
            if (off_box) {
                if (edge_bc == BC::Dirichlet) diag += 2.0 * w;
                return;  // Neumann: mirror ghost, no contribution
            }
            const int b = g.active[static_cast<std::size_t>(jj) * g.nx + ii];
            if (b < 0) return;  // perforation: Neumann
            diag += w;
            trip.emplace_back(a, b, -w);
        };
        couple(i - 1, j, ax, p.bc_x0, i == 0);
        couple(i + 1, j, ax, p.bc_x1, i == g.nx - 1);
        couple(i, j - 1, ay, p.bc_y0, j == 0);
        couple(i, j + 1, ay, p.bc_y1, j == g.ny - 1);
        if (p.catenoid_potential) {
            const double t = g.cx(i);
            diag -= 2.0 / (std::cosh(t) * std::cosh(t));
        }
        trip.emplace_back(a, a, diag);
    }
    SpMat A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

// Orthonormal basis of the requested parity subspace as a sparse matrix.
inline SpMat parity_basis(const Grid& g, const SymClass& sym) {
    struct Op {
        bool flip_x, flip_y;
        double sign;
    };
    std::vector<Op> ops{{false, false, 1.0}};
    if (sym.t != 0) {
        auto cur = ops;
        for (auto o : cur) ops.push_back({!o.flip_x, o.flip_y, o.sign * sym.t});
    }
    if (sym.th != 0) {
        auto cur = ops;
        for (auto o : cur) ops.push_back({o.flip_x, !o.flip_y, o.sign * sym.th});
    }
    if (sym.origin != 0) {
        auto cur = ops;
        for (auto o : cur) ops.push_back({!o.flip_x, !o.flip_y, o.sign * sym.origin});
    }

    const int n = static_cast<int>(g.cells.size());
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<char> taken(n, 0);
    int ncol = 0;
    for (int a = 0; a < n; ++a) {
        if (taken[a]) continue;
        const int i = g.cells[a] % g.nx, j = g.cells[a] / g.nx;
        // signed orbit sum
        std::vector<std::pair<int, double>> orbit;
        bool killed = false;
        for (const auto& op : ops) {
            const int ii = op.flip_x ? g.nx - 1 - i : i;
            const int jj = op.flip_y ? g.ny - 1 - j : j;
            const int b = g.active[static_cast<std::size_t>(jj) * g.nx + ii];
            if (b < 0)
                throw std::invalid_argument("parity_basis: active mask not symmetric");
            bool found = false;
            for (auto& e : orbit)
                if (e.first == b) {
                    if (e.second * op.sign < 0) killed = true;  // fixed cell, odd character
                    found = true;
                }
            if (!found) orbit.emplace_back(b, op.sign);
        }
        for (auto& e : orbit) taken[e.first] = 1;
        if (killed) continue;
        const double nrm = 1.0 / std::sqrt(static_cast<double>(orbit.size()));
        for (auto& e : orbit) trip.emplace_back(e.first, ncol, e.second * nrm);
        ++ncol;
    }
    SpMat B(n, ncol);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

// Shift-invert Lanczos with full reorthogonalization for the k lowest
// eigenpairs of a sparse symmetric operator bounded below by -shift0 + 1.
inline void lanczos_lowest(const SpMat& A, int k, double shift0, int seed,
                           std::vector<double>& vals, std::vector<VectorXd>& vecs,
                           bool& converged, double& residual) {
    const int n = static_cast<int>(A.rows());
    SpMat As = A;
    for (int i = 0; i < n; ++i) As.coeffRef(i, i) += shift0;
    As.makeCompressed();
    Eigen::SimplicialLDLT<SpMat> solver(As);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("lanczos_lowest: factorization failed");

    std::mt19937 rng(seed + 7);
    std::normal_distribution<double> gauss;
    const int pmax = std::min(n, std::max(2 * k + 16, 28));

    std::vector<VectorXd> V;
    V.reserve(pmax + 1);
    VectorXd v0(n);
    for (int i = 0; i < n; ++i) v0[i] = gauss(rng);
    v0.normalize();
    V.push_back(v0);
    std::vector<double> alpha, beta;

    converged = false;
    residual = 1e300;
    for (int it = 0; it < pmax; ++it) {
        VectorXd w = solver.solve(V.back());
        const double a = V.back().dot(w);
        alpha.push_back(a);
        w -= a * V.back();
        if (V.size() > 1) w -= beta.back() * V[V.size() - 2];
        for (const auto& q : V) w -= q.dot(w) * q;  // full reorthogonalization
        for (const auto& q : V) w -= q.dot(w) * q;
        const double b = w.norm();
        const int p = static_cast<int>(alpha.size());
        if (p >= std::max(k + 2, 6) || b < 1e-14) {
            // Ritz values of the tridiagonal operator
            MatrixXd Tm = MatrixXd::Zero(p, p);
            for (int i = 0; i < p; ++i) {
                Tm(i, i) = alpha[i];
                if (i + 1 < p) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(Tm);
            // largest mu of the inverse operator <-> smallest eigenvalues
            double worst = 0.0;
            for (int i = 0; i < k; ++i) {
                const int col = p - 1 - i;
                worst = std::max(worst, std::abs(b * es.eigenvectors()(p - 1, col)));
            }
            residual = worst;
            if (p >= k && (worst < 1e-11 || b < 1e-14 || it == pmax - 1)) {
                // largest mu of the inverse operator = smallest lambda, so
                // descending mu columns already give ascending eigenvalues
                vals.clear();
                vecs.clear();
                for (int i = 0; i < k && i < p; ++i) {
                    const int col = p - 1 - i;
                    const double mu = es.eigenvalues()(col);
                    vals.push_back(1.0 / mu - shift0);
                    VectorXd y = VectorXd::Zero(n);
                    for (int q = 0; q < p; ++q) y += es.eigenvectors()(q, col) * V[q];
                    vecs.push_back(y.normalized());
                }
                converged = worst < 1e-8;
                return;
            }
        }
        if (b < 1e-14) break;
        beta.push_back(b);
        V.push_back(w / b);
    }
    throw std::runtime_error("lanczos_lowest: iteration stalled");
}

}  // namespace detail

// Lowest k eigenvalues of the mixed-boundary Schroedinger problem, with the
// parity restriction applied by projecting onto the symmetric subspace.
inline Spectrum fd_eigensolve(const SpectralProblem& p, int k, bool want_vectors = false,
                              int seed = 0) {
    p.validate();
    const detail::Grid g = detail::make_grid(p.domain);
    const SpMat A_full = detail::assemble(g, p);

    SpMat B;
    const bool restricted = !p.sym.trivial();
    SpMat A = A_full;
    if (restricted) {
        B = detail::parity_basis(g, p.sym);
        A = SpMat(B.transpose() * (A_full * B).eval());
        A.makeCompressed();
    }
    const int n = static_cast<int>(A.rows());
    if (n < 1) throw std::runtime_error("fd_eigensolve: empty restricted space");
    k = std::min(k, n);

    Spectrum s;
    s.h = std::max(g.hx, g.hy);
    s.zero_tol = 10.0 * s.h * s.h;
    s.unknowns = n;

    std::vector<double> vals;
    std::vector<VectorXd> vecs;
    if (n <= 2200) {
        const MatrixXd Adense(A);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(Adense);
        for (int i = 0; i < k; ++i) {
            vals.push_back(es.eigenvalues()(i));
            if (want_vectors) vecs.push_back(es.eigenvectors().col(i));
        }
        s.converged = true;
        s.residual = 0.0;
        if (!want_vectors) vecs.clear();
    } else {
        double maxq = 0.0;
        if (p.catenoid_potential) maxq = 2.0;
        detail::lanczos_lowest(A, k, maxq + 1.0, seed, vals, vecs, s.converged, s.residual);
    }
    s.eigenvalues = vals;
    s.recount();
    if (want_vectors) {
        for (auto& v : vecs) s.vectors.push_back(restricted ? VectorXd(B * v) : v);
    }
    return s;
}

// Low Neumann spectrum of the catenoid rectangle from the transcendental
// families: the nonpositive eigenspace is spanned by the first t-even
// theta-invariant eigenfunction u1 and u1 sin(vartheta), with eigenvalues
// lambda_1 = -gamma^2 and lambda_1 + 1. For moderate T the latter sits within
// O(sech^2 T) of zero, far below any FD zero band, so the counts come from
// the closed forms while the FD solver cross-checks lambda_1 itself.
struct CatenoidNeumannCounts {
    int n_negative = 0;
    int n_zero = 0;
    double lambda1 = 0, lambda2 = 0;
};

inline CatenoidNeumannCounts catenoid_neumann_low_counts(double T) {
    const auto even = catenoid_closed_form(T, Family::NeumannTEven);
    if (even.empty()) throw std::runtime_error("catenoid_neumann_low_counts: no t-even root");
    CatenoidNeumannCounts c;
    c.lambda1 = even.front().lambda;
    c.lambda2 = c.lambda1 + 1.0;  // the u1 sin(vartheta) branch
    c.n_negative = (c.lambda1 < 0) + (c.lambda2 < 0);
    c.n_zero = (c.lambda1 == 0) + (c.lambda2 == 0);
    return c;
}

struct CountsReport {
    int n_negative = 0;
    int n_zero = 0;
    double lambda1 = 0, lambda2 = 0;
    double h = 0;
    bool oracle_checked = false;
    bool oracle_agrees = true;
    std::string detail;
};

// Negative/zero counts of a model problem with the closed-form cross-check
// where one exists (the catenoid rectangle families).
inline CountsReport model_low_spectrum_counts(const SpectralProblem& p, int k = 6, int seed = 0) {
    const Spectrum s = fd_eigensolve(p, k, false, seed);
    CountsReport rep;
    rep.n_negative = s.n_negative;
    rep.n_zero = s.n_zero;
    rep.lambda1 = s.eigenvalues.at(0);
    rep.lambda2 = s.eigenvalues.size() > 1 ? s.eigenvalues[1] : 0.0;
    rep.h = s.h;
    if (p.domain.kind == DomainKind::CatenoidRect && p.catenoid_potential &&
        p.bc_x0 == BC::Dirichlet && p.bc_x1 == BC::Dirichlet && p.bc_y0 == BC::Neumann &&
        p.bc_y1 == BC::Neumann && p.sym.trivial()) {
        const auto roots = catenoid_closed_form(p.domain.T, Family::DirichletTEven);
        if (!roots.empty()) {
            rep.oracle_checked = true;
            const double err = std::abs(rep.lambda1 - roots.front().lambda);
            rep.oracle_agrees = err < std::max(20.0 * s.h * s.h, 2e-3);
            rep.detail = "lambda1 fd vs closed form differs by " + std::to_string(err);
            if (!rep.oracle_agrees)
                throw std::runtime_error("model_low_spectrum_counts: oracle disagreement, " +
                                         rep.detail);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Spectral shift bound (min-max comparison of two data sets on one domain)
// ---------------------------------------------------------------------------

struct ShiftData {
    std::vector<Eigen::Matrix2d> g;  // metric samples on a common grid
    std::vector<double> q;           // Schroedinger potential samples
    std::vector<double> r;           // Robin potential samples on the Robin boundary
};

struct ShiftBound {
    double g_tilde = 0, q_tilde = 0, r_tilde = 0;
    double bound = 0;
};

inline ShiftBound spectral_shift_bound(const ShiftData& d1, const ShiftData& d2, double lambda_k,
                                       double C_trace, double C = 4.0, double eps = 0.1) {
    if (d1.g.size() != d2.g.size() || d1.q.size() != d2.q.size() || d1.r.size() != d2.r.size())
        throw std::invalid_argument("spectral_shift_bound: sample sets differ in size");
    ShiftBound out;
    for (std::size_t i = 0; i < d1.g.size(); ++i) {
        const Eigen::Matrix2d S = d1.g[i].inverse() * (d2.g[i] - d1.g[i]);
        const Eigen::Vector2cd ev = S.eigenvalues();
        out.g_tilde = std::max(out.g_tilde, std::max(std::abs(ev[0]), std::abs(ev[1])));
    }
    double q1max = 0, dq = 0, r1max = 0, dr = 0;
    for (std::size_t i = 0; i < d1.q.size(); ++i) {
        q1max = std::max(q1max, std::abs(d1.q[i]));
        dq = std::max(dq, std::abs(d2.q[i] - d1.q[i]));
    }
    for (std::size_t i = 0; i < d1.r.size(); ++i) {
        r1max = std::max(r1max, std::abs(d1.r[i]));
        dr = std::max(dr, std::abs(d2.r[i] - d1.r[i]));
    }
    if (out.g_tilde >= eps)
        throw std::domain_error("spectral_shift_bound: metric deviation exceeds the guard");
    out.q_tilde = out.g_tilde * q1max + dq;
    out.r_tilde = C_trace * (1.0 + C_trace * r1max) * (1.0 + q1max) * (out.g_tilde + dr);
    out.bound = lambda_k + C * (out.q_tilde + out.r_tilde) +
                C * lambda_k * (out.g_tilde + out.r_tilde);
    return out;
}

// ---------------------------------------------------------------------------
// Trace inequality probe
// ---------------------------------------------------------------------------

struct TraceProbeReport {
    double max_ratio = 0;
    double const_ratio = 0;      // u == 1
    double vanishing_ratio = 0;  // u suppressed near the Robin edges
    int n_samples = 0;
};

// Empirical maximum of (Robin-edge L^2) / (int |u||du| + u^2) over random
// Gaussian bumps; bounded by 2 for the model domains by the divergence
// theorem applied to u^2 sin(theta) d_theta resp. u^2 (s/3 - 1) d_s.
inline TraceProbeReport trace_probe(const ModelDomain& dom, int n_samples, int seed = 0) {
    if (dom.kind == DomainKind::Rectangle)
        throw std::invalid_argument("trace_probe: only the catenoid and perforated domains");
    const detail::Grid g = detail::make_grid(dom);

    struct Bump {
        double cx, cy, w, amp;
    };
    auto eval = [](const std::vector<Bump>& bumps, double x, double y, double& ux, double& uy) {
        double u = 0;
        ux = uy = 0;
        for (const auto& b : bumps) {
            const double dx = x - b.cx, dy = y - b.cy;
            const double e = b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.w * b.w));
            u += e;
            ux += -dx / (b.w * b.w) * e;
            uy += -dy / (b.w * b.w) * e;
        }
        return u;
    };

    auto ratio_of = [&](const std::vector<Bump>& bumps) {
        double area_int = 0, robin_int = 0;
        for (std::size_t a = 0; a < g.cells.size(); ++a) {
            const int i = g.cells[a] % g.nx, j = g.cells[a] / g.nx;
            double ux, uy;
            const double u = eval(bumps, g.cx(i), g.cy(j), ux, uy);
            area_int += (std::abs(u) * std::hypot(ux, uy) + u * u) * g.hx * g.hy;
        }
        if (dom.kind == DomainKind::CatenoidRect) {
            for (int i = 0; i < g.nx; ++i)
                for (double y : {dom.y0(), dom.y1()}) {
                    double ux, uy;
                    const double u = eval(bumps, g.cx(i), y, ux, uy);
                    robin_int += u * u * g.hx;
                }
        } else {
            for (int j = 0; j < g.ny; ++j) {
                const double y = g.cy(j);
                if (!dom.inside(0.0, y)) continue;
                double ux, uy;
                const double u = eval(bumps, 0.0, y, ux, uy);
                robin_int += u * u * g.hy;
            }
        }
        return robin_int / area_int;
    };

    TraceProbeReport rep;
    rep.n_samples = n_samples;
    rep.const_ratio = ratio_of({Bump{0, 0, 1e6, 1.0}});  // effectively constant
    rep.max_ratio = rep.const_ratio;

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux0(dom.x0(), dom.x1());
    std::uniform_real_distribution<double> uy0(dom.y0(), dom.y1());
    std::uniform_real_distribution<double> uw(0.04, 0.8);
    std::uniform_real_distribution<double> ua(0.2, 1.0);
    std::uniform_int_distribution<int> nb(1, 3);
    for (int s = 0; s < n_samples; ++s) {
        std::vector<Bump> bumps;
        const int n = nb(rng);
        for (int b = 0; b < n; ++b) {
            Bump bump{ux0(rng), uy0(rng), uw(rng), ua(rng)};
            if (b == 0 && s % 3 == 0) {
                // adversarial: concentrate on a Robin edge
                if (dom.kind == DomainKind::CatenoidRect)
                    bump.cy = (s % 2) ? dom.y0() : dom.y1();
                else
                    bump.cx = 0.0;
                bump.w = std::min(bump.w, 0.15);
            }
            bumps.push_back(bump);
        }
        rep.max_ratio = std::max(rep.max_ratio, ratio_of(bumps));
    }
    {
        // candidate vanishing near the Robin edges
        std::vector<Bump> bumps{Bump{0.5 * (dom.x0() + dom.x1()), 0.0, 0.1, 1.0}};
        if (dom.kind != DomainKind::CatenoidRect) bumps[0].cx = 2.0;
        rep.vanishing_ratio = ratio_of(bumps);
    }
    return rep;
}

}  // namespace fbms::spectra
