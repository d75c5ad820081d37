#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

#include "fbms/numerics.hpp"

namespace fbms::balance {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Projection onto the mirror-symmetric (+) or mirror-antisymmetric (-)
// subspace under index reversal v_i <-> v_{d+1-i}.
inline VectorXd mirror_project(const VectorXd& v, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("mirror_project: sign must be +-1");
    VectorXd out(v.size());
    const Eigen::Index d = v.size();
    for (Eigen::Index i = 0; i < d; ++i) out[i] = 0.5 * (v[i] + sign * v[d - 1 - i]);
    return out;
}

inline bool in_mirror_class(const VectorXd& v, int sign, double tol = 1e-12) {
    return (v - mirror_project(v, sign)).cwiseAbs().maxCoeff() <= tol * std::max(1.0, v.cwiseAbs().maxCoeff());
}

// Free data of the construction: N layers, m-fold symmetry, and the
// (N-1)-dimensional waist-size and waist-height adjustment parameters.
struct StackingParams {
    int N = 2;
    int m = 10;
    VectorXd zeta;  // mirror-even, adjusts waist radii
    VectorXd xi;    // mirror-odd, adjusts waist heights (dislocations)

    static StackingParams make(int N, int m, VectorXd zeta = {}, VectorXd xi = {}) {
        StackingParams p;
        p.N = N;
        p.m = m;
        p.zeta = zeta.size() ? zeta : VectorXd::Zero(N - 1);
        p.xi = xi.size() ? xi : VectorXd::Zero(N - 1);
        p.validate();
        return p;
    }

    void validate() const {
        if (N < 2) throw std::invalid_argument("StackingParams: N must be >= 2");
        if (m < 3) throw std::invalid_argument("StackingParams: m must be >= 3");
        if (zeta.size() != N - 1 || xi.size() != N - 1)
            throw std::invalid_argument("StackingParams: zeta/xi must have length N-1");
        if (!in_mirror_class(zeta, +1)) throw std::invalid_argument("StackingParams: zeta not mirror-even");
        if (!in_mirror_class(xi, -1)) throw std::invalid_argument("StackingParams: xi not mirror-odd");
    }
};

// Perron data of the tridiagonal 0/1 matrix B: the positive eigenvector
// normalized by x_n = 1 and the top eigenvalue lambda < 2.
struct WaistRatios {
    VectorXd x;      // length N-1, mirror-even, increasing up to x_n = 1
    double lambda = 0.0;
};

inline WaistRatios limiting_waist_ratios(int N) {
    if (N < 2) throw std::invalid_argument("limiting_waist_ratios: N must be >= 2");
    const int d = N - 1;
    const int n = N / 2;

    // shifted power iteration on I + B keeps everything positive
    VectorXd v = VectorXd::Ones(d);
    double lambda_shifted = 2.0;
    for (int it = 0; it < 200000; ++it) {
        VectorXd w(d);
        for (int i = 0; i < d; ++i) {
            double acc = v[i];
            if (i > 0) acc += v[i - 1];
            if (i + 1 < d) acc += v[i + 1];
            w[i] = acc;
        }
        const double nrm = w.norm();
        w /= nrm;
        const double delta = (w - v).norm();
        v = w;
        lambda_shifted = nrm;
        if (delta < 1e-15 && it > 8) break;
    }
    WaistRatios r;
    r.lambda = lambda_shifted - 1.0;
    r.x = v / v[n - 1];
    // symmetrize away the last drops of iteration error
    r.x = mirror_project(r.x, +1);
    r.lambda = 0.0;
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        if (i > 0) acc += r.x[i - 1];
        if (i + 1 < d) acc += r.x[i + 1];
        r.lambda += acc * r.x[i];
    }
    r.lambda /= r.x.squaredNorm();
    return r;
}

// Residual of the balancing relation x_{i-1} + x_{i+1} = 2 (x_{n-1} + N mod 2)/(1 + N mod 2) x_i
// with x_0 = x_N = 0.
inline double balancing_residual(int N, const VectorXd& x) {
    const int d = N - 1;
    const int n = N / 2;
    const double xn1 = (n - 2 >= 0) ? x[n - 2] : 0.0;  // x_{n-1}, zero when n = 1
    const double par = N % 2;
    const double coef = 2.0 * (xn1 + par) / (1.0 + par);
    double res = 0.0;
    for (int i = 0; i < d; ++i) {
        double lhs = 0.0;
        if (i > 0) lhs += x[i - 1];
        if (i + 1 < d) lhs += x[i + 1];
        res = std::max(res, std::abs(lhs - coef * x[i]));
    }
    return res;
}

// The full deterministic parameter chain (N,m,zeta,xi) -> geometry data.
struct DerivedParams {
    int N = 0, m = 0, n = 0;
    VectorXd x;         // limiting waist ratios, length N-1
    double lambda = 0;  // Perron eigenvalue
    VectorXd taubar;    // length N-1
    VectorXd tau;       // length N-1
    VectorXd a;         // a_i = arcosh(1/(2 m tau_i))
    VectorXd delta_hK;  // vertical extent of each catenoidal ribbon
    VectorXd disloc;    // length N, zero at the ends
    VectorXd hK;        // waist heights, length N-1, mirror-odd
    VectorXd hB;        // disc heights, length N, mirror-odd

    double matching_residual() const {
        double res = 0.0;
        for (int i = 1; i <= N - 1; ++i)
            res = std::max(res, std::abs((hK[i - 1] - hB[i - 1]) -
                                         (0.5 * delta_hK[i - 1] + disloc[i - 1])));
        for (int i = 2; i <= N; ++i)
            res = std::max(res, std::abs((hB[i - 1] - hK[i - 2]) -
                                         (0.5 * delta_hK[i - 2] + disloc[i - 1])));
        return res;
    }
};

inline DerivedParams derived_parameters(const StackingParams& p) {
    p.validate();
    DerivedParams d;
    d.N = p.N;
    d.m = p.m;
    d.n = p.N / 2;
    const WaistRatios wr = limiting_waist_ratios(p.N);
    d.x = wr.x;
    d.lambda = wr.lambda;

    const int K = p.N - 1;
    const double par = p.N % 2;
    const double xn1 = (d.n - 2 >= 0) ? d.x[d.n - 2] : 0.0;  // x_{n-1} with x_0 = 0
    d.taubar.resize(K);
    d.tau.resize(K);
    d.a.resize(K);
    d.delta_hK.resize(K);
    for (int i = 0; i < K; ++i) {
        d.taubar[i] = d.x[i] / p.m * std::exp((xn1 - 1.0) / (1.0 + par) * p.m / 2.0);
        d.tau[i] = d.taubar[i] * std::exp(p.zeta[d.n - 1] + p.zeta[i] / p.m);
        const double y = 1.0 / (p.m * d.tau[i]);
        if (y <= 1.0)
            throw std::domain_error("derived_parameters: m too small, 1/(m tau) <= 1 at ribbon " +
                                    std::to_string(i + 1));
        // the ribbon chart is empty when tau exceeds 1/(2m)
        d.a[i] = (0.5 * y >= 1.0) ? fbms::arcosh(0.5 * y) : 0.0;
        d.delta_hK[i] = 2.0 * d.tau[i] * fbms::arcosh(y);
    }

    d.disloc = VectorXd::Zero(p.N);
    for (int i = 2; i <= p.N - 1; ++i)
        d.disloc[i - 1] = 0.5 * (p.xi[i - 1] - p.xi[i - 2]) * d.tau[d.n - 1];

    // heights propagate outward from the parity anchor:
    // N even -> hK_n = 0, N odd -> hB_{n+1} = 0
    d.hK = VectorXd::Zero(K);
    d.hB = VectorXd::Zero(p.N);
    auto delta = [&](int i) { return d.delta_hK[i - 1]; };  // 1-based
    auto dis = [&](int i) { return d.disloc[i - 1]; };
    if (p.N % 2 == 0) {
        d.hK[d.n - 1] = 0.0;
        for (int i = d.n; i >= 1; --i) {
            d.hB[i - 1] = d.hK[i - 1] - 0.5 * delta(i) - dis(i);
            if (i - 1 >= 1) d.hK[i - 2] = d.hB[i - 1] - 0.5 * delta(i - 1) - dis(i);
        }
        for (int i = d.n; i <= p.N - 1; ++i) {
            d.hB[i] = d.hK[i - 1] + 0.5 * delta(i) + dis(i + 1);
            if (i + 1 <= p.N - 1) d.hK[i] = d.hB[i] + 0.5 * delta(i + 1) + dis(i + 1);
        }
    } else {
        d.hB[d.n] = 0.0;  // hB_{n+1}
        for (int i = d.n; i >= 1; --i) {
            d.hK[i - 1] = d.hB[i] - 0.5 * delta(i) - dis(i + 1);
            d.hB[i - 1] = d.hK[i - 1] - 0.5 * delta(i) - dis(i);
        }
        for (int i = d.n + 1; i <= p.N - 1; ++i) {
            d.hK[i - 1] = d.hB[i - 1] + 0.5 * delta(i) + dis(i);
            d.hB[i] = d.hK[i - 1] + 0.5 * delta(i) + dis(i + 1);
        }
    }

    if (d.matching_residual() > 1e-14 * std::max(1.0, d.hB.cwiseAbs().maxCoeff()))
        throw std::runtime_error("derived_parameters: matching residual too large");
    return d;
}

// Leading-order vertical forces F_i = 2 pi hB_i + m pi tau_i - m pi tau_{i-1}
// (tau_0 = tau_N = 0) and the rescaled differences Ftilde.
struct PredictedForces {
    VectorXd F;       // length N, mirror-odd
    VectorXd Ftilde;  // length N-1
};

inline PredictedForces predicted_forces(const DerivedParams& d) {
    PredictedForces out;
    out.F.resize(d.N);
    for (int i = 1; i <= d.N; ++i) {
        const double tau_i = (i <= d.N - 1) ? d.tau[i - 1] : 0.0;
        const double tau_im1 = (i >= 2) ? d.tau[i - 2] : 0.0;
        out.F[i - 1] = 2.0 * M_PI * d.hB[i - 1] + d.m * M_PI * tau_i - d.m * M_PI * tau_im1;
    }
    out.Ftilde.resize(d.N - 1);
    const double taun = d.tau[d.n - 1];
    for (int i = 1; i <= d.N - 1; ++i)
        out.Ftilde[i - 1] =
            ((out.F[i] - out.F[i - 1]) - 2.0 * (d.disloc[i - 1] + d.disloc[i])) / (M_PI * taun);
    return out;
}

namespace detail {

// Orthonormal basis (as columns) of the mirror class of R^d.
inline MatrixXd mirror_basis(int d, int sign) {
    const int dim = (sign > 0) ? (d + 1) / 2 : d / 2;
    MatrixXd B = MatrixXd::Zero(d, dim);
    int col = 0;
    for (int i = 0; i < (d + 1) / 2; ++i) {
        const int j = d - 1 - i;
        if (i == j) {
            if (sign > 0) B(i, col++) = 1.0;
        } else {
            B(i, col) = 1.0 / std::sqrt(2.0);
            B(j, col) = sign / std::sqrt(2.0);
            ++col;
        }
    }
    return B;
}

// Basis of { v in R^d : v_1 = v_d = 0, v mirror-even }.
inline MatrixXd zero_ends_even_basis(int d) {
    const MatrixXd Beven = mirror_basis(d, +1);
    MatrixXd B(d, 0);
    for (int c = 0; c < Beven.cols(); ++c) {
        if (std::abs(Beven(0, c)) > 0 || std::abs(Beven(d - 1, c)) > 0) continue;
        B.conservativeResize(d, B.cols() + 1);
        B.col(B.cols() - 1) = Beven.col(c);
    }
    return B;
}

}  // namespace detail

// The linear map P controlling forces and dislocations:
// P(zeta, xi) = ( T|^{-1}( pi F T zeta - 4 pi zeta_n x + S T00 xi ), (1/2) T00 xi ).
// Domain: mirror-even (zeta) + mirror-odd (xi) pieces of R^{N-1};
// target: mirror-odd R^N + zero-ended mirror-even R^N.
struct CokerMap {
    int N = 0;
    MatrixXd S;      // (N-1) x N,     (Sv)_i = v_i + v_{i+1}
    MatrixXd T;      // (N-1) x N,     (Tv)_i = v_{i+1} - v_i
    MatrixXd Tz;     // (N-2) x (N-1), same difference map one size down
    MatrixXd T00;    // N x (N-1),     zero-padded differences
    MatrixXd F;      // (N-1) x (N-2), (Fv)_i = -x_{i-1} v_{i-1} + x_{i+1} v_i
    MatrixXd P;      // (N-1) x (N-1) in the symmetric-subspace bases
    MatrixXd basis_zeta, basis_xi, basis_force, basis_disloc;
    double norm_P = 0.0;
    double norm_P_inv = 0.0;

    // Apply to full-length (zeta, xi); returns (force part in R^N, dislocation part in R^N).
    std::pair<VectorXd, VectorXd> apply(const VectorXd& zeta, const VectorXd& xi) const {
        VectorXd coords(P.cols());
        coords << basis_zeta.transpose() * zeta, basis_xi.transpose() * xi;
        const VectorXd out = P * coords;
        const int nf = static_cast<int>(basis_force.cols());
        return {basis_force * out.head(nf), basis_disloc * out.tail(out.size() - nf)};
    }
};

inline CokerMap coker_map(int N, const VectorXd& x) {
    if (N < 2) throw std::invalid_argument("coker_map: N must be >= 2");
    if (x.size() != N - 1) throw std::invalid_argument("coker_map: x must have length N-1");
    const int n = N / 2;
    CokerMap cm;
    cm.N = N;

    cm.S = MatrixXd::Zero(N - 1, N);
    cm.T = MatrixXd::Zero(N - 1, N);
    for (int i = 0; i < N - 1; ++i) {
        cm.S(i, i) = 1.0;
        cm.S(i, i + 1) = 1.0;
        cm.T(i, i) = -1.0;
        cm.T(i, i + 1) = 1.0;
    }
    cm.Tz = MatrixXd::Zero(std::max(N - 2, 0), N - 1);
    for (int i = 0; i < N - 2; ++i) {
        cm.Tz(i, i) = -1.0;
        cm.Tz(i, i + 1) = 1.0;
    }
    cm.T00 = MatrixXd::Zero(N, N - 1);
    for (int i = 2; i <= N - 1; ++i) {
        cm.T00(i - 1, i - 1) = 1.0;
        cm.T00(i - 1, i - 2) = -1.0;
    }
    // (Fv)_i = -x_{i-1} v_{i-1} + x_{i+1} v_i with x_0 = v_0 = x_N = v_{N-1} = 0
    cm.F = MatrixXd::Zero(N - 1, std::max(N - 2, 0));
    for (int i = 1; i <= N - 1; ++i) {
        if (i - 1 >= 1 && i - 2 < N - 2) cm.F(i - 1, i - 2) = -x[i - 2];
        if (i < N - 1 && i - 1 < N - 2) cm.F(i - 1, i - 1) = x[i];
    }

    cm.basis_zeta = detail::mirror_basis(N - 1, +1);
    cm.basis_xi = detail::mirror_basis(N - 1, -1);
    cm.basis_force = detail::mirror_basis(N, -1);
    cm.basis_disloc = detail::zero_ends_even_basis(N);

    // T restricted to mirror-odd R^N is a bijection onto mirror-even R^{N-1}
    const MatrixXd Beven = detail::mirror_basis(N - 1, +1);
    const MatrixXd Trestr = Beven.transpose() * cm.T * cm.basis_force;  // n x n
    Eigen::FullPivLU<MatrixXd> lu(Trestr);
    if (!lu.isInvertible())
        throw std::runtime_error("coker_map: restricted difference map is singular");

    const int dz = static_cast<int>(cm.basis_zeta.cols());
    const int dx = static_cast<int>(cm.basis_xi.cols());
    const int nf = static_cast<int>(cm.basis_force.cols());
    const int nd = static_cast<int>(cm.basis_disloc.cols());
    cm.P = MatrixXd::Zero(nf + nd, dz + dx);
    for (int c = 0; c < dz + dx; ++c) {
        const VectorXd zeta =
            (c < dz) ? VectorXd(cm.basis_zeta.col(c)) : VectorXd(VectorXd::Zero(N - 1));
        const VectorXd xi =
            (c < dz) ? VectorXd(VectorXd::Zero(N - 1)) : VectorXd(cm.basis_xi.col(c - dz));
        const double zeta_n = zeta[n - 1];
        const VectorXd rhs = M_PI * (cm.F * (cm.Tz * zeta)) - 4.0 * M_PI * zeta_n * x +
                             cm.S * (cm.T00 * xi);
        const VectorXd force_part = cm.basis_force * lu.solve(Beven.transpose() * rhs);
        const VectorXd disloc_part = 0.5 * (cm.T00 * xi);
        cm.P.block(0, c, nf, 1) = cm.basis_force.transpose() * force_part;
        cm.P.block(nf, c, nd, 1) = cm.basis_disloc.transpose() * disloc_part;
    }

    Eigen::JacobiSVD<MatrixXd> svd(cm.P);
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 1e-13)
        throw std::runtime_error("coker_map: P is singular (construction bug)");
    cm.norm_P = svd.singularValues().maxCoeff();
    cm.norm_P_inv = 1.0 / smin;
    return cm;
}

}  // namespace fbms::balance
