#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fbms {

// Smooth two-sided bump built from e^{-1/s}: identically 1 for x <= 1,
// identically 0 for x >= 2, strictly monotone and C^infinity in between.
inline double smooth_step_raw(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

inline double smooth_bump(double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    const double a = smooth_step_raw(2.0 - x);
    const double b = smooth_step_raw(x - 1.0);
    return a / (a + b);
}

// arcosh via log with a guard against arguments dipping below 1 by roundoff.
inline double arcosh(double y) {
    if (y < 1.0) {
        if (y > 1.0 - 1e-12) return 0.0;
        throw std::domain_error("arcosh: argument " + std::to_string(y) + " < 1");
    }
    return std::log(y + std::sqrt(y * y - 1.0));
}

// Bracketed bisection; requires a sign change on [a,b].
// Returns the midpoint once |b-a| <= tol.
template <class F>
double bisect(const F& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0))
        throw std::invalid_argument("bisect: no sign change in bracket");
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Scan [a,b] with n samples and bisect every sign-change interval.
template <class F>
std::vector<double> find_roots(const F& f, double a, double b, int n = 2000, double tol = 1e-12) {
    std::vector<double> roots;
    double prev_x = a;
    double prev_f = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x = a + (b - a) * double(i) / double(n);
        const double fx = f(x);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if (fx != 0.0 && (fx < 0.0) != (prev_f < 0.0)) {
            roots.push_back(bisect(f, prev_x, x, tol));
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

// Central difference with one Richardson step: error O(h^4).
template <class F>
double deriv1(const F& f, double x, double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

template <class F>
double deriv2(const F& f, double x, double h) {
    const double c = f(x);
    const double d1 = (f(x + h) - 2.0 * c + f(x - h)) / (h * h);
    const double d2 = (f(x + h / 2) - 2.0 * c + f(x - h / 2)) / (h * h / 4.0);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace fbms
