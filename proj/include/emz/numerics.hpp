#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "emz/errors.hpp"

namespace emz::num {

using cd = std::complex<double>;

// Composite Simpson rule over 2m+1 equispaced samples (m panels).
template <typename T>
T simpson_samples(const std::vector<T>& y, double h) {
    if (y.size() < 3 || y.size() % 2 == 0)
        throw QuadratureFailure("simpson needs an odd sample count >= 3");
    T acc = y.front() + y.back();
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        acc += y[i] * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

template <typename F>
auto simpson(F&& f, double a, double b, int panels) {
    if (panels < 1) throw QuadratureFailure("simpson needs at least one panel");
    const int n = 2 * panels;
    const double h = (b - a) / n;
    using T = decltype(f(a));
    std::vector<T> y(n + 1);
    for (int i = 0; i <= n; ++i) y[i] = f(a + i * h);
    return simpson_samples(y, h);
}

// Bisection on a bracketing interval; f(lo) and f(hi) must have opposite signs.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw QuadratureFailure("bisect: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else                       { hi = mid; }
    }
    return 0.5 * (lo + hi);
}

// Scan [lo, hi] with n_scan panels for sign changes and refine each by bisection.
template <typename F>
std::vector<double> find_roots(F&& f, double lo, double hi, int n_scan, double tol = 1e-12) {
    std::vector<double> roots;
    double x0 = lo, f0 = f(lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double x1 = lo + (hi - lo) * i / n_scan;
        const double f1 = f(x1);
        if (f0 == 0.0) roots.push_back(x0);
        else if ((f0 > 0) != (f1 > 0)) roots.push_back(bisect(f, x0, x1, tol));
        x0 = x1; f0 = f1;
    }
    if (f0 == 0.0) roots.push_back(x0);
    return roots;
}

// Local 4-point Lagrange cubic interpolation on a uniform grid.
template <typename T>
T cubic_interp(const std::vector<T>& y, double a, double h, double x) {
    const int n = static_cast<int>(y.size());
    if (n == 0) throw QuadratureFailure("cubic_interp: empty samples");
    if (n == 1) return y[0];
    if (n < 4) { // fall back to linear
        int i = std::clamp(static_cast<int>((x - a) / h), 0, n - 2);
        const double t = (x - a) / h - i;
        return y[i] * (1.0 - t) + y[i + 1] * t;
    }
    int i = static_cast<int>(std::floor((x - a) / h)) - 1;
    i = std::clamp(i, 0, n - 4);
    const double t = (x - a) / h - i; // position relative to node i, in [0,3] nominally
    const double c0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    const double c1 = t * (t - 2) * (t - 3) / 2.0;
    const double c2 = -t * (t - 1) * (t - 3) / 2.0;
    const double c3 = t * (t - 1) * (t - 2) / 6.0;
    return y[i] * c0 + y[i + 1] * c1 + y[i + 2] * c2 + y[i + 3] * c3;
}

// Classical RK4 for a linear complex first-order system y' = f(x, y).
// Returns states at the n_steps+1 uniform nodes of [a, b].
inline std::vector<std::vector<cd>> rk4_integrate(
    const std::function<void(double, const std::vector<cd>&, std::vector<cd>&)>& deriv,
    const std::vector<cd>& y0, double a, double b, int n_steps) {
    const double h = (b - a) / n_steps;
    const std::size_t dim = y0.size();
    std::vector<std::vector<cd>> out(n_steps + 1, std::vector<cd>(dim));
    out[0] = y0;
    std::vector<cd> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (int s = 0; s < n_steps; ++s) {
        const double x = a + s * h;
        const auto& y = out[s];
        deriv(x, y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        deriv(x + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        deriv(x + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
        deriv(x + h, tmp, k4);
        auto& yn = out[s + 1];
        for (std::size_t i = 0; i < dim; ++i)
            yn[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

// Deterministic uniform doubles in [0,1) from raw engine bits; the standard
// distributions are implementation-defined and would break byte-stable reports.
inline double uniform01(std::mt19937_64& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Eigenvalues of a Hermitian complex matrix via its real-symmetric 2n x 2n
// embedding [[Re, -Im], [Im, Re]] (each eigenvalue appears twice).
inline std::vector<double> hermitian_eigenvalues(const std::vector<std::vector<cd>>& h) {
    const std::size_t n = h.size();
    std::vector<std::vector<double>> a(2 * n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = h[i][j].real();
            a[i][j + n] = -h[i][j].imag();
            a[i + n][j] = h[i][j].imag();
            a[i + n][j + n] = h[i][j].real();
        }
    auto ev2 = symmetric_eigenvalues(std::move(a));
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = ev2[2 * i]; // doubled spectrum
    return ev;
}

} // namespace emz::num
