#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "emz/errors.hpp"
#include "emz/numerics.hpp"

namespace emz {

using cd = std::complex<double>;

inline cd i_pow(int n) {
    static const cd table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((n % 4) + 4) % 4];
}

// Shin-Zettl coefficient matrix of order n on a compact interval, with
// entries sampled on a uniform grid:
//   (i)   entries locally integrable (finite samples),
//   (ii)  a_{r,r+1} non-vanishing at every node, r = 1..n-1,
//   (iii) a_{rs} identically zero for s >= r+2.
class ShinZettlMatrix {
public:
    ShinZettlMatrix(int n, double a, double b, int nodes = 401)
        : n_(n), a_(a), b_(b),
          entries_(n, std::vector<std::vector<cd>>(n, std::vector<cd>(nodes, cd(0, 0)))) {
        if (n < 2) throw InvalidMatrix("Shin-Zettl order must be >= 2");
        if (!(a < b)) throw InvalidMatrix("Shin-Zettl interval requires a < b");
        if (nodes < 2) throw InvalidMatrix("Shin-Zettl grid needs >= 2 nodes");
    }

    static ShinZettlMatrix constant(int n, double a, double b,
                                    const std::vector<std::vector<cd>>& m, int nodes = 401) {
        ShinZettlMatrix out(n, a, b, nodes);
        if (static_cast<int>(m.size()) != n)
            throw InvalidMatrix("constant matrix has wrong order");
        for (int r = 0; r < n; ++r) {
            if (static_cast<int>(m[r].size()) != n)
                throw InvalidMatrix("constant matrix has wrong order");
            for (int s = 0; s < n; ++s)
                out.entries_[r][s].assign(nodes, m[r][s]);
        }
        return out;
    }

    int order() const { return n_; }
    double lo() const { return a_; }
    double hi() const { return b_; }
    int nodes() const { return static_cast<int>(entries_[0][0].size()); }
    double grid_x(int node) const { return a_ + node * (b_ - a_) / (nodes() - 1); }

    const std::vector<cd>& samples(int r, int s) const { return entries_[r][s]; }
    void set_samples(int r, int s, std::vector<cd> v) {
        if (static_cast<int>(v.size()) != nodes())
            throw InvalidMatrix("sample count does not match the grid");
        entries_[r][s] = std::move(v);
    }
    void set_sample(int r, int s, int node, cd v) { entries_[r][s][node] = v; }
    void set_entry(int r, int s, const std::function<cd(double)>& f) {
        for (int j = 0; j < nodes(); ++j) entries_[r][s][j] = f(grid_x(j));
    }

    cd eval(int r, int s, double x) const {
        const double h = (b_ - a_) / (nodes() - 1);
        return num::cubic_interp(entries_[r][s], a_, h, x);
    }

private:
    int n_;
    double a_, b_;
    std::vector<std::vector<std::vector<cd>>> entries_; // [r][s][node]
};

struct SzViolation {
    std::string condition; // "i", "ii" or "iii"
    int row, col;          // 1-indexed
    int node;
    double x;
    std::string message;
};

inline std::vector<SzViolation> validate_shin_zettl(const ShinZettlMatrix& A) {
    std::vector<SzViolation> out;
    const int n = A.order();
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            for (int j = 0; j < A.nodes(); ++j) {
                const cd v = A.samples(r, s)[j];
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    out.push_back({"i", r + 1, s + 1, j, A.grid_x(j),
                                   "entry not locally integrable (non-finite sample)"});
                    break;
                }
            }
    for (int r = 0; r + 1 < n; ++r)
        for (int j = 0; j < A.nodes(); ++j)
            if (std::abs(A.samples(r, r + 1)[j]) == 0.0)
                out.push_back({"ii", r + 1, r + 2, j, A.grid_x(j),
                               "superdiagonal entry vanishes at a grid node"});
    for (int r = 0; r + 2 < n; ++r)
        for (int s = r + 2; s < n; ++s)
            for (int j = 0; j < A.nodes(); ++j)
                if (A.samples(r, s)[j] != cd(0, 0)) {
                    out.push_back({"iii", r + 1, s + 1, j, A.grid_x(j),
                                   "entry above the first superdiagonal must vanish"});
                    break;
                }
    return out;
}

// Lagrange adjoint A+ = -L^{-1} A* L, computed nodewise. L is the
// anti-diagonal sign matrix l_{r,n+1-r} = (-1)^{r-1}.
inline ShinZettlMatrix lagrange_adjoint(const ShinZettlMatrix& A) {
    if (!validate_shin_zettl(A).empty())
        throw InvalidMatrix("lagrange_adjoint: input violates Shin-Zettl conditions");
    const int n = A.order();
    std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> Linv(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        const double v = (r % 2 == 0) ? 1.0 : -1.0;
        L[r][n - 1 - r] = v;
        Linv[n - 1 - r][r] = 1.0 / v;
    }
    ShinZettlMatrix out(n, A.lo(), A.hi(), A.nodes());
    std::vector<std::vector<cd>> m(n, std::vector<cd>(n)), t(n, std::vector<cd>(n));
    for (int j = 0; j < A.nodes(); ++j) {
        // t = A*(x) L  with A* the conjugate transpose
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
                cd acc(0, 0);
                for (int q = 0; q < n; ++q)
                    acc += std::conj(A.samples(q, r)[j]) * L[q][s];
                t[r][s] = acc;
            }
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
                cd acc(0, 0);
                for (int q = 0; q < n; ++q) acc += Linv[r][q] * t[q][s];
                m[r][s] = -acc;
            }
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s)
                out.set_sample(r, s, j, m[r][s]);
    }
    return out;
}

inline double max_nodewise_diff(const ShinZettlMatrix& A, const ShinZettlMatrix& B) {
    double d = 0.0;
    for (int r = 0; r < A.order(); ++r)
        for (int s = 0; s < A.order(); ++s)
            for (int j = 0; j < A.nodes(); ++j)
                d = std::max(d, std::abs(A.samples(r, s)[j] - B.samples(r, s)[j]));
    return d;
}

inline bool lagrange_symmetric(const ShinZettlMatrix& A, double tol = 1e-12) {
    return max_nodewise_diff(A, lagrange_adjoint(A)) < tol;
}

// Quasi-derivative vector (f^[0], ..., f^[n-1]) sampled along the grid, with
// f^[n] attached per node. Produced by integrating the first-order linear
// system implied by the quasi-derivative recursion.
struct QuasiDerivTrajectory {
    int order = 0;
    double x0 = 0.0, x1 = 1.0;
    std::vector<double> grid;
    std::vector<std::vector<cd>> values; // [node][r], r = 0..n-1
    std::vector<cd> final_qd;            // f^[n] per node
    double step_error_estimate = 0.0;

    cd value(int node, int r) const { return values[node][r]; }
    cd f(int node) const { return values[node][0]; }
    // M_A[f](x) = i^n f^[n](x)
    cd m_expr(int node) const { return i_pow(order) * final_qd[node]; }

    cd eval(double x, int r) const {
        std::vector<cd> col(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) col[j] = values[j][r];
        const double h = (x1 - x0) / (static_cast<double>(grid.size()) - 1.0);
        return num::cubic_interp(col, x0, h, x);
    }
};

// Integrates the quasi-derivative system for A on [x0, x1] (defaults to the
// full matrix interval) with the classical RK4 scheme. The forcing term rhs
// is f^[n]; zero forcing integrates the kernel of M_A. A Richardson
// step-doubling estimate guards the step size.
inline QuasiDerivTrajectory integrate_quasi_derivatives(
    const ShinZettlMatrix& A, const std::vector<cd>& initial,
    const std::function<cd(double)>& rhs = {}, int steps = 400, double tol_ode = 1e-10,
    double x0 = std::nan(""), double x1 = std::nan("")) {
    const int n = A.order();
    if (static_cast<int>(initial.size()) != n)
        throw InvalidMatrix("initial vector size must equal the matrix order");
    if (!validate_shin_zettl(A).empty())
        throw InvalidMatrix("integrate_quasi_derivatives: invalid Shin-Zettl matrix");
    if (std::isnan(x0)) x0 = A.lo();
    if (std::isnan(x1)) x1 = A.hi();
    if (!(x0 < x1) || x0 < A.lo() - 1e-12 || x1 > A.hi() + 1e-12)
        throw InvalidMatrix("integration range must be a subinterval of the matrix interval");

    auto deriv = [&](double x, const std::vector<cd>& y, std::vector<cd>& dy) {
        for (int r = 0; r < n; ++r) {
            cd acc(0, 0);
            for (int s = 0; s <= r; ++s) acc += A.eval(r, s, x) * y[s];
            if (r + 1 < n) acc += A.eval(r, r + 1, x) * y[r + 1];
            else acc += rhs ? rhs(x) : cd(0, 0);
            dy[r] = acc;
        }
    };

    auto coarse = num::rk4_integrate(deriv, initial, x0, x1, steps);
    auto fine = num::rk4_integrate(deriv, initial, x0, x1, 2 * steps);
    double err = 0.0;
    for (int j = 0; j <= steps; ++j)
        for (int r = 0; r < n; ++r)
            err = std::max(err, std::abs(coarse[j][r] - fine[2 * j][r]));
    err /= 15.0;
    if (err > tol_ode)
        throw StepSizeTooCoarse("RK4 step-doubling estimate " + std::to_string(err) +
                                " exceeds tol_ode");

    QuasiDerivTrajectory t;
    t.order = n;
    t.x0 = x0;
    t.x1 = x1;
    t.step_error_estimate = err;
    t.grid.resize(steps + 1);
    t.values.resize(steps + 1);
    t.final_qd.resize(steps + 1);
    for (int j = 0; j <= steps; ++j) {
        t.grid[j] = x0 + (x1 - x0) * j / steps;
        t.values[j] = fine[2 * j]; // keep the half-step solution
        t.final_qd[j] = rhs ? rhs(t.grid[j]) : cd(0, 0);
    }
    return t;
}

// Boundary bilinear form [f,g]_A(x) = i^n sum (-1)^{i-1} f^[i-1] conj(g^[n-i]),
// with g integrated relative to the Lagrange adjoint matrix.
inline cd lagrange_bracket(const QuasiDerivTrajectory& f, const QuasiDerivTrajectory& g,
                           int node) {
    const int n = f.order;
    cd acc(0, 0);
    for (int i = 1; i <= n; ++i) {
        const cd term = f.values[node][i - 1] * std::conj(g.values[node][n - i]);
        acc += (i % 2 == 1) ? term : -term;
    }
    return i_pow(n) * acc;
}

struct LagrangeCheck {
    double residual = 0.0;
    cd integral{0, 0};
    cd bracket_delta{0, 0};
    bool symmetric_input = true;
};

// Quadrature verification of the Lagrange identity on [alpha, beta]:
//   integral of (conj(g) M_A[f] - f conj(M_{A+}[g]))  ==  [f,g](beta) - [f,g](alpha).
// f and g are specified by initial quasi-derivative vectors at alpha plus
// optional forcings f^[n], g^[n].
inline LagrangeCheck verify_lagrange_identity(
    const ShinZettlMatrix& A, const std::vector<cd>& f_init, const std::vector<cd>& g_init,
    double alpha, double beta, int panels = 10000,
    const std::function<cd(double)>& f_rhs = {}, const std::function<cd(double)>& g_rhs = {},
    double tol_ode = 1e-10) {
    if (panels < 1) throw QuadratureFailure("verify_lagrange_identity: panels must be >= 1");
    if (!(alpha < beta) || alpha < A.lo() - 1e-12 || beta > A.hi() + 1e-12)
        throw QuadratureFailure("verify_lagrange_identity: [alpha,beta] not inside the interval");

    const ShinZettlMatrix Aplus = lagrange_adjoint(A);
    LagrangeCheck out;
    out.symmetric_input = max_nodewise_diff(A, Aplus) < 1e-12;

    const int steps = 2 * panels;
    auto f = integrate_quasi_derivatives(A, f_init, f_rhs, steps, tol_ode, alpha, beta);
    auto g = integrate_quasi_derivatives(Aplus, g_init, g_rhs, steps, tol_ode, alpha, beta);

    std::vector<cd> integrand(steps + 1);
    for (int j = 0; j <= steps; ++j)
        integrand[j] = std::conj(g.f(j)) * f.m_expr(j) - f.f(j) * std::conj(g.m_expr(j));
    const double h = (beta - alpha) / steps;
    out.integral = num::simpson_samples(integrand, h);
    out.bracket_delta = lagrange_bracket(f, g, steps) - lagrange_bracket(f, g, 0);
    out.residual = std::abs(out.integral - out.bracket_delta);
    if (!std::isfinite(out.residual))
        throw QuadratureFailure("verify_lagrange_identity: non-finite result");
    return out;
}

} // namespace emz
