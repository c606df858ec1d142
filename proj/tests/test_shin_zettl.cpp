#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "emz/shin_zettl.hpp"

using namespace emz;

namespace {

// A = [[0,1],[0,0]] on [0,1]: the classical -f'' expression.
ShinZettlMatrix classical(double a = 0.0, double b = 1.0, int nodes = 401) {
    return ShinZettlMatrix::constant(2, a, b, {{cd(0), cd(1)}, {cd(0), cd(0)}}, nodes);
}

ShinZettlMatrix random_valid(std::mt19937_64& rng, int n) {
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * std::ldexp(static_cast<double>(rng() >> 11), -53);
    };
    ShinZettlMatrix A(n, 0.0, 1.0, 41);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s <= std::min(r + 1, n - 1); ++s) {
            const cd v(unif(-2, 2), unif(-2, 2));
            A.set_entry(r, s, [&](double x) { return v + cd(0.1, 0) * std::sin(x); });
        }
    for (int r = 0; r + 1 < n; ++r)
        A.set_entry(r, r + 1, [&](double) { return cd(1.0 + unif(0, 1), unif(-0.5, 0.5)); });
    return A;
}

} // namespace

TEST_CASE("validate_shin_zettl") {
    SECTION("classical matrix is clean") {
        CHECK(validate_shin_zettl(classical()).empty());
    }
    SECTION("vanishing superdiagonal is flagged at the node") {
        ShinZettlMatrix A(2, 0.0, 1.0, 11);
        A.set_entry(0, 1, [](double x) { return cd(x, 0); }); // zero at x = 0
        auto v = validate_shin_zettl(A);
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].condition == "ii");
        CHECK(v[0].node == 0);
        CHECK(v[0].x == 0.0);
    }
    SECTION("upper entry violates condition (iii)") {
        ShinZettlMatrix A(3, 0.0, 1.0, 11);
        A.set_entry(0, 1, [](double) { return cd(1); });
        A.set_entry(1, 2, [](double) { return cd(1); });
        A.set_entry(0, 2, [](double) { return cd(1); }); // a_{13} = 1
        auto v = validate_shin_zettl(A);
        bool found = false;
        for (const auto& viol : v)
            if (viol.condition == "iii" && viol.row == 1 && viol.col == 3) found = true;
        CHECK(found);
    }
}

TEST_CASE("lagrange_adjoint") {
    SECTION("classical matrix is Lagrange symmetric") {
        // hand evaluation: -L2^{-1} A* L2 with L2 = [[0,1],[-1,0]] returns A itself
        auto A = classical();
        auto Ap = lagrange_adjoint(A);
        CHECK(max_nodewise_diff(A, Ap) < 1e-14);
        CHECK(lagrange_symmetric(A));
    }
    SECTION("involution (A+)+ = A for random valid matrices") {
        std::mt19937_64 rng(42);
        for (int t = 0; t < 20; ++t) {
            const int n = 2 + static_cast<int>(rng() % 3);
            auto A = random_valid(rng, n);
            REQUIRE(validate_shin_zettl(A).empty());
            auto App = lagrange_adjoint(lagrange_adjoint(A));
            CHECK(max_nodewise_diff(A, App) < 1e-14);
        }
    }
    SECTION("diagonal real 2x2 flips per the symbolic oracle") {
        // For A = [[d1, 1], [0, d2]]: A+ = [[-conj(d2), 1], [0, -conj(d1)]]
        ShinZettlMatrix A = ShinZettlMatrix::constant(
            2, 0.0, 1.0, {{cd(3), cd(1)}, {cd(0), cd(5)}}, 11);
        auto Ap = lagrange_adjoint(A);
        CHECK(std::abs(Ap.samples(0, 0)[0] - cd(-5)) < 1e-14);
        CHECK(std::abs(Ap.samples(1, 1)[0] - cd(-3)) < 1e-14);
        CHECK(std::abs(Ap.samples(0, 1)[0] - cd(1)) < 1e-14);
        CHECK(std::abs(Ap.samples(1, 0)[0] - cd(0)) < 1e-14);
    }
}

TEST_CASE("integrate_quasi_derivatives") {
    auto A = classical();
    SECTION("constant initial data stays constant") {
        auto t = integrate_quasi_derivatives(A, {cd(1), cd(0)});
        for (std::size_t j = 0; j < t.grid.size(); ++j) {
            CHECK(std::abs(t.values[j][0] - cd(1)) < 1e-12);
            CHECK(std::abs(t.values[j][1]) < 1e-12);
            CHECK(std::abs(t.m_expr(static_cast<int>(j))) < 1e-12);
        }
    }
    SECTION("linear solution f(x) = x") {
        auto t = integrate_quasi_derivatives(A, {cd(0), cd(1)});
        for (std::size_t j = 0; j < t.grid.size(); ++j) {
            CHECK(std::abs(t.values[j][0] - cd(t.grid[j])) < 1e-12);
            CHECK(std::abs(t.m_expr(static_cast<int>(j))) < 1e-12);
        }
    }
    SECTION("forced trajectory reproduces a polynomial and its M_A") {
        // f(x) = x^3: f'' = 6x, so rhs = f^[2] = 6x and M_A[f] = -6x
        auto t = integrate_quasi_derivatives(A, {cd(0), cd(0)},
                                             [](double x) { return cd(6 * x, 0); });
        for (std::size_t j = 0; j < t.grid.size(); ++j) {
            const double x = t.grid[j];
            CHECK(std::abs(t.values[j][0] - cd(x * x * x)) < 1e-10);
            CHECK(std::abs(t.m_expr(static_cast<int>(j)) - cd(-6 * x)) < 1e-12);
        }
    }
    SECTION("order mismatch and coarse grids are rejected") {
        CHECK_THROWS_AS(integrate_quasi_derivatives(A, {cd(1)}), InvalidMatrix);
        // sin on [0, 20] with 4 steps: step-doubling must flag this
        auto B = classical(0.0, 20.0);
        CHECK_THROWS_AS(
            integrate_quasi_derivatives(B, {cd(0), cd(1)},
                                        [](double x) { return cd(-std::sin(x), 0); }, 4),
            StepSizeTooCoarse);
    }
}

TEST_CASE("lagrange identity") {
    auto A = classical();
    SECTION("real kernel solution against itself vanishes") {
        auto r = verify_lagrange_identity(A, {cd(1), cd(0)}, {cd(1), cd(0)}, 0.0, 1.0, 200);
        CHECK(r.residual < 1e-12);
        CHECK(std::abs(r.integral) < 1e-12);
        CHECK(std::abs(r.bracket_delta) < 1e-12);
    }
    SECTION("f(x) = x against g = 1: symbolic boundary bracket") {
        // [x,1]_A = i^2 (f g' - f' g) = -(0 - 1) = 1, constant, so the
        // bracket difference and the integral both vanish.
        auto r = verify_lagrange_identity(A, {cd(0), cd(1)}, {cd(1), cd(0)}, 0.0, 1.0, 200);
        CHECK(r.residual < 1e-10);
        CHECK(std::abs(r.bracket_delta) < 1e-10);
    }
    SECTION("sin against cos on [0, pi/2] at high panel count") {
        auto Apig = classical(0.0, 2.0);
        auto r = verify_lagrange_identity(
            Apig, {cd(0), cd(1)}, {cd(1), cd(0)}, 0.0, M_PI / 2, 10000,
            [](double x) { return cd(-std::sin(x), 0); },
            [](double x) { return cd(-std::cos(x), 0); });
        CHECK(r.residual < 1e-8);
    }
    SECTION("O(h^4) convergence of the residual") {
        auto Apig = classical(0.0, 2.0);
        std::vector<int> panel_counts{4, 8, 16, 32};
        std::vector<double> res;
        for (int p : panel_counts) {
            auto r = verify_lagrange_identity(
                Apig, {cd(0), cd(1)}, {cd(1), cd(0)}, 0.0, M_PI / 2, p,
                [](double x) { return cd(-std::sin(x), 0); },
                [](double x) { return cd(-std::cos(x), 0); }, 1e-2);
            res.push_back(r.residual);
        }
        // least-squares slope of log(residual) vs log(h)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(res.size());
        for (int i = 0; i < n; ++i) {
            const double x = std::log(1.0 / panel_counts[i]);
            const double y = std::log(res[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == Catch::Approx(4.0).margin(0.3));
    }
    SECTION("[f,f] vanishes pointwise for real f and the classical matrix") {
        auto f = integrate_quasi_derivatives(A, {cd(0.7), cd(-0.3)});
        auto g = integrate_quasi_derivatives(lagrange_adjoint(A), {cd(0.7), cd(-0.3)});
        for (int j = 0; j <= 400; j += 40)
            CHECK(std::abs(lagrange_bracket(f, g, j)) < 1e-12);
    }
}
