#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "emz/real_set.hpp"

using namespace emz;

namespace {

const Window W{-10.0, 10.0, 1e-9};

RealSet random_set(std::mt19937_64& rng, const Window& w) {
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * std::ldexp(static_cast<double>(rng() >> 11), -53);
    };
    std::vector<Interval> ivs;
    const int ni = static_cast<int>(rng() % 4);
    for (int i = 0; i < ni; ++i) {
        double a = unif(w.lo, w.hi), b = unif(w.lo, w.hi);
        if (a > b) std::swap(a, b);
        ivs.push_back(Interval{a, b, (rng() & 1) != 0, (rng() & 1) != 0});
    }
    std::vector<double> atoms;
    const int na = static_cast<int>(rng() % 4);
    for (int i = 0; i < na; ++i) atoms.push_back(unif(w.lo, w.hi));
    return RealSet(w, std::move(ivs), std::move(atoms));
}

} // namespace

TEST_CASE("canonical form: merging, absorption, clipping") {
    SECTION("touching intervals merge through a closed endpoint") {
        RealSet s(W, {Interval{0, 1, true, true}, Interval{1, 2, false, false}}, {});
        REQUIRE(s.intervals().size() == 1);
        CHECK(s.intervals()[0].lo == 0.0);
        CHECK(s.intervals()[0].hi == 2.0);
        CHECK(s.intervals()[0].lo_closed);
        CHECK_FALSE(s.intervals()[0].hi_closed);
    }
    SECTION("open-open adjacency is a genuine puncture") {
        RealSet s(W, {Interval{0, 1, false, false}, Interval{1, 2, false, false}}, {});
        REQUIRE(s.intervals().size() == 2);
        CHECK_FALSE(s.contains(1.0));
    }
    SECTION("atom on an open endpoint closes it") {
        RealSet s(W, {Interval{0, 1, false, false}}, {1.0});
        REQUIRE(s.intervals().size() == 1);
        CHECK(s.atoms().empty());
        CHECK(s.intervals()[0].hi_closed);
    }
    SECTION("atom bridging two open endpoints heals the puncture") {
        RealSet s(W, {Interval{-1, 0, false, false}, Interval{0, 1, false, false}}, {0.0});
        REQUIRE(s.intervals().size() == 1);
        CHECK(s.contains(0.0));
    }
    SECTION("interior atoms are dropped") {
        RealSet s(W, {Interval{0, 2, false, false}}, {1.0});
        CHECK(s.atoms().empty());
    }
    SECTION("clipping at the window edge gives an open synthetic boundary") {
        RealSet s(W, {Interval{5, 30, false, true}}, {});
        REQUIRE(s.intervals().size() == 1);
        CHECK(s.intervals()[0].hi == W.hi);
        CHECK_FALSE(s.intervals()[0].hi_closed);
    }
    SECTION("atoms outside the window are dropped, edge atoms kept") {
        RealSet s = RealSet::of_atoms(W, {-25.0, -10.0, 0.0, 10.0, 11.0});
        CHECK(s.atoms() == std::vector<double>{-10.0, 0.0, 10.0});
    }
    SECTION("nearby atoms are identified at eps_atom") {
        RealSet s = RealSet::of_atoms(W, {1.0, 1.0 + 2e-10, 2.0});
        CHECK(s.atoms().size() == 2);
    }
    SECTION("degenerate closed interval becomes an atom") {
        RealSet s(W, {Interval{3, 3, true, true}}, {});
        CHECK(s.intervals().empty());
        CHECK(s.atoms() == std::vector<double>{3.0});
    }
}

TEST_CASE("set_combine basics") {
    SECTION("boundary-only overlap of closed half-windows is a single atom") {
        RealSet a = RealSet::of_interval(W, 0, W.hi, true, true);
        RealSet b = RealSet::of_interval(W, W.lo, 0, true, true);
        RealSet x = set_intersect(a, b);
        CHECK(x.intervals().empty());
        CHECK(x.atoms() == std::vector<double>{0.0});
    }
    SECTION("integer-lattice atom intersection") {
        // atoms Z cap [0,W] against atoms (Z minus 0) cap [-W,W]
        std::vector<double> za, zb;
        for (int n = 0; n <= 10; ++n) za.push_back(n);
        for (int n = -10; n <= 10; ++n)
            if (n != 0) zb.push_back(n);
        RealSet x = set_intersect(RealSet::of_atoms(W, za), RealSet::of_atoms(W, zb));
        std::vector<double> expect;
        for (int n = 1; n <= 10; ++n) expect.push_back(n);
        CHECK(x.atoms() == expect);
        CHECK(x.intervals().empty());
    }
    SECTION("union with the empty set is identity") {
        RealSet a(W, {Interval{-3, 2, false, true}}, {5.0});
        CHECK(set_union(a, RealSet::empty(W)).approx_equal(a));
    }
    SECTION("window mismatch throws") {
        Window W2{-5.0, 5.0, 1e-9};
        CHECK_THROWS_AS(set_union(RealSet::empty(W), RealSet::empty(W2)), WindowMismatch);
    }
    SECTION("diff punctures an interval at an atom") {
        RealSet a = RealSet::of_interval(W, 0, 5, false, false);
        RealSet b = RealSet::of_atoms(W, {2.0});
        RealSet d = set_diff(a, b);
        REQUIRE(d.intervals().size() == 2);
        CHECK_FALSE(d.contains(2.0));
        CHECK(d.contains(1.9));
        CHECK(d.contains(2.1));
    }
    SECTION("open/closed endpoint arithmetic") {
        RealSet a = RealSet::of_interval(W, 0, 2, true, true);
        RealSet b = RealSet::of_interval(W, 1, 3, false, true);
        RealSet d = set_diff(a, b);
        REQUIRE(d.intervals().size() == 1);
        CHECK(d.intervals()[0].lo == 0.0);
        CHECK(d.intervals()[0].hi == 1.0);
        CHECK(d.intervals()[0].lo_closed);
        CHECK(d.intervals()[0].hi_closed); // 1 not in b (open there)
    }
}

TEST_CASE("boolean algebra laws on random canonical sets") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        RealSet a = random_set(rng, W);
        RealSet b = random_set(rng, W);
        RealSet c = random_set(rng, W);

        CHECK(set_union(a, b).approx_equal(set_union(b, a)));
        CHECK(set_intersect(a, b).approx_equal(set_intersect(b, a)));
        CHECK(set_union(set_union(a, b), c).approx_equal(set_union(a, set_union(b, c))));
        CHECK(set_intersect(set_intersect(a, b), c)
                  .approx_equal(set_intersect(a, set_intersect(b, c))));

        // De Morgan via complements within the window
        RealSet whole = RealSet::whole(W);
        RealSet na = set_diff(whole, a);
        RealSet nb = set_diff(whole, b);
        CHECK(set_diff(whole, set_union(a, b)).approx_equal(set_intersect(na, nb)));
        CHECK(set_diff(whole, set_intersect(a, b)).approx_equal(set_union(na, nb)));

        // closure under canonical form: re-canonicalizing an output is a no-op
        RealSet u = set_union(a, b);
        RealSet re(u.window(), u.intervals(), u.atoms());
        CHECK(u.approx_equal(re));

        // subset sanity
        CHECK(set_intersect(a, b).is_subset_of(a));
        CHECK(a.is_subset_of(set_union(a, b)));
    }
}

TEST_CASE("reflection and closure") {
    Window WS{-10.0, 10.0, 1e-9};
    RealSet s(WS, {Interval{1, 4, false, true}}, {-7.0});
    RealSet r = s.reflected();
    CHECK(r.contains(7.0));
    CHECK(r.contains(-4.0));
    CHECK_FALSE(r.contains(-1.0)); // open endpoint reflected stays open
    RealSet cl = s.closure();
    CHECK(cl.contains(1.0));
}
