#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "emz/ordered_rep.hpp"
#include "test_systems.hpp"

using namespace emz;
using namespace emz::testing;

namespace {
const Window W20{-20.0, 20.0, 1e-9};
const Window W10{-10.0, 10.0, 1e-9};
const Window W5{-5.0, 5.0, 1e-9};

RealSet lattice(const Window& w, int lo, int hi, int skip_none = INT_MIN) {
    std::vector<double> v;
    for (int n = lo; n <= hi; ++n)
        if (n != skip_none) v.push_back(n);
    return RealSet::of_atoms(w, v);
}
} // namespace

TEST_CASE("build_theta") {
    SECTION("single operator: theta is the coordinate measure, trivial provenance") {
        EMZSystem sys({OperatorSpec::impulse_on_unit("I", 1.0)}, W10);
        auto p = spectral_index(sys);
        auto t = build_theta(sys, p);
        CHECK(classes_equivalent(t.theta, sys.slots()[0].theta));
        REQUIRE(t.provenance.levels.size() == 1);
        CHECK(t.provenance.levels[0].steps.empty());
        CHECK(t.provenance.levels[0].kept.size() == 1);
        for (const auto& [pos, m] : t.theta_pp.atoms()) CHECK(m == 1.0);
    }
    SECTION("case 1: theta class is both half-lines plus the impulse atoms") {
        auto sys = example1_case1(W20);
        auto t = build_theta(sys, spectral_index(sys));
        RealSet expected_ac = set_union(RealSet::of_interval(W20, W20.lo, 0, false, false),
                                        RealSet::of_interval(W20, 0, W20.hi, false, false));
        CHECK(t.theta.ac_support().approx_equal(expected_ac));
        CHECK(t.theta.pp_support().approx_equal(subspectrum(sys.op("T3"), W20)));
    }
    SECTION("identical impulse pair: a max choice on the full overlap") {
        auto sys = double_impulse(W10, M_PI / 2, M_PI / 2);
        auto p = spectral_index(sys);
        REQUIRE(p.lambda == 2);
        auto t = build_theta(sys, p);
        // theta = one copy of the atom family
        CHECK(t.theta.pp_support().approx_equal(subspectrum(sys.op("I1"), W10)));
        REQUIRE(t.provenance.levels.size() == 2);
        REQUIRE(t.provenance.levels[0].steps.size() == 1);
        const auto& step = t.provenance.levels[0].steps[0];
        CHECK(step.max_choice == "accumulated");
        CHECK(step.overlap.approx_equal(subspectrum(sys.op("I1"), W10)));
        REQUIRE(step.discarded.size() == 1);
        CHECK(step.discarded[0].slot_id == "I2");
        // the min selection reappears as the level-2 kernel slot
        REQUIRE(t.provenance.levels[1].kept.size() == 1);
        CHECK(t.provenance.levels[1].kept[0].slot_id == "I2");
    }
    SECTION("provenance completeness: slot classes partition across levels") {
        std::mt19937_64 rng(314);
        for (int trial = 0; trial < 25; ++trial) {
            auto sys = random_symbolic_system(rng, W10, 5, 2);
            auto t = build_theta(sys, spectral_index(sys));
            for (const auto& slot : sys.slots()) {
                SpectralMeasureClass acc = SpectralMeasureClass::null(W10);
                for (const auto& lvl : t.provenance.levels)
                    for (const auto& piece : lvl.kept)
                        if (piece.slot_id == slot.id) {
                            // nothing duplicated
                            CHECK(class_joint_intersection(acc, piece.cls).is_null());
                            acc = class_union(acc, piece.cls);
                        }
                // nothing lost (class-level: endpoint singletons carry no ac mass)
                CHECK(classes_equivalent(acc, slot.theta));
                CHECK(acc.pp_support().approx_equal(slot.theta.pp_support()));
            }
        }
    }
}

TEST_CASE("build_multiplicity_sets") {
    SECTION("integer lattice on [-5,5]: s_2 integer atoms, s_3 empty") {
        auto sys = example2(W5);
        auto sets = build_multiplicity_sets(sys, 3);
        CHECK(sets[1].approx_equal(lattice(W5, -5, 5)));
        CHECK(sets[2].is_empty());
        // the pairwise e_2 union formula, set-exactly
        RealSet e1 = subspectrum(sys.op("T1"), W5);
        RealSet e2 = subspectrum(sys.op("T2"), W5);
        RealSet e3 = subspectrum(sys.op("T3"), W5);
        RealSet paper_e2 = set_union(set_union(set_intersect(e1, e2), set_intersect(e1, e3)),
                                     set_intersect(e2, e3));
        CHECK(sets[1].approx_equal(paper_e2));
    }
    SECTION("single operator: s_n equals e_n") {
        RealSet e1 = lattice(W10, -4, 4);
        RealSet e2 = lattice(W10, 0, 3);
        SpectralMeasureClass theta(RealSet::empty(W10), e1);
        EMZSystem sys({OperatorSpec::symbolic("S", SymbolicData{theta, {e1, e2}, {}})}, W10);
        auto sets = build_multiplicity_sets(sys, 3);
        CHECK(sets[0].approx_equal(e1));
        CHECK(sets[1].approx_equal(e2));
        CHECK(sets[2].is_empty());
    }
    SECTION("null overlap: s_2 empty") {
        auto sys = double_impulse(W10, M_PI / 2, M_PI / 2 + 1.0);
        auto sets = build_multiplicity_sets(sys, 2);
        CHECK(sets[1].is_empty());
    }
    SECTION("an atom inside a doubly-covered ac region does not join s_2") {
        // two ac slots on (0,5), one atom slot at 2
        SpectralMeasureClass ac1(RealSet::of_interval(W10, 0, 5, false, false),
                                 RealSet::empty(W10));
        SpectralMeasureClass ac2(RealSet::of_interval(W10, -1, 6, false, false),
                                 RealSet::empty(W10));
        SpectralMeasureClass at(RealSet::empty(W10), RealSet::of_atoms(W10, {2.0}));
        EMZSystem sys({OperatorSpec::symbolic("A", SymbolicData{ac1, {ac1.support()}, {}}),
                       OperatorSpec::symbolic("B", SymbolicData{ac2, {ac2.support()}, {}}),
                       OperatorSpec::symbolic("C", SymbolicData{at, {at.support()}, {}})},
                      W10);
        auto sets = build_multiplicity_sets(sys, 3);
        // s_2 is the common ac region with the theta-atom punctured out
        CHECK_FALSE(sets[1].contains(2.0));
        CHECK(sets[1].interval_interior_contains(1.0));
        CHECK(pointwise_multiplicity(sys, 2.0) == 1);
        CHECK(pointwise_multiplicity(sys, 1.0) == 2);
        CHECK(sets[2].is_empty());
    }
    SECTION("budget cap raises the typed error") {
        std::mt19937_64 rng(1);
        auto sys = random_symbolic_system(rng, W10, 6, 3);
        if (sys.operators().size() >= 3)
            CHECK_THROWS_AS(build_multiplicity_sets(sys, 3, 2), EnumerationBudgetExceeded);
    }
    SECTION("monotone: s_{n+1} subset of s_n") {
        std::mt19937_64 rng(5150);
        for (int t = 0; t < 20; ++t) {
            auto sys = random_symbolic_system(rng, W10);
            auto sets = build_multiplicity_sets(sys, static_cast<int>(sys.slots().size()));
            for (std::size_t n = 0; n + 1 < sets.size(); ++n)
                CHECK(sets[n + 1].is_subset_of(sets[n]));
        }
    }
}

TEST_CASE("pointwise_multiplicity") {
    auto sys = example2(W10);
    CHECK(pointwise_multiplicity(sys, 0.0) == 2);  // slots 1 and 2
    CHECK(pointwise_multiplicity(sys, 3.0) == 2);  // slots 1 and 3
    CHECK(pointwise_multiplicity(sys, -3.0) == 2); // slots 2 and 3
    CHECK(pointwise_multiplicity(sys, 0.5) == 0);
}

TEST_CASE("multiplicity-set oracle agreement") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 15; ++trial) {
        auto sys = random_symbolic_system(rng, W10, 6, 3);
        auto sets = build_multiplicity_sets(sys, static_cast<int>(sys.slots().size()));
        auto rep = check_multiplicity_oracle(sys, sets);
        INFO("trial " << trial);
        CHECK(rep.mismatches == 0);
    }
}

TEST_CASE("theta-class correctness") {
    std::mt19937_64 rng(999);
    for (int trial = 0; trial < 15; ++trial) {
        auto sys = random_symbolic_system(rng, W10, 5, 2);
        auto t = build_theta(sys, spectral_index(sys));
        for (int probe = 0; probe < 10; ++probe) {
            RealSet s = random_real_set(rng, W10);
            MeasureSign expect = MeasureSign::zero;
            for (const auto& slot : sys.slots())
                if (class_measure_sign(slot.theta, s) == MeasureSign::positive)
                    expect = MeasureSign::positive;
            CHECK(class_measure_sign(t.theta, s) == expect);
        }
    }
}

TEST_CASE("kept levels agree with the multiplicity sets up to theta-null") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 15; ++trial) {
        auto sys = random_symbolic_system(rng, W10, 5, 2);
        auto t = build_theta(sys, spectral_index(sys));
        auto sets = build_multiplicity_sets(sys, static_cast<int>(sys.slots().size()));
        for (std::size_t l = 0; l < t.provenance.levels.size(); ++l) {
            SpectralMeasureClass lvl = SpectralMeasureClass::null(W10);
            for (const auto& piece : t.provenance.levels[l].kept)
                lvl = class_union(lvl, piece.cls);
            REQUIRE(l < sets.size());
            // the l-th layer of the representation carries theta
            // restricted to s_l
            CHECK(classes_equivalent(lvl, class_restrict(t.theta, sets[l])));
        }
    }
}

TEST_CASE("detect_distortion on the worked systems") {
    SECTION("case 1: index 2, multiplicity 1, distorted") {
        auto rep = detect_distortion(example1_case1(W20));
        CHECK(rep.lambda == 2);
        CHECK(rep.multiplicity == 1);
        CHECK(rep.distorted);
    }
    SECTION("case 2: index 3, simple spectrum") {
        auto rep = detect_distortion(example1_case2(W20));
        CHECK(rep.lambda == 3);
        CHECK(rep.multiplicity == 1);
        CHECK(rep.distorted);
    }
    SECTION("integer lattice: index 3, multiplicity 2") {
        auto rep = detect_distortion(example2(W10));
        CHECK(rep.lambda == 3);
        CHECK(rep.multiplicity == 2);
        CHECK(rep.distorted);
    }
    SECTION("disjoint pair: undistorted") {
        auto rep = detect_distortion(double_impulse(W10, M_PI / 2, M_PI / 2 + 1.0));
        CHECK(rep.lambda == 1);
        CHECK(rep.multiplicity == 1);
        CHECK_FALSE(rep.distorted);
    }
}

TEST_CASE("ordered representation bundle") {
    auto sys = example2(W10);
    auto rep = build_ordered_representation(sys);
    CHECK(rep.lambda == 3);
    CHECK(rep.spectral_multiplicity == 2);
    CHECK(rep.distorted);
    CHECK(rep.mult_sets[0].approx_equal(RealSet::whole(W10))); // whole-line convention
    CHECK(rep.mult_sets[1].approx_equal(lattice(W10, -10, 10)));
    CHECK(rep.theta_pp.total_mass() == Catch::Approx(21.0)); // one unit per lattice atom
}

TEST_CASE("families_equivalent") {
    SECTION("system against itself") {
        auto sys = example2(W10);
        CHECK(families_equivalent(sys, sys));
    }
    SECTION("relabeled permutation is equivalent") {
        const Window& w = W10;
        std::vector<double> nonneg, nonpos, nonzero;
        for (int n = -10; n <= 10; ++n) {
            if (n >= 0) nonneg.push_back(n);
            if (n <= 0) nonpos.push_back(n);
            if (n != 0) nonzero.push_back(n);
        }
        EMZSystem a({symbolic_pp("T1", w, nonneg), symbolic_pp("T2", w, nonpos),
                     symbolic_pp("T3", w, nonzero)},
                    w);
        EMZSystem b({symbolic_pp("U1", w, nonzero), symbolic_pp("U2", w, nonneg),
                     symbolic_pp("U3", w, nonpos)},
                    w);
        CHECK(families_equivalent(a, b));
    }
    SECTION("dropping a slot changes s_2") {
        const Window& w = W10;
        std::vector<double> nonneg, nonpos;
        for (int n = -10; n <= 10; ++n) {
            if (n >= 0) nonneg.push_back(n);
            if (n <= 0) nonpos.push_back(n);
        }
        auto full = example2(w);
        EMZSystem two({symbolic_pp("T1", w, nonneg), symbolic_pp("T2", w, nonpos)}, w);
        CHECK_FALSE(families_equivalent(full, two));
    }
}
