#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "emz/errors.hpp"
#include "emz/measure.hpp"
#include "emz/vector_op.hpp"

namespace emz {

// One restriction of a slot's cyclic vector, tracked through the
// division-on-subspectra recursion.
struct ProvenancePiece {
    std::string slot_id;
    SpectralMeasureClass cls; // the measure class this piece carries
};

struct ProvenanceStep {
    int level = 1;
    std::string incoming;   // unit joined at this step
    RealSet overlap;        // joint-charge overlap (support); empty = trivial merge
    std::string max_choice; // "none" when the overlap is null, else "accumulated"
    std::vector<ProvenancePiece> discarded; // min side, routed to the next level
};

struct ProvenanceLevel {
    int level = 1;
    std::vector<ProvenancePiece> kept;
    std::vector<ProvenanceStep> steps;
};

struct MaxVectorProvenance {
    std::vector<ProvenanceLevel> levels;
};

struct ThetaResult {
    SpectralMeasureClass theta;   // class of the top (maximal-vector) measure
    WeightedPPMeasure theta_pp;   // concrete pure point part of theta
    MaxVectorProvenance provenance;

    ThetaResult(const Window& w) : theta(SpectralMeasureClass::null(w)), theta_pp(w) {}
};

namespace detail {

inline SpectralMeasureClass pieces_class(const Window& w,
                                         const std::vector<ProvenancePiece>& pieces) {
    SpectralMeasureClass acc = SpectralMeasureClass::null(w);
    for (const auto& p : pieces) acc = class_union(acc, p.cls);
    return acc;
}

// Joins the units one by one. The accumulated side wins every max{} (after
// the pp/cont split the two restrictions to the joint overlap carry the same
// null sets, so the choice is a recorded tie-break, not a loss); the
// incoming side's overlap restriction is the min{} and moves to the pool.
inline ProvenanceLevel process_level(const Window& w,
                                     const std::vector<std::vector<ProvenancePiece>>& units,
                                     const std::vector<std::string>& unit_names, int level,
                                     std::vector<ProvenancePiece>& pool_out) {
    ProvenanceLevel out;
    out.level = level;
    std::vector<ProvenancePiece> cur = units.front();
    for (std::size_t u = 1; u < units.size(); ++u) {
        ProvenanceStep step;
        step.level = level;
        step.incoming = unit_names[u];
        const SpectralMeasureClass cls_cur = pieces_class(w, cur);
        const SpectralMeasureClass cls_in = pieces_class(w, units[u]);
        const SpectralMeasureClass joint = class_joint_intersection(cls_cur, cls_in);
        step.overlap = joint.support();
        if (joint.is_null()) {
            step.max_choice = "none";
            for (const auto& p : units[u]) cur.push_back(p);
        } else {
            step.max_choice = "accumulated";
            for (const auto& p : units[u]) {
                SpectralMeasureClass on = class_joint_intersection(p.cls, joint);
                SpectralMeasureClass off = class_component_diff(p.cls, on);
                if (!off.is_null()) cur.push_back(ProvenancePiece{p.slot_id, off});
                if (!on.is_null()) step.discarded.push_back(ProvenancePiece{p.slot_id, on});
            }
        }
        pool_out.insert(pool_out.end(), step.discarded.begin(), step.discarded.end());
        out.steps.push_back(std::move(step));
    }
    // merge pieces of the same slot
    std::map<std::string, SpectralMeasureClass> merged;
    for (const auto& p : cur) {
        auto it = merged.find(p.slot_id);
        if (it == merged.end()) merged.emplace(p.slot_id, p.cls);
        else it->second = class_union(it->second, p.cls);
    }
    for (const auto& s : cur) {
        auto it = merged.find(s.slot_id);
        if (it != merged.end()) {
            out.kept.push_back(ProvenancePiece{s.slot_id, it->second});
            merged.erase(it);
        }
    }
    return out;
}

} // namespace detail

// Pr_1: the measure of the ordered representation, built by the
// division-on-subspectra recursion over the partition groups, with the
// pp/cont simplification applied through joint-charge overlaps.
inline ThetaResult build_theta(const EMZSystem& sys, const PartitionResult& partition) {
    const Window& w = sys.window();
    ThetaResult out(w);

    std::vector<std::vector<ProvenancePiece>> units;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < partition.groups.size(); ++k) {
        std::vector<ProvenancePiece> unit;
        for (const auto& id : partition.groups[k])
            unit.push_back(ProvenancePiece{id, sys.slot(id).theta});
        units.push_back(std::move(unit));
        names.push_back("group " + std::to_string(k + 1));
    }

    int level = 1;
    while (!units.empty()) {
        std::vector<ProvenancePiece> pool;
        ProvenanceLevel lvl = detail::process_level(w, units, names, level, pool);
        out.provenance.levels.push_back(lvl);
        units.clear();
        names.clear();
        for (auto& p : pool) {
            names.push_back("pool piece " + p.slot_id);
            units.push_back({std::move(p)});
        }
        ++level;
        if (level > 1000) throw Error("internal: provenance recursion did not terminate");
    }

    const auto& top = out.provenance.levels.front().kept;
    out.theta = detail::pieces_class(w, top);
    std::vector<std::pair<double, double>> atoms;
    for (const auto& p : top) {
        const Slot& s = sys.slot(p.slot_id);
        for (double a : p.cls.pp_support().atoms()) {
            const int idx = s.atom_index(a, w.eps_atom);
            atoms.push_back({a, idx >= 0 ? s.atom_weights[idx] : 1.0});
        }
    }
    out.theta_pp = WeightedPPMeasure(w, std::move(atoms));
    return out;
}

// Multiplicity of the spectrum at one point: at a theta-atom only the slots
// charging the atom contribute fiber dimension; elsewhere the ac supports
// count.
inline int pointwise_multiplicity(const EMZSystem& sys, double lambda) {
    const double eps = sys.window().eps_atom;
    int atom_count = 0, ac_count = 0;
    for (const auto& s : sys.slots()) {
        if (s.atom_index(lambda, eps) >= 0) ++atom_count;
        else if (s.theta.ac_support().contains(lambda)) ++ac_count;
    }
    return atom_count > 0 ? atom_count : ac_count;
}

// Pr_2: canonical multiplicity sets. The n-th set collects the first union
// of the per-operator level-n sets with all joint band intersections whose
// levels sum to at least n. Intersections are carried class-wise (pp against
// pp atoms, ac against ac intervals) and theta-atoms puncture the ac regions:
// the fiber over an atom is spanned by the atom slots alone.
inline std::vector<RealSet> build_multiplicity_sets(const EMZSystem& sys, int n_max,
                                                    std::size_t budget = 1000000) {
    const Window& w = sys.window();

    // group slots per original operator, levels ascending
    std::map<std::string, std::vector<const Slot*>> per_op;
    for (const auto& s : sys.slots()) per_op[s.parent_id].push_back(&s);
    std::vector<std::vector<const Slot*>> ops;
    for (auto& [id, v] : per_op) {
        std::sort(v.begin(), v.end(),
                  [](const Slot* a, const Slot* b) { return a->level < b->level; });
        ops.push_back(v);
    }
    const int n_ops = static_cast<int>(ops.size());

    // exact-level bands per operator: class of e_m minus e_{m+1}
    std::vector<std::vector<SpectralMeasureClass>> bands(n_ops);
    for (int i = 0; i < n_ops; ++i)
        for (std::size_t m = 0; m < ops[i].size(); ++m) {
            SpectralMeasureClass band = ops[i][m]->theta;
            if (m + 1 < ops[i].size())
                band = class_component_diff(band, ops[i][m + 1]->theta);
            bands[i].push_back(band);
        }

    // enumerate subsets S (|S| >= 2) with one band level per member; bucket
    // the joint intersection by the level sum
    std::map<int, SpectralMeasureClass> buckets;
    std::size_t combinations = 0;
    std::vector<int> subset;
    std::vector<int> levels;
    std::function<void(int)> levels_rec = [&](int pos) {
        if (pos == static_cast<int>(subset.size())) {
            if (++combinations > budget)
                throw EnumerationBudgetExceeded(
                    "multiplicity-set enumeration exceeded the combination budget");
            SpectralMeasureClass joint = bands[subset[0]][levels[0] - 1];
            int q = levels[0];
            for (std::size_t j = 1; j < subset.size() && !joint.is_null(); ++j) {
                joint = class_joint_intersection(joint, bands[subset[j]][levels[j] - 1]);
                q += levels[j];
            }
            if (!joint.is_null()) {
                auto it = buckets.find(q);
                if (it == buckets.end()) buckets.emplace(q, joint);
                else it->second = class_union(it->second, joint);
            }
            return;
        }
        for (int m = 1; m <= static_cast<int>(bands[subset[pos]].size()); ++m) {
            levels.push_back(m);
            levels_rec(pos + 1);
            levels.pop_back();
        }
    };
    std::function<void(int)> subset_rec = [&](int from) {
        if (subset.size() >= 2) levels_rec(0);
        for (int i = from; i < n_ops; ++i) {
            subset.push_back(i);
            subset_rec(i + 1);
            subset.pop_back();
        }
    };
    if (subset.empty()) subset_rec(0);

    // all theta-atom positions, for the ac punctures
    std::vector<double> all_atoms;
    for (const auto& s : sys.slots())
        for (double a : s.atoms) all_atoms.push_back(a);
    const RealSet atom_positions = RealSet::of_atoms(w, all_atoms);

    std::vector<RealSet> out;
    for (int n = 1; n <= n_max; ++n) {
        SpectralMeasureClass cls = SpectralMeasureClass::null(w);
        for (int i = 0; i < n_ops; ++i)
            if (n <= static_cast<int>(ops[i].size()))
                cls = class_union(cls, ops[i][n - 1]->theta);
        for (const auto& [q, b] : buckets)
            if (q >= n) cls = class_union(cls, b);
        RealSet ac_part = set_diff(cls.ac_support(), atom_positions);
        out.push_back(set_union(ac_part, cls.pp_support()));
    }
    return out;
}

struct DistortionReport {
    int lambda = 0;
    int multiplicity = 0;
    bool distorted = false;
};

inline int spectral_multiplicity_from_sets(const EMZSystem& sys,
                                           const std::vector<RealSet>& sets) {
    SpectralMeasureClass theta = SpectralMeasureClass::null(sys.window());
    for (const auto& s : sys.slots()) theta = class_union(theta, s.theta);
    int mult = 0;
    for (std::size_t n = 0; n < sets.size(); ++n)
        if (class_measure_sign(theta, sets[n]) == MeasureSign::positive)
            mult = static_cast<int>(n + 1);
    return mult;
}

inline DistortionReport detect_distortion(const EMZSystem& sys, std::size_t budget = 1000000) {
    DistortionReport rep;
    rep.lambda = spectral_index(sys).lambda;
    const int n_max = static_cast<int>(sys.slots().size());
    rep.multiplicity = spectral_multiplicity_from_sets(
        sys, build_multiplicity_sets(sys, n_max, budget));
    rep.distorted = rep.lambda != rep.multiplicity;
    return rep;
}

// Full bundle: theta with its provenance, the canonical multiplicity sets
// (s_1 stored as the whole window), multiplicity, index and distortion flag.
struct OrderedRepresentation {
    SpectralMeasureClass theta;
    WeightedPPMeasure theta_pp;
    std::vector<RealSet> mult_sets;
    int spectral_multiplicity = 0;
    int lambda = 0;
    bool distorted = false;
    MaxVectorProvenance provenance;

    OrderedRepresentation(const Window& w)
        : theta(SpectralMeasureClass::null(w)), theta_pp(w) {}
};

inline OrderedRepresentation build_ordered_representation(const EMZSystem& sys,
                                                          std::size_t budget = 1000000) {
    const Window& w = sys.window();
    OrderedRepresentation out(w);
    PartitionResult partition = spectral_index(sys);
    ThetaResult theta = build_theta(sys, partition);
    out.theta = theta.theta;
    out.theta_pp = theta.theta_pp;
    out.provenance = std::move(theta.provenance);
    out.lambda = partition.lambda;

    const int n_max = static_cast<int>(sys.slots().size());
    std::vector<RealSet> raw = build_multiplicity_sets(sys, n_max, budget);
    out.spectral_multiplicity = spectral_multiplicity_from_sets(sys, raw);
    out.mult_sets = std::move(raw);
    if (!out.mult_sets.empty()) out.mult_sets[0] = RealSet::whole(w); // whole-line convention
    out.distorted = out.lambda != out.spectral_multiplicity;
    return out;
}

// Equal ordered representations: mutually absolutely continuous measures and
// multiplicity sets that differ only by theta-null sets.
inline bool families_equivalent(const EMZSystem& a, const EMZSystem& b,
                                std::size_t budget = 1000000) {
    if (!a.window().matches(b.window()))
        throw WindowMismatch("families_equivalent: windows differ");
    const Window& w = a.window();
    SpectralMeasureClass ta = SpectralMeasureClass::null(w);
    for (const auto& s : a.slots()) ta = class_union(ta, s.theta);
    SpectralMeasureClass tb = SpectralMeasureClass::null(w);
    for (const auto& s : b.slots()) tb = class_union(tb, s.theta);
    if (!classes_equivalent(ta, tb)) return false;

    const int n_max = static_cast<int>(std::max(a.slots().size(), b.slots().size()));
    std::vector<RealSet> sa = build_multiplicity_sets(a, n_max, budget);
    std::vector<RealSet> sb = build_multiplicity_sets(b, n_max, budget);
    for (int n = 0; n < n_max; ++n) {
        RealSet sym = set_union(set_diff(sa[n], sb[n]), set_diff(sb[n], sa[n]));
        if (class_measure_sign(ta, sym) == MeasureSign::positive) return false;
    }
    return true;
}

// Oracle-agreement summary between the constructed sets and the pointwise
// multiplicity, over a uniform probe grid plus every slot atom. Mismatches
// on theta-null interval endpoints are counted separately.
struct OracleAgreement {
    int probes = 0;
    int mismatches = 0;
    int excused_endpoints = 0;
};

inline OracleAgreement check_multiplicity_oracle(const EMZSystem& sys,
                                                 const std::vector<RealSet>& sets,
                                                 int grid_n = 1001) {
    const Window& w = sys.window();
    OracleAgreement rep;
    SpectralMeasureClass theta = SpectralMeasureClass::null(w);
    for (const auto& s : sys.slots()) theta = class_union(theta, s.theta);

    std::vector<double> probes;
    for (int j = 0; j < grid_n; ++j) probes.push_back(w.lo + (w.hi - w.lo) * j / (grid_n - 1));
    std::vector<double> atom_probes;
    for (const auto& s : sys.slots())
        for (double a : s.atoms) atom_probes.push_back(a);

    auto endpoint_of_some_support = [&](double x) {
        for (const auto& s : sys.slots())
            for (const auto& iv : s.theta.ac_support().intervals())
                if (std::abs(x - iv.lo) <= w.eps_atom || std::abs(x - iv.hi) <= w.eps_atom)
                    return true;
        return false;
    };

    auto check_one = [&](double x, bool is_atom) {
        ++rep.probes;
        const int m = pointwise_multiplicity(sys, x);
        for (std::size_t n = 0; n < sets.size(); ++n) {
            const bool in_set = sets[n].contains(x);
            const bool oracle = m >= static_cast<int>(n + 1);
            if (in_set == oracle) continue;
            const bool excusable =
                !is_atom && endpoint_of_some_support(x) &&
                class_measure_sign(theta, RealSet::of_atoms(w, {x})) == MeasureSign::zero;
            if (excusable) ++rep.excused_endpoints;
            else ++rep.mismatches;
        }
    };
    for (double x : probes) check_one(x, false);
    for (double x : atom_probes) check_one(x, true);
    return rep;
}

} // namespace emz
