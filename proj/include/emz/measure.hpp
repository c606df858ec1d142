#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "emz/errors.hpp"
#include "emz/real_set.hpp"

namespace emz {

enum class MeasureSign { zero, positive };

// Null-set view of a spectral measure: supports of the absolutely continuous
// and pure point parts. Only zero/positive queries are answered, never
// magnitudes. Isolated points in the ac support are Lebesgue-null and are
// stripped on construction.
class SpectralMeasureClass {
public:
    SpectralMeasureClass() = default;

    SpectralMeasureClass(RealSet ac, RealSet pp)
        : ac_(ac.interval_part()), pp_(std::move(pp)) {
        if (!ac_.window().matches(pp_.window()))
            throw WindowMismatch("measure class: ac and pp windows differ");
        if (pp_.has_interval())
            throw SchemaError("measure class: pp support must contain atoms only");
    }

    static SpectralMeasureClass null(const Window& w) {
        return SpectralMeasureClass(RealSet::empty(w), RealSet::empty(w));
    }

    const RealSet& ac_support() const { return ac_; }
    const RealSet& pp_support() const { return pp_; }
    const Window& window() const { return ac_.window(); }

    bool is_null() const { return ac_.is_empty() && pp_.is_empty(); }

    RealSet support() const { return set_union(ac_, pp_); }

private:
    RealSet ac_;
    RealSet pp_;
};

// Decides whether the measure class charges the set s: positive iff s meets
// the ac support in an interval of positive length, or contains a pp atom.
inline MeasureSign class_measure_sign(const SpectralMeasureClass& m, const RealSet& s) {
    if (set_intersect(s, m.ac_support()).has_interval()) return MeasureSign::positive;
    if (!set_intersect(s, m.pp_support()).is_empty()) return MeasureSign::positive;
    return MeasureSign::zero;
}

inline std::pair<SpectralMeasureClass, SpectralMeasureClass>
split_pp_cont(const SpectralMeasureClass& m) {
    const Window& w = m.window();
    SpectralMeasureClass pp(RealSet::empty(w), m.pp_support());
    SpectralMeasureClass cont(m.ac_support(), RealSet::empty(w));
    return {pp, cont};
}

inline SpectralMeasureClass class_union(const SpectralMeasureClass& a,
                                        const SpectralMeasureClass& b) {
    return SpectralMeasureClass(set_union(a.ac_support(), b.ac_support()),
                                set_union(a.pp_support(), b.pp_support()));
}

// Restriction of a class to a set, keeping only genuinely charged content:
// interval overlap for the ac part, atoms (from atom or interval cover) for
// the pp part.
inline SpectralMeasureClass class_restrict(const SpectralMeasureClass& m, const RealSet& r) {
    return SpectralMeasureClass(set_intersect(m.ac_support(), r).interval_part(),
                                set_intersect(m.pp_support(), r));
}

// Joint-charge intersection: the region charged by BOTH classes. Mixed
// ac-vs-pp overlap is null (a point is Lebesgue-null for an ac part, an
// interval carries no pp mass from disjoint atoms around it).
inline SpectralMeasureClass class_joint_intersection(const SpectralMeasureClass& a,
                                                     const SpectralMeasureClass& b) {
    return SpectralMeasureClass(set_intersect(a.ac_support(), b.ac_support()).interval_part(),
                                set_intersect(a.pp_support(), b.pp_support()));
}

// Part of the class NOT charged inside r (class-level complement of the
// restriction).
inline SpectralMeasureClass class_remove(const SpectralMeasureClass& m, const RealSet& r) {
    return SpectralMeasureClass(set_diff(m.ac_support(), r).interval_part(),
                                set_diff(m.pp_support(), r));
}

// Componentwise difference a \ b: ac against ac, pp against pp.
inline SpectralMeasureClass class_component_diff(const SpectralMeasureClass& a,
                                                 const SpectralMeasureClass& b) {
    return SpectralMeasureClass(set_diff(a.ac_support(), b.ac_support()).interval_part(),
                                set_diff(a.pp_support(), b.pp_support()));
}

// Mutual absolute continuity at class level: same pp atoms and ac supports
// equal up to Lebesgue-null sets.
inline bool classes_equivalent(const SpectralMeasureClass& a, const SpectralMeasureClass& b) {
    if (set_diff(a.ac_support(), b.ac_support()).has_interval()) return false;
    if (set_diff(b.ac_support(), a.ac_support()).has_interval()) return false;
    if (!set_diff(a.pp_support(), b.pp_support()).is_empty()) return false;
    if (!set_diff(b.pp_support(), a.pp_support()).is_empty()) return false;
    return true;
}

// Finite weighted pure-point measure: sorted atoms with strictly positive
// weights, positions pairwise distinct at eps_atom.
class WeightedPPMeasure {
public:
    explicit WeightedPPMeasure(const Window& w) : win_(w) {}

    WeightedPPMeasure(const Window& w, std::vector<std::pair<double, double>> atoms)
        : win_(w), atoms_(std::move(atoms)) {
        normalize();
    }

    const Window& window() const { return win_; }
    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }

    double total_mass() const {
        double s = 0.0;
        for (const auto& [p, m] : atoms_) s += m;
        return s;
    }

    double mass_at(double x) const {
        for (const auto& [p, m] : atoms_)
            if (std::abs(p - x) <= win_.eps_atom) return m;
        return 0.0;
    }

    WeightedPPMeasure restricted(const RealSet& s) const {
        std::vector<std::pair<double, double>> kept;
        for (const auto& a : atoms_)
            if (s.contains(a.first)) kept.push_back(a);
        return WeightedPPMeasure(win_, std::move(kept));
    }

    RealSet support() const {
        std::vector<double> pos;
        pos.reserve(atoms_.size());
        for (const auto& a : atoms_) pos.push_back(a.first);
        return RealSet::of_atoms(win_, std::move(pos));
    }

    double integrate(const std::function<double(double)>& f) const {
        double s = 0.0;
        for (const auto& [p, m] : atoms_) s += f(p) * m;
        return s;
    }

private:
    Window win_;
    std::vector<std::pair<double, double>> atoms_;

    void normalize() {
        for (const auto& [p, m] : atoms_) {
            if (!(m > 0.0)) throw SchemaError("pp measure: weights must be strictly positive");
            if (p < win_.lo - win_.eps_atom || p > win_.hi + win_.eps_atom)
                throw SchemaError("pp measure: atom outside window");
        }
        std::sort(atoms_.begin(), atoms_.end());
        // merge positions within eps (weights add)
        std::vector<std::pair<double, double>> merged;
        for (const auto& a : atoms_) {
            if (!merged.empty() && a.first - merged.back().first <= win_.eps_atom)
                merged.back().second += a.second;
            else
                merged.push_back(a);
        }
        atoms_ = std::move(merged);
    }
};

inline WeightedPPMeasure pp_sum(const Window& w, const std::vector<WeightedPPMeasure>& ms) {
    std::vector<std::pair<double, double>> all;
    for (const auto& m : ms) {
        if (!m.window().matches(w)) throw WindowMismatch("pp_sum: window mismatch");
        for (const auto& a : m.atoms()) all.push_back(a);
    }
    return WeightedPPMeasure(w, std::move(all));
}

// Both evaluation orders of the sum-of-measures identity: integrating each
// measure then summing, versus integrating against the merged sum measure.
struct MeasureSumResult {
    double per_measure_sum = 0.0;
    double merged_integral = 0.0;

    double rel_gap() const {
        const double scale = std::max({std::abs(per_measure_sum), std::abs(merged_integral), 1.0});
        return std::abs(per_measure_sum - merged_integral) / scale;
    }
};

inline MeasureSumResult measure_sum_eval(const std::vector<WeightedPPMeasure>& ms,
                                         const std::function<double(double)>& f,
                                         const Window& w) {
    MeasureSumResult r;
    for (const auto& m : ms) {
        if (!m.window().matches(w)) throw WindowMismatch("measure_sum_eval: window mismatch");
        r.per_measure_sum += m.integrate(f);
    }
    r.merged_integral = pp_sum(w, ms).integrate(f);
    return r;
}

} // namespace emz
