#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "emz/errors.hpp"

namespace emz {

// Working window on the spectral axis. Every set-level computation is
// truncated to one shared window; eps_atom is the point-identification
// tolerance used throughout.
struct Window {
    double lo = 0.0;
    double hi = 1.0;
    double eps_atom = 1e-9;

    bool matches(const Window& o) const {
        return std::abs(lo - o.lo) <= eps_atom && std::abs(hi - o.hi) <= eps_atom;
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    double length() const { return hi - lo; }
};

enum class SetOp { Union, Intersect, Diff };

// Finite union of intervals and atoms inside a working window, kept in a
// unique canonical form:
//   - intervals sorted, pairwise disjoint, merged when touching through a
//     closed endpoint;
//   - atoms sorted, pairwise distinct at eps_atom, never interior to an
//     interval; an atom sitting on an open interval endpoint closes it.
// Truncation convention: a boundary created by clipping at the window edge is
// open (it marks "continues beyond the window"), while atoms are kept on the
// closed window [lo, hi].
class RealSet {
public:
    RealSet() : win_{} {}

    RealSet(const Window& w, std::vector<Interval> intervals, std::vector<double> atoms,
            std::optional<std::string> generator = std::nullopt)
        : win_(w), intervals_(std::move(intervals)), atoms_(std::move(atoms)),
          generator_(std::move(generator)) {
        if (!(win_.lo < win_.hi)) throw SchemaError("window requires lo < hi");
        if (!(win_.eps_atom > 0)) throw SchemaError("eps_atom must be positive");
        canonicalize();
    }

    static RealSet empty(const Window& w) { return RealSet(w, {}, {}); }

    static RealSet whole(const Window& w) {
        return RealSet(w, {Interval{w.lo, w.hi, true, true}}, {});
    }

    static RealSet of_atoms(const Window& w, std::vector<double> atoms,
                            std::optional<std::string> generator = std::nullopt) {
        return RealSet(w, {}, std::move(atoms), std::move(generator));
    }

    static RealSet of_interval(const Window& w, double lo, double hi,
                               bool lo_closed, bool hi_closed) {
        return RealSet(w, {Interval{lo, hi, lo_closed, hi_closed}}, {});
    }

    const Window& window() const { return win_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::optional<std::string>& generator() const { return generator_; }
    void set_generator(std::optional<std::string> g) { generator_ = std::move(g); }

    bool is_empty() const { return intervals_.empty() && atoms_.empty(); }
    bool has_interval() const { return !intervals_.empty(); }

    double total_interval_length() const {
        double s = 0.0;
        for (const auto& iv : intervals_) s += iv.length();
        return s;
    }

    // eps-tolerant membership. A point within eps_atom of an interval
    // endpoint is treated as sitting exactly on it.
    bool contains(double x) const {
        const double eps = win_.eps_atom;
        for (double a : atoms_)
            if (std::abs(x - a) <= eps) return true;
        for (const auto& iv : intervals_) {
            if (std::abs(x - iv.lo) <= eps) { if (iv.lo_closed) return true; continue; }
            if (std::abs(x - iv.hi) <= eps) { if (iv.hi_closed) return true; continue; }
            if (iv.lo < x && x < iv.hi) return true;
        }
        return false;
    }

    // Strict interior membership in some interval; flags and atoms ignored.
    bool interval_interior_contains(double x) const {
        for (const auto& iv : intervals_)
            if (iv.lo < x && x < iv.hi) return true;
        return false;
    }

    RealSet interval_part() const { return RealSet(win_, intervals_, {}); }

    RealSet atom_part() const { return RealSet(win_, {}, atoms_, generator_); }

    RealSet closure() const {
        std::vector<Interval> ivs = intervals_;
        for (auto& iv : ivs) { iv.lo_closed = true; iv.hi_closed = true; }
        return RealSet(win_, std::move(ivs), atoms_);
    }

    // Image under x -> -x, living on the reflected window.
    RealSet reflected() const {
        Window w{-win_.hi, -win_.lo, win_.eps_atom};
        std::vector<Interval> ivs;
        ivs.reserve(intervals_.size());
        for (const auto& iv : intervals_)
            ivs.push_back(Interval{-iv.hi, -iv.lo, iv.hi_closed, iv.lo_closed});
        std::vector<double> ats;
        ats.reserve(atoms_.size());
        for (double a : atoms_) ats.push_back(-a);
        return RealSet(w, std::move(ivs), std::move(ats));
    }

    bool approx_equal(const RealSet& o) const {
        const double eps = win_.eps_atom;
        if (!win_.matches(o.win_)) return false;
        if (intervals_.size() != o.intervals_.size()) return false;
        if (atoms_.size() != o.atoms_.size()) return false;
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            const auto& a = intervals_[i];
            const auto& b = o.intervals_[i];
            if (std::abs(a.lo - b.lo) > eps || std::abs(a.hi - b.hi) > eps) return false;
            if (a.lo_closed != b.lo_closed || a.hi_closed != b.hi_closed) return false;
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (std::abs(atoms_[i] - o.atoms_[i]) > eps) return false;
        return true;
    }

    bool is_subset_of(const RealSet& o) const;

private:
    Window win_;
    std::vector<Interval> intervals_;
    std::vector<double> atoms_;
    std::optional<std::string> generator_;

    friend RealSet set_combine(const RealSet&, const RealSet&, SetOp);

    void canonicalize() {
        const double eps = win_.eps_atom;

        // Joint coordinate snap: coordinates within eps cluster to one
        // representative; a cluster containing a window bound snaps to it.
        std::vector<double> coords{win_.lo, win_.hi};
        for (const auto& iv : intervals_) { coords.push_back(iv.lo); coords.push_back(iv.hi); }
        for (double a : atoms_) coords.push_back(a);
        std::sort(coords.begin(), coords.end());
        std::vector<double> vals, reps;
        std::size_t i = 0;
        while (i < coords.size()) {
            std::size_t j = i;
            while (j + 1 < coords.size() && coords[j + 1] - coords[j] <= eps) ++j;
            double rep = coords[i];
            for (std::size_t k = i; k <= j; ++k)
                if (coords[k] == win_.lo || coords[k] == win_.hi) { rep = coords[k]; break; }
            for (std::size_t k = i; k <= j; ++k) {
                if (vals.empty() || vals.back() != coords[k]) {
                    vals.push_back(coords[k]);
                    reps.push_back(rep);
                }
            }
            i = j + 1;
        }
        auto snap = [&](double x) {
            auto it = std::lower_bound(vals.begin(), vals.end(), x);
            return reps[static_cast<std::size_t>(it - vals.begin())];
        };

        for (auto& iv : intervals_) { iv.lo = snap(iv.lo); iv.hi = snap(iv.hi); }
        for (auto& a : atoms_) a = snap(a);

        // Clip to the window; synthetic boundaries are open.
        std::vector<Interval> clipped;
        for (auto iv : intervals_) {
            if (iv.hi < win_.lo || iv.lo > win_.hi) continue;
            if (iv.lo < win_.lo) { iv.lo = win_.lo; iv.lo_closed = false; }
            if (iv.hi > win_.hi) { iv.hi = win_.hi; iv.hi_closed = false; }
            if (iv.lo > iv.hi) continue;
            if (iv.lo == iv.hi) {
                if (iv.lo_closed && iv.hi_closed) atoms_.push_back(iv.lo);
                continue;
            }
            clipped.push_back(iv);
        }
        intervals_ = std::move(clipped);

        std::vector<double> kept;
        for (double a : atoms_)
            if (a >= win_.lo && a <= win_.hi) kept.push_back(a);
        atoms_ = std::move(kept);
        std::sort(atoms_.begin(), atoms_.end());
        atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());

        merge_intervals();
        absorb_atoms();
        merge_intervals(); // absorption may close endpoints and enable merges
    }

    void merge_intervals() {
        std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) {
            if (a.lo != b.lo) return a.lo < b.lo;
            if (a.lo_closed != b.lo_closed) return a.lo_closed;
            return a.hi < b.hi;
        });
        std::vector<Interval> merged;
        for (const auto& iv : intervals_) {
            if (merged.empty()) { merged.push_back(iv); continue; }
            auto& cur = merged.back();
            const bool overlaps = iv.lo < cur.hi;
            const bool touches = iv.lo == cur.hi && (iv.lo_closed || cur.hi_closed);
            if (overlaps || touches) {
                if (iv.lo == cur.lo) cur.lo_closed = cur.lo_closed || iv.lo_closed;
                if (iv.hi > cur.hi) { cur.hi = iv.hi; cur.hi_closed = iv.hi_closed; }
                else if (iv.hi == cur.hi) cur.hi_closed = cur.hi_closed || iv.hi_closed;
            } else {
                merged.push_back(iv);
            }
        }
        intervals_ = std::move(merged);
    }

    void absorb_atoms() {
        std::vector<double> kept;
        for (double a : atoms_) {
            bool absorbed = false;
            for (auto& iv : intervals_) {
                if (a < iv.lo || a > iv.hi) continue;
                if (a == iv.lo) { iv.lo_closed = true; absorbed = true; break; }
                if (a == iv.hi) { iv.hi_closed = true; absorbed = true; break; }
                absorbed = true; // interior
                break;
            }
            if (!absorbed) kept.push_back(a);
        }
        atoms_ = std::move(kept);
    }
};

// Exact Boolean combination of two canonical sets on the same window,
// via the elementary decomposition induced by all boundary coordinates.
inline RealSet set_combine(const RealSet& a, const RealSet& b, SetOp op) {
    const Window& w = a.window();
    if (!w.matches(b.window()))
        throw WindowMismatch("set_combine: operand windows differ");

    // Joint snap so both operands agree on boundary coordinates.
    std::vector<double> coords{w.lo, w.hi};
    auto collect = [&coords](const RealSet& s) {
        for (const auto& iv : s.intervals()) { coords.push_back(iv.lo); coords.push_back(iv.hi); }
        for (double x : s.atoms()) coords.push_back(x);
    };
    collect(a);
    collect(b);
    std::sort(coords.begin(), coords.end());

    const double eps = w.eps_atom;
    std::vector<double> vals, reps, events;
    std::size_t i = 0;
    while (i < coords.size()) {
        std::size_t j = i;
        while (j + 1 < coords.size() && coords[j + 1] - coords[j] <= eps) ++j;
        double rep = coords[i];
        for (std::size_t k = i; k <= j; ++k)
            if (coords[k] == w.lo || coords[k] == w.hi) { rep = coords[k]; break; }
        for (std::size_t k = i; k <= j; ++k) {
            if (vals.empty() || vals.back() != coords[k]) {
                vals.push_back(coords[k]);
                reps.push_back(rep);
            }
        }
        if (rep >= w.lo && rep <= w.hi) events.push_back(rep);
        i = j + 1;
    }
    events.erase(std::unique(events.begin(), events.end()), events.end());

    auto snap = [&](double x) {
        auto it = std::lower_bound(vals.begin(), vals.end(), x);
        return reps[static_cast<std::size_t>(it - vals.begin())];
    };
    auto remap = [&](const RealSet& s) {
        std::vector<Interval> ivs = s.intervals();
        for (auto& iv : ivs) { iv.lo = snap(iv.lo); iv.hi = snap(iv.hi); }
        std::vector<double> ats = s.atoms();
        for (auto& x : ats) x = snap(x);
        return RealSet(w, std::move(ivs), std::move(ats));
    };
    const RealSet sa = remap(a);
    const RealSet sb = remap(b);

    auto apply = [op](bool ina, bool inb) {
        switch (op) {
            case SetOp::Union: return ina || inb;
            case SetOp::Intersect: return ina && inb;
            case SetOp::Diff: return ina && !inb;
        }
        return false;
    };

    // Elementary pieces: each event point, and each open gap between
    // consecutive events. Membership is constant on every piece.
    std::vector<Interval> out_ivs;
    std::vector<double> out_atoms;
    for (std::size_t k = 0; k < events.size(); ++k) {
        if (apply(sa.contains(events[k]), sb.contains(events[k])))
            out_atoms.push_back(events[k]);
        if (k + 1 < events.size()) {
            const double mid = 0.5 * (events[k] + events[k + 1]);
            if (apply(sa.interval_interior_contains(mid), sb.interval_interior_contains(mid)))
                out_ivs.push_back(Interval{events[k], events[k + 1], false, false});
        }
    }
    return RealSet(w, std::move(out_ivs), std::move(out_atoms));
}

inline RealSet set_union(const RealSet& a, const RealSet& b) {
    return set_combine(a, b, SetOp::Union);
}
inline RealSet set_intersect(const RealSet& a, const RealSet& b) {
    return set_combine(a, b, SetOp::Intersect);
}
inline RealSet set_diff(const RealSet& a, const RealSet& b) {
    return set_combine(a, b, SetOp::Diff);
}

inline bool RealSet::is_subset_of(const RealSet& o) const {
    return set_combine(*this, o, SetOp::Diff).is_empty();
}

} // namespace emz
