#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emz/errors.hpp"
#include "emz/measure.hpp"
#include "emz/operator_catalog.hpp"
#include "emz/real_set.hpp"

namespace emz {

// One simple slot of the redesignated system: operators with m cyclic
// vectors are pre-split into m simple slots, slot k carrying the
// theta-essential restriction of the measure to the k-th multiplicity set.
struct Slot {
    std::string id;        // parent id, or "<parent>#k" for split slots
    std::string parent_id;
    int level = 1;         // 1-based level within the parent
    SpectralMeasureClass theta;
    RealSet subspectrum;   // support of theta
    std::vector<double> atoms;        // point spectrum positions
    std::vector<double> atom_weights; // norm weights (catalog families: 1)

    bool pure_pp() const { return theta.ac_support().is_empty(); }

    int atom_index(double lambda, double eps) const {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (std::abs(atoms[i] - lambda) <= eps) return static_cast<int>(i);
        return -1;
    }
};

class EMZSystem {
public:
    EMZSystem(std::vector<OperatorSpec> ops, const Window& w) : win_(w), ops_(std::move(ops)) {
        std::set<std::string> seen;
        for (const auto& op : ops_)
            if (!seen.insert(op.id()).second)
                throw SchemaError("duplicate operator id: " + op.id());
        for (const auto& op : ops_) {
            OrderedRepData rep = ordered_rep_data(op, win_);
            max_m_ = std::max(max_m_, rep.m);
            for (int k = 1; k <= rep.m; ++k) {
                Slot s;
                s.parent_id = op.id();
                s.level = k;
                s.id = rep.m == 1 ? op.id() : op.id() + "#" + std::to_string(k);
                s.theta = class_restrict(rep.theta, rep.mult_sets[k - 1]);
                if (s.theta.is_null()) continue; // vacuous level
                s.subspectrum = s.theta.support();
                for (double a : s.theta.pp_support().atoms()) {
                    s.atoms.push_back(a);
                    s.atom_weights.push_back(rep.pp_weights ? rep.pp_weights->mass_at(a) : 1.0);
                }
                slots_.push_back(std::move(s));
            }
        }
        if (slots_.empty()) throw SchemaError("system has no non-null slots");
    }

    const Window& window() const { return win_; }
    const std::vector<OperatorSpec>& operators() const { return ops_; }
    const std::vector<Slot>& slots() const { return slots_; }
    int max_coordinate_multiplicity() const { return max_m_; }

    bool all_slots_pp() const {
        for (const auto& s : slots_)
            if (!s.pure_pp()) return false;
        return true;
    }

    const Slot& slot(const std::string& id) const {
        for (const auto& s : slots_)
            if (s.id == id) return s;
        throw SchemaError("unknown slot id: " + id);
    }

    const OperatorSpec& op(const std::string& id) const {
        for (const auto& o : ops_)
            if (o.id() == id) return o;
        throw SchemaError("unknown operator id: " + id);
    }

private:
    Window win_;
    std::vector<OperatorSpec> ops_;
    std::vector<Slot> slots_;
    int max_m_ = 1;
};

struct GraphEdge {
    int a = 0, b = 0; // indices into nodes
    RealSet overlap;  // B_{sl}: plain set intersection of the subspectra
};

struct SuperpositionGraph {
    std::vector<std::string> nodes; // slot ids, sorted
    std::vector<GraphEdge> edges;
    std::vector<std::vector<bool>> adj;

    bool adjacent(int i, int j) const { return adj[i][j]; }
    int degree(int i) const {
        int d = 0;
        for (bool b : adj[i]) d += b ? 1 : 0;
        return d;
    }
};

// Two slots superpose when their subspectra overlap in a set of positive
// class measure for at least one of the two; coexistence in one group
// requires the overlap to be null for BOTH.
inline SuperpositionGraph build_superposition_graph(const EMZSystem& sys) {
    SuperpositionGraph g;
    for (const auto& s : sys.slots()) g.nodes.push_back(s.id);
    std::sort(g.nodes.begin(), g.nodes.end());
    const int n = static_cast<int>(g.nodes.size());
    g.adj.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Slot& a = sys.slot(g.nodes[i]);
            const Slot& b = sys.slot(g.nodes[j]);
            RealSet overlap = set_intersect(a.subspectrum, b.subspectrum);
            if (overlap.is_empty()) continue;
            const bool pos = class_measure_sign(a.theta, overlap) == MeasureSign::positive ||
                             class_measure_sign(b.theta, overlap) == MeasureSign::positive;
            if (pos) {
                g.adj[i][j] = g.adj[j][i] = true;
                g.edges.push_back(GraphEdge{i, j, std::move(overlap)});
            }
        }
    return g;
}

struct PartitionResult {
    std::vector<std::vector<std::string>> groups; // the A_k, each sorted by id
    int lambda = 0;
    std::string certificate; // "exact" or "greedy+clique-bound"
    int clique_lower_bound = 0;
    std::optional<bool> unique_optimum; // filled for graphs of <= 9 nodes
};

namespace detail {

inline int greedy_clique_bound(const SuperpositionGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0) return 0;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return g.degree(a) > g.degree(b); });
    int best = 1;
    for (int start : order) {
        std::vector<int> clique{start};
        for (int v : order) {
            if (v == start) continue;
            bool ok = true;
            for (int c : clique)
                if (!g.adjacent(v, c)) { ok = false; break; }
            if (ok) clique.push_back(v);
        }
        best = std::max(best, static_cast<int>(clique.size()));
    }
    return best;
}

// First-found canonical k-coloring in node order with ascending color trial:
// the returned assignment is the lexicographically smallest proper one.
inline bool color_with_k(const SuperpositionGraph& g, int k, std::vector<int>& color) {
    const int n = static_cast<int>(g.nodes.size());
    color.assign(n, -1);
    std::vector<int> used_upto(n + 1, 0);
    int v = 0;
    while (true) {
        if (v == n) return true;
        const int max_new = std::min(k - 1, v == 0 ? 0 : used_upto[v]);
        int c = color[v] + 1;
        bool placed = false;
        for (; c <= max_new; ++c) {
            bool ok = true;
            for (int u = 0; u < v; ++u)
                if (g.adjacent(u, v) && color[u] == c) { ok = false; break; }
            if (ok) {
                color[v] = c;
                used_upto[v + 1] = std::max(used_upto[v], c + 1);
                placed = true;
                break;
            }
        }
        if (placed) { ++v; continue; }
        color[v] = -1;
        if (v == 0) return false;
        --v; // backtrack
    }
}

inline long count_optimal_colorings(const SuperpositionGraph& g, int k, long cap) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> color(n, -1);
    long count = 0;
    // canonical enumeration: a node may open at most one new color
    std::function<void(int, int)> rec = [&](int v, int used) {
        if (count >= cap) return;
        if (v == n) { ++count; return; }
        const int limit = std::min(k - 1, used);
        for (int c = 0; c <= limit; ++c) {
            bool ok = true;
            for (int u = 0; u < v; ++u)
                if (g.adjacent(u, v) && color[u] == c) { ok = false; break; }
            if (!ok) continue;
            color[v] = c;
            rec(v + 1, std::max(used, c + 1));
            color[v] = -1;
        }
    };
    rec(0, 0);
    return count;
}

inline std::vector<int> dsatur_coloring(const SuperpositionGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> color(n, -1);
    std::vector<std::set<int>> neighbor_colors(n);
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (color[v] != -1) continue;
            if (pick == -1) { pick = v; continue; }
            const auto sat_v = neighbor_colors[v].size();
            const auto sat_p = neighbor_colors[pick].size();
            if (sat_v > sat_p || (sat_v == sat_p && g.degree(v) > g.degree(pick)))
                pick = v;
        }
        int c = 0;
        while (neighbor_colors[pick].count(c)) ++c;
        color[pick] = c;
        for (int u = 0; u < n; ++u)
            if (g.adjacent(pick, u)) neighbor_colors[u].insert(c);
    }
    return color;
}

} // namespace detail

// Minimal partition of the slots into groups with pairwise-null overlaps:
// a minimum proper coloring of the superposition graph. Exact search up to
// 12 nodes, DSATUR with a greedy clique lower bound beyond.
inline PartitionResult spectral_index(const EMZSystem& sys, const SuperpositionGraph& g) {
    PartitionResult out;
    const int n = static_cast<int>(g.nodes.size());
    out.clique_lower_bound = detail::greedy_clique_bound(g);
    std::vector<int> color;
    if (n <= 12) {
        out.certificate = "exact";
        for (int k = std::max(1, out.clique_lower_bound); k <= std::max(1, n); ++k)
            if (detail::color_with_k(g, k, color)) { out.lambda = k; break; }
        if (n <= 9 && out.lambda > 0)
            out.unique_optimum = detail::count_optimal_colorings(g, out.lambda, 2) == 1;
    } else {
        out.certificate = "greedy+clique-bound";
        color = detail::dsatur_coloring(g);
        out.lambda = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    }
    out.groups.assign(out.lambda, {});
    for (int v = 0; v < n; ++v) out.groups[color[v]].push_back(g.nodes[v]);
    for (auto& grp : out.groups) std::sort(grp.begin(), grp.end());

    // partition validity: every group is an independent set
    for (const auto& grp : out.groups)
        for (std::size_t i = 0; i < grp.size(); ++i)
            for (std::size_t j = i + 1; j < grp.size(); ++j) {
                const int a = static_cast<int>(
                    std::find(g.nodes.begin(), g.nodes.end(), grp[i]) - g.nodes.begin());
                const int b = static_cast<int>(
                    std::find(g.nodes.begin(), g.nodes.end(), grp[j]) - g.nodes.begin());
                if (g.adjacent(a, b))
                    throw Error("internal: partition group is not independent");
            }
    if (out.lambda < sys.max_coordinate_multiplicity())
        throw Error("internal: spectral index below max coordinate multiplicity");
    return out;
}

inline PartitionResult spectral_index(const EMZSystem& sys) {
    return spectral_index(sys, build_superposition_graph(sys));
}

// Symbolic composition a_k = direct sum of the designated slot cyclic
// vectors of the group. Point-spectrum slots use the vector with every
// eigen-coefficient equal to one; ac slots carry their support symbolically.
struct CyclicPlanPart {
    std::string slot_id;
    std::string kind; // "pp-unit-coefficients" | "ac-support-carrier" | "mixed"
    int atom_count = 0;
};

struct CyclicPlanVector {
    int group = 0;
    std::vector<CyclicPlanPart> parts;
};

inline std::vector<CyclicPlanVector> cyclic_vector_plan(const EMZSystem& sys,
                                                        const PartitionResult& p) {
    std::vector<CyclicPlanVector> out;
    for (std::size_t k = 0; k < p.groups.size(); ++k) {
        CyclicPlanVector v;
        v.group = static_cast<int>(k + 1);
        for (const auto& id : p.groups[k]) {
            const Slot& s = sys.slot(id);
            CyclicPlanPart part;
            part.slot_id = id;
            part.atom_count = static_cast<int>(s.atoms.size());
            if (s.pure_pp()) part.kind = "pp-unit-coefficients";
            else if (s.atoms.empty()) part.kind = "ac-support-carrier";
            else part.kind = "mixed";
            v.parts.push_back(std::move(part));
        }
        out.push_back(std::move(v));
    }
    return out;
}

// Vector in the direct-sum space, represented per pp slot by coefficients
// over that slot's point spectrum (aligned with Slot::atoms).
struct VectorFunction {
    std::map<std::string, std::vector<cd>> coeffs;

    double norm2(const EMZSystem& sys) const {
        double s = 0.0;
        for (const auto& [id, c] : coeffs) {
            const Slot& slot = sys.slot(id);
            if (c.size() != slot.atoms.size())
                throw DimensionMismatch("vector coefficients do not match slot " + id);
            for (std::size_t i = 0; i < c.size(); ++i)
                s += std::norm(c[i]) * slot.atom_weights[i];
        }
        return s;
    }
};

inline void require_pp_system(const EMZSystem& sys, const char* what) {
    if (!sys.all_slots_pp())
        throw SymbolicACUnsupported(std::string(what) +
                                    ": continuous spectral content is carried symbolically only");
}

struct ResolutionResult {
    VectorFunction projected;
    double norm2 = 0.0;
};

// E(Delta) x: coordinatewise truncation of coefficients to eigenvalues in
// Delta; the reported norm is the direct sum of the coordinate norms.
inline ResolutionResult identity_resolution_apply(const EMZSystem& sys, const RealSet& delta,
                                                  const VectorFunction& x) {
    require_pp_system(sys, "identity_resolution_apply");
    if (!delta.window().matches(sys.window()))
        throw WindowMismatch("identity_resolution_apply: window mismatch");
    ResolutionResult out;
    for (const auto& [id, c] : x.coeffs) {
        const Slot& slot = sys.slot(id);
        if (c.size() != slot.atoms.size())
            throw DimensionMismatch("vector coefficients do not match slot " + id);
        std::vector<cd> kept(c.size(), cd(0, 0));
        for (std::size_t i = 0; i < c.size(); ++i)
            if (delta.contains(slot.atoms[i])) {
                kept[i] = c[i];
                out.norm2 += std::norm(c[i]) * slot.atom_weights[i];
            }
        out.projected.coeffs[id] = std::move(kept);
    }
    return out;
}

// f(T) x = direct sum of f(T_i) x_i: every coefficient c_lambda maps to
// f(lambda) c_lambda. f must be finite at every charged eigenvalue.
inline VectorFunction borel_calculus_apply(const EMZSystem& sys,
                                           const std::function<cd(double)>& f,
                                           const VectorFunction& x) {
    require_pp_system(sys, "borel_calculus_apply");
    VectorFunction out;
    for (const auto& [id, c] : x.coeffs) {
        const Slot& slot = sys.slot(id);
        if (c.size() != slot.atoms.size())
            throw DimensionMismatch("vector coefficients do not match slot " + id);
        std::vector<cd> mapped(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            const cd v = f(slot.atoms[i]);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw UnboundedFunction("borel_calculus_apply: f is not finite at lambda = " +
                                        std::to_string(slot.atoms[i]));
            mapped[i] = v * c[i];
        }
        out.coeffs[id] = std::move(mapped);
    }
    return out;
}

} // namespace emz
