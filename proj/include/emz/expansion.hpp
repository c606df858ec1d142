#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "emz/errors.hpp"
#include "emz/numerics.hpp"
#include "emz/operator_catalog.hpp"
#include "emz/ordered_rep.hpp"
#include "emz/vector_op.hpp"

namespace emz {

// One generalized-eigenfunction entry: at the atom lambda the kernel of this
// multiplicity slot is the named coordinate's eigenfunction, scaled so that
// transform/expand are mutually inverse against the theta weights
// (scale = 1/sqrt(theta({lambda})); catalog weights are 1, so the kernels
// coincide with the plain eigenfunctions).
struct KernelEntry {
    double lambda = 0.0;
    std::string slot_id;
    double theta_weight = 1.0;
    double scale = 1.0;
    std::string tag; // provenance branch that produced the entry
};

struct EigenKernel {
    int level = 1;
    RealSet support; // s_level
    std::vector<KernelEntry> entries; // sorted by lambda

    const KernelEntry* find(double lambda, double eps) const {
        for (const auto& e : entries)
            if (std::abs(e.lambda - lambda) <= eps) return &e;
        return nullptr;
    }
};

struct KernelSet {
    Window win;
    std::vector<EigenKernel> kernels;          // one per multiplicity level
    std::map<std::string, EigenData> eigen;    // per slot id

    explicit KernelSet(const Window& w) : win(w) {}

    // Coordinate value Theta_{k,slot}(t, lambda); zero off the owning slot.
    cd eval(int level_idx, const std::string& slot_id, double t, double lambda) const {
        const KernelEntry* e = kernels[level_idx].find(lambda, win.eps_atom);
        if (!e || e->slot_id != slot_id) return cd(0, 0);
        const EigenEntry* u = eigen.at(slot_id).find(lambda, win.eps_atom);
        return u ? e->scale * u->u(t) : cd(0, 0);
    }
};

// Builds the kernels of the eigenfunction expansion for a pure-point
// catalog system, following the max/min selections recorded in the
// ordered-representation provenance.
inline KernelSet build_kernels(const EMZSystem& sys, const OrderedRepresentation& orep) {
    const Window& w = sys.window();
    require_pp_system(sys, "build_kernels");
    KernelSet out(w);
    for (const auto& op : sys.operators()) {
        if (op.family() == FamilyKind::Symbolic)
            throw UnsupportedFamily(
                "build_kernels: symbolic slots carry no coordinate eigenfunctions");
        out.eigen.emplace(op.id(), eigensolve(op, w));
    }
    for (const auto& lvl : orep.provenance.levels) {
        EigenKernel k;
        k.level = lvl.level;
        k.support = static_cast<std::size_t>(lvl.level) <= orep.mult_sets.size()
                        ? orep.mult_sets[lvl.level - 1]
                        : RealSet::empty(w);
        for (const auto& piece : lvl.kept) {
            for (double a : piece.cls.pp_support().atoms()) {
                KernelEntry e;
                e.lambda = a;
                e.slot_id = piece.slot_id;
                e.theta_weight = orep.theta_pp.mass_at(a);
                if (!(e.theta_weight > 0.0))
                    throw Error("internal: kernel atom missing from theta");
                e.scale = 1.0 / std::sqrt(e.theta_weight);
                e.tag = piece.slot_id + "@level" + std::to_string(lvl.level);
                k.entries.push_back(std::move(e));
            }
        }
        std::sort(k.entries.begin(), k.entries.end(),
                  [](const KernelEntry& a, const KernelEntry& b) { return a.lambda < b.lambda; });
        out.kernels.push_back(std::move(k));
    }
    return out;
}

// Coefficients (Uw)^k(lambda) of the direct transform, one list per
// multiplicity slot, sorted by lambda.
struct ExpansionCoefficients {
    std::vector<std::vector<std::pair<double, cd>>> by_level;

    double parseval_sum(const KernelSet& ks) const {
        double s = 0.0;
        for (std::size_t k = 0; k < by_level.size(); ++k)
            for (const auto& [lam, c] : by_level[k]) {
                const KernelEntry* e = ks.kernels[k].find(lam, ks.win.eps_atom);
                s += std::norm(c) * (e ? e->theta_weight : 1.0);
            }
        return s;
    }
};

// Direct transform: inner products against the kernels, evaluated by exact
// coefficient algebra over the eigenbasis.
inline ExpansionCoefficients transform(const EMZSystem& sys, const KernelSet& ks,
                                       const VectorFunction& w) {
    const double eps = sys.window().eps_atom;
    ExpansionCoefficients out;
    for (const auto& kernel : ks.kernels) {
        std::vector<std::pair<double, cd>> level;
        for (const auto& e : kernel.entries) {
            const Slot& slot = sys.slot(e.slot_id);
            const int idx = slot.atom_index(e.lambda, eps);
            cd c(0, 0);
            auto it = w.coeffs.find(e.slot_id);
            if (it != w.coeffs.end() && idx >= 0 && idx < static_cast<int>(it->second.size()))
                c = it->second[idx];
            level.push_back({e.lambda, c * e.scale});
        }
        out.by_level.push_back(std::move(level));
    }
    return out;
}

// Inverse transform (eigenfunction expansion). Atoms with |lambda| above the
// truncation bound are dropped; the squared reconstruction error equals the
// dropped Parseval tail exactly.
inline VectorFunction expand(const EMZSystem& sys, const KernelSet& ks,
                             const ExpansionCoefficients& coeffs,
                             double truncation_bound = std::numeric_limits<double>::infinity()) {
    const double eps = sys.window().eps_atom;
    VectorFunction out;
    for (const auto& s : sys.slots())
        out.coeffs[s.id] = std::vector<cd>(s.atoms.size(), cd(0, 0));
    for (std::size_t k = 0; k < coeffs.by_level.size() && k < ks.kernels.size(); ++k) {
        for (const auto& [lam, c] : coeffs.by_level[k]) {
            if (std::abs(lam) > truncation_bound) continue;
            const KernelEntry* e = ks.kernels[k].find(lam, eps);
            if (!e) continue;
            const Slot& slot = sys.slot(e->slot_id);
            const int idx = slot.atom_index(lam, eps);
            if (idx >= 0)
                out.coeffs[e->slot_id][idx] += c * e->scale * e->theta_weight;
        }
    }
    return out;
}

// F(T) realized through the integral-operator kernel
//   K(F; x, s) = sum_k int_Delta F Theta_k(x,.) conj(Theta_k(s,.)) dtheta,
// which for pure point theta reduces to weighted sums over the atoms in
// Delta. apply() must coincide with the Borel calculus route.
class KernelOperator {
public:
    KernelOperator(const EMZSystem& sys, const KernelSet& ks, std::function<cd(double)> F,
                   RealSet delta)
        : sys_(sys), ks_(ks), F_(std::move(F)), delta_(std::move(delta)) {
        if (!delta_.window().matches(sys.window()))
            throw WindowMismatch("kernel_operator: window mismatch");
        for (const auto& kernel : ks_.kernels)
            for (const auto& e : kernel.entries)
                if (delta_.contains(e.lambda)) {
                    const cd v = F_(e.lambda);
                    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                        throw UnboundedFunction("kernel_operator: F not finite at lambda = " +
                                                std::to_string(e.lambda));
                }
    }

    VectorFunction apply(const VectorFunction& f) const {
        ExpansionCoefficients c = transform(sys_, ks_, f);
        for (std::size_t k = 0; k < c.by_level.size(); ++k)
            for (auto& [lam, v] : c.by_level[k])
                v *= delta_.contains(lam) ? F_(lam) : cd(0, 0);
        return expand(sys_, ks_, c);
    }

    // Coordinate kernel K_i(F; x, s) for coordinate slot_id.
    cd kernel_value(const std::string& slot_id, double x, double s) const {
        cd acc(0, 0);
        for (const auto& kernel : ks_.kernels)
            for (const auto& e : kernel.entries) {
                if (e.slot_id != slot_id || !delta_.contains(e.lambda)) continue;
                const EigenEntry* u = ks_.eigen.at(slot_id).find(e.lambda, ks_.win.eps_atom);
                if (!u) continue;
                acc += F_(e.lambda) * (e.scale * u->u(x)) * std::conj(e.scale * u->u(s)) *
                       e.theta_weight;
            }
        return acc;
    }

    const RealSet& delta() const { return delta_; }

private:
    const EMZSystem& sys_;
    const KernelSet& ks_;
    std::function<cd(double)> F_;
    RealSet delta_;
};

inline KernelOperator kernel_operator(const EMZSystem& sys, const KernelSet& ks,
                                      std::function<cd(double)> F, RealSet delta) {
    return KernelOperator(sys, ks, std::move(F), std::move(delta));
}

// Entire-in-lambda solution basis for the second-order expressions:
//   c(t, lambda) = cos(sqrt(lambda) t), s(t, lambda) = sin(sqrt(lambda) t)/sqrt(lambda)
// (hyperbolic branch for negative argument, so both are entire).
inline double entire_cos(double t, double lam) {
    if (lam >= 0) return std::cos(std::sqrt(lam) * t);
    return std::cosh(std::sqrt(-lam) * t);
}

inline double entire_sinc(double t, double lam) {
    const double q = lam * t * t;
    if (std::abs(q) < 1e-10) return t * (1.0 - q / 6.0);
    if (lam > 0) {
        const double r = std::sqrt(lam);
        return std::sin(r * t) / r;
    }
    const double r = std::sqrt(-lam);
    return std::sinh(r * t) / r;
}

struct BasisFunction {
    std::string name;
    std::function<cd(double, double)> eval; // (t, lambda)
};

// The defining system of one coordinate family.
inline std::vector<BasisFunction> solution_basis(const OperatorSpec& spec) {
    switch (spec.family()) {
        case FamilyKind::ImpulseOnUnit:
            return {{"exp(i*lambda*t)", [](double t, double lam) {
                         return cd(std::cos(lam * t), std::sin(lam * t));
                     }}};
        case FamilyKind::DirichletSLOnPi:
            return {{"cos(sqrt(lambda)*t)",
                     [](double t, double lam) { return cd(entire_cos(t, lam), 0); }},
                    {"sin(sqrt(lambda)*t)/sqrt(lambda)",
                     [](double t, double lam) { return cd(entire_sinc(t, lam), 0); }}};
        case FamilyKind::HalfLineKinetic: {
            // -u'' = lam u needs the basis at lam; +u'' = lam u at -lam
            const double flip = spec.half_line().sign < 0 ? 1.0 : -1.0;
            return {{"cos(sqrt(lambda)*t)",
                     [flip](double t, double lam) { return cd(entire_cos(t, flip * lam), 0); }},
                    {"sin(sqrt(lambda)*t)/sqrt(lambda)",
                     [flip](double t, double lam) { return cd(entire_sinc(t, flip * lam), 0); }}};
        }
        case FamilyKind::Symbolic:
            break;
    }
    throw UnknownSolutionBasis("no analytic solution basis for operator " + spec.id());
}

// Per multiplicity slot: the coefficients gamma and the defining system
// sigma of the analytic decomposition Theta_k = sum_s gamma_{sk} sigma_{sk}.
struct SlotBasisDescriptor {
    std::string slot_id;
    std::vector<std::string> names;
    RealSet region; // lambdas of this kernel drawn from the slot
};

struct KernelDecomposition {
    int level = 1;
    int M = 0; // defining-system size (max basis size over contributing slots)
    std::vector<SlotBasisDescriptor> bases;
    std::vector<std::pair<double, std::vector<cd>>> gamma; // per atom, padded to M

    const std::vector<cd>* gamma_at(double lambda, double eps) const {
        for (const auto& [lam, g] : gamma)
            if (std::abs(lam - lambda) <= eps) return &g;
        return nullptr;
    }
};

// Coefficients of one eigenfunction in its family's analytic basis.
inline std::vector<cd> eigenfunction_in_basis(const OperatorSpec& spec, double lambda) {
    switch (spec.family()) {
        case FamilyKind::ImpulseOnUnit:
            return {cd(1, 0)};
        case FamilyKind::DirichletSLOnPi: {
            const double n = std::round(std::sqrt(lambda));
            return {cd(0, 0), cd(std::sqrt(2.0 / M_PI) * n, 0)};
        }
        case FamilyKind::HalfLineKinetic: {
            const double k = spec.half_line().bc;
            const double c = std::sqrt(2.0 / k);
            return {cd(c, 0), cd(-c / k, 0)};
        }
        case FamilyKind::Symbolic:
            break;
    }
    throw UnknownSolutionBasis("no analytic solution basis for operator " + spec.id());
}

inline std::vector<KernelDecomposition> analytic_decomposition(const EMZSystem& sys,
                                                               const KernelSet& ks) {
    const Window& w = sys.window();
    std::vector<KernelDecomposition> out;
    for (const auto& kernel : ks.kernels) {
        KernelDecomposition d;
        d.level = kernel.level;
        std::map<std::string, std::vector<double>> region_atoms;
        for (const auto& e : kernel.entries) {
            const Slot& slot = sys.slot(e.slot_id);
            const auto basis = solution_basis(sys.op(slot.parent_id));
            d.M = std::max(d.M, static_cast<int>(basis.size()));
            region_atoms[e.slot_id].push_back(e.lambda);
        }
        for (auto& [slot_id, atoms] : region_atoms) {
            const Slot& slot = sys.slot(slot_id);
            SlotBasisDescriptor sb;
            sb.slot_id = slot_id;
            for (const auto& b : solution_basis(sys.op(slot.parent_id))) sb.names.push_back(b.name);
            sb.region = RealSet::of_atoms(w, atoms);
            d.bases.push_back(std::move(sb));
        }
        for (const auto& e : kernel.entries) {
            const Slot& slot = sys.slot(e.slot_id);
            std::vector<cd> g = eigenfunction_in_basis(sys.op(slot.parent_id), e.lambda);
            for (auto& v : g) v *= e.scale;
            g.resize(d.M, cd(0, 0));
            d.gamma.push_back({e.lambda, std::move(g)});
        }
        std::sort(d.gamma.begin(), d.gamma.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(d));
    }
    return out;
}

// Matrix spectral measure rho_{sp}(Delta) = sum_k sum_{lambda in Delta}
// gamma_{sk} conj(gamma_{pk}) theta({lambda}): Hermitian, positive
// semidefinite and finitely additive over disjoint windows.
struct MatrixSpectralMeasure {
    int dim = 0;
    std::vector<std::vector<cd>> rho;

    double min_eigenvalue() const { return num::hermitian_eigenvalues(rho).front(); }

    double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                d = std::max(d, std::abs(rho[i][j] - std::conj(rho[j][i])));
        return d;
    }
};

inline MatrixSpectralMeasure matrix_measure(const std::vector<KernelDecomposition>& decomps,
                                            const WeightedPPMeasure& theta_pp,
                                            const RealSet& delta) {
    MatrixSpectralMeasure out;
    for (const auto& d : decomps) out.dim = std::max(out.dim, d.M);
    out.rho.assign(out.dim, std::vector<cd>(out.dim, cd(0, 0)));
    for (const auto& d : decomps)
        for (const auto& [lam, g] : d.gamma) {
            if (!delta.contains(lam)) continue;
            const double w = theta_pp.mass_at(lam);
            for (int s = 0; s < d.M; ++s)
                for (int p = 0; p < d.M; ++p)
                    out.rho[s][p] += g[s] * std::conj(g[p]) * w;
        }
    return out;
}

} // namespace emz
