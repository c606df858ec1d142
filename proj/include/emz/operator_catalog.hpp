#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "emz/errors.hpp"
#include "emz/measure.hpp"
#include "emz/real_set.hpp"

namespace emz {

using cd = std::complex<double>;

// Concrete coordinate operators:
//   HalfLineKinetic  -(d/dt)^2 (sign -) or +(d/dt)^2 (sign +) on [0,inf),
//                    boundary condition f(0) + k f'(0) = 0, k real or infinite.
//   ImpulseOnUnit    (1/i) d/dt on [0,1], f(0) = e^{i alpha} f(1).
//   DirichletSLOnPi  -(d/dt)^2 on [0,pi], f(0) = f(pi) = 0.
//   Symbolic         spectral data supplied directly (measure class,
//                    multiplicity sets, optional pp weights), no coordinate
//                    realization. Singular-potential systems such as the
//                    1/cos^2 multi-interval Hamiltonian are catalogued this
//                    way: encode each cell's known spectral data as a
//                    symbolic entry; no numerics are attempted for them.
enum class FamilyKind { HalfLineKinetic, ImpulseOnUnit, DirichletSLOnPi, Symbolic };

struct HalfLineKineticParams {
    int sign = -1;          // -1: kinetic -(d/dt)^2, +1: mirror +(d/dt)^2
    double bc = 0.0;        // k in f(0) + k f'(0) = 0
    bool bc_infinite = false;

    // The worked case split: no bound state for k in (-inf,0] or k = inf.
    bool has_bound_state() const { return !bc_infinite && bc > 0.0; }
    double bound_state_lambda() const { return sign / (bc * bc); }
};

struct ImpulseParams {
    double alpha = 0.0; // in [0, 2*pi]
};

struct DirichletParams {};

struct SymbolicData {
    SpectralMeasureClass theta;
    std::vector<RealSet> mult_sets; // decreasing; raw user data
    std::optional<WeightedPPMeasure> pp_weights;
};

class OperatorSpec {
public:
    static OperatorSpec half_line_kinetic(std::string id, int sign, double k) {
        if (sign != -1 && sign != 1) throw SchemaError("half_line_kinetic: sign must be -1 or +1");
        if (!std::isfinite(k)) throw SchemaError("half_line_kinetic: use *_infinite_bc for k = inf");
        return OperatorSpec(std::move(id), HalfLineKineticParams{sign, k, false});
    }
    static OperatorSpec half_line_kinetic_infinite_bc(std::string id, int sign) {
        if (sign != -1 && sign != 1) throw SchemaError("half_line_kinetic: sign must be -1 or +1");
        return OperatorSpec(std::move(id), HalfLineKineticParams{sign, 0.0, true});
    }
    static OperatorSpec impulse_on_unit(std::string id, double alpha) {
        if (!(alpha >= 0.0 && alpha <= 2.0 * M_PI + 1e-12))
            throw SchemaError("impulse_on_unit: alpha must lie in [0, 2*pi]");
        return OperatorSpec(std::move(id), ImpulseParams{alpha});
    }
    static OperatorSpec dirichlet_sl_on_pi(std::string id) {
        return OperatorSpec(std::move(id), DirichletParams{});
    }
    static OperatorSpec symbolic(std::string id, SymbolicData data) {
        if (data.mult_sets.empty())
            throw SchemaError("symbolic operator needs at least one multiplicity set");
        for (std::size_t k = 0; k + 1 < data.mult_sets.size(); ++k)
            if (!data.mult_sets[k + 1].is_subset_of(data.mult_sets[k]))
                throw SchemaError("symbolic multiplicity sets must be decreasing");
        return OperatorSpec(std::move(id), std::move(data));
    }

    const std::string& id() const { return id_; }

    FamilyKind family() const {
        if (std::holds_alternative<HalfLineKineticParams>(params_)) return FamilyKind::HalfLineKinetic;
        if (std::holds_alternative<ImpulseParams>(params_)) return FamilyKind::ImpulseOnUnit;
        if (std::holds_alternative<DirichletParams>(params_)) return FamilyKind::DirichletSLOnPi;
        return FamilyKind::Symbolic;
    }

    const HalfLineKineticParams& half_line() const { return std::get<HalfLineKineticParams>(params_); }
    const ImpulseParams& impulse() const { return std::get<ImpulseParams>(params_); }
    const SymbolicData& symbolic_data() const { return std::get<SymbolicData>(params_); }

    // The paper's case split covers k in (-inf,0] u {inf}; strictly negative
    // k is carried through as "no bound state" and flagged in reports.
    bool needs_negative_bc_note() const {
        return family() == FamilyKind::HalfLineKinetic && !half_line().bc_infinite &&
               half_line().bc < 0.0;
    }

private:
    template <typename P>
    OperatorSpec(std::string id, P p) : id_(std::move(id)), params_(std::move(p)) {
        if (id_.empty()) throw SchemaError("operator id must be non-empty");
    }

    std::string id_;
    std::variant<HalfLineKineticParams, ImpulseParams, DirichletParams, SymbolicData> params_;
};

inline std::vector<double> impulse_eigenvalues(double alpha, const Window& w) {
    const double two_pi = 2.0 * M_PI;
    std::vector<double> out;
    const int n_lo = static_cast<int>(std::ceil((w.lo + alpha) / two_pi - 1e-12));
    const int n_hi = static_cast<int>(std::floor((w.hi + alpha) / two_pi + 1e-12));
    for (int n = n_lo; n <= n_hi; ++n) {
        const double x = two_pi * n - alpha;
        if (x >= w.lo - w.eps_atom && x <= w.hi + w.eps_atom) out.push_back(x);
    }
    return out;
}

inline std::vector<double> dirichlet_eigenvalues(const Window& w) {
    std::vector<double> out;
    for (int n = 1; static_cast<double>(n) * n <= w.hi + w.eps_atom; ++n) {
        const double lam = static_cast<double>(n) * n;
        if (lam >= w.lo - w.eps_atom) out.push_back(lam);
    }
    return out;
}

// Restriction of a set to the region actually charged by the class: interval
// overlap with the ac support plus atoms covered by the pp support.
inline RealSet charged_restriction_set(const SpectralMeasureClass& theta, const RealSet& e) {
    return set_union(set_intersect(e, theta.ac_support()).interval_part(),
                     set_intersect(e, theta.pp_support()));
}

// Subspectrum: the set where the spectral measures are concentrated,
// truncated to the window (continuous parts as open intervals, point
// spectra as atom families tagged with their generator).
inline RealSet subspectrum(const OperatorSpec& spec, const Window& w) {
    switch (spec.family()) {
        case FamilyKind::HalfLineKinetic: {
            const auto& p = spec.half_line();
            std::vector<Interval> ivs;
            if (p.sign < 0) ivs.push_back(Interval{0.0, w.hi, false, false});
            else ivs.push_back(Interval{w.lo, 0.0, false, false});
            std::vector<double> atoms;
            if (p.has_bound_state()) atoms.push_back(p.bound_state_lambda());
            return RealSet(w, std::move(ivs), std::move(atoms));
        }
        case FamilyKind::ImpulseOnUnit:
            return RealSet::of_atoms(w, impulse_eigenvalues(spec.impulse().alpha, w),
                                     "2*pi*n - alpha, n in Z");
        case FamilyKind::DirichletSLOnPi:
            return RealSet::of_atoms(w, dirichlet_eigenvalues(w), "n^2, n >= 1");
        case FamilyKind::Symbolic: {
            const auto& d = spec.symbolic_data();
            if (!d.theta.window().matches(w))
                throw WindowMismatch("symbolic spectral data lives on a different window");
            return d.theta.support();
        }
    }
    throw UnsupportedFamily("unknown operator family");
}

enum class TauKind { FirstOrderImpulse, NegSecondDeriv, PosSecondDeriv };

struct EigenEntry {
    double lambda = 0.0;
    double weight = 1.0; // norm weight for expansion coefficients
    std::function<cd(double)> u;   // L2-normalized eigenfunction
    std::function<cd(double)> du;
    std::function<cd(double)> d2u;
};

struct EigenData {
    std::string op_id;
    TauKind tau = TauKind::NegSecondDeriv;
    double x_lo = 0.0, x_hi = 1.0; // coordinate span for check grids and quadrature
    std::vector<EigenEntry> entries;

    const EigenEntry* find(double lambda, double eps) const {
        for (const auto& e : entries)
            if (std::abs(e.lambda - lambda) <= eps) return &e;
        return nullptr;
    }
};

inline cd tau_apply(TauKind tau, const EigenEntry& e, double x) {
    switch (tau) {
        case TauKind::FirstOrderImpulse: return cd(0, -1) * e.du(x); // (1/i) u'
        case TauKind::NegSecondDeriv: return -e.d2u(x);
        case TauKind::PosSecondDeriv: return e.d2u(x);
    }
    return cd(0, 0);
}

// Pure-point eigen structure for catalog families (closed forms; the
// half-line families contribute the bound state only).
inline EigenData eigensolve(const OperatorSpec& spec, const Window& w) {
    EigenData out;
    out.op_id = spec.id();
    switch (spec.family()) {
        case FamilyKind::ImpulseOnUnit: {
            out.tau = TauKind::FirstOrderImpulse;
            out.x_lo = 0.0;
            out.x_hi = 1.0;
            for (double lam : impulse_eigenvalues(spec.impulse().alpha, w)) {
                EigenEntry e;
                e.lambda = lam;
                e.u = [lam](double t) { return cd(std::cos(lam * t), std::sin(lam * t)); };
                e.du = [lam](double t) {
                    return cd(0, 1) * lam * cd(std::cos(lam * t), std::sin(lam * t));
                };
                e.d2u = [lam](double t) {
                    return -lam * lam * cd(std::cos(lam * t), std::sin(lam * t));
                };
                out.entries.push_back(std::move(e));
            }
            return out;
        }
        case FamilyKind::DirichletSLOnPi: {
            out.tau = TauKind::NegSecondDeriv;
            out.x_lo = 0.0;
            out.x_hi = M_PI;
            const double c = std::sqrt(2.0 / M_PI);
            for (double lam : dirichlet_eigenvalues(w)) {
                const double n = std::round(std::sqrt(lam));
                EigenEntry e;
                e.lambda = lam;
                e.u = [c, n](double t) { return cd(c * std::sin(n * t), 0); };
                e.du = [c, n](double t) { return cd(c * n * std::cos(n * t), 0); };
                e.d2u = [c, n](double t) { return cd(-c * n * n * std::sin(n * t), 0); };
                out.entries.push_back(std::move(e));
            }
            return out;
        }
        case FamilyKind::HalfLineKinetic: {
            const auto& p = spec.half_line();
            if (!p.has_bound_state())
                throw ContinuousSpectrumOnly(
                    "half-line operator with k in (-inf,0] or k = inf has no point spectrum");
            out.tau = p.sign < 0 ? TauKind::NegSecondDeriv : TauKind::PosSecondDeriv;
            out.x_lo = 0.0;
            out.x_hi = 20.0 * p.bc; // decay span: e^{-x/k} is ~2e-9 at 20k
            const double lam = p.bound_state_lambda();
            if (lam >= w.lo - w.eps_atom && lam <= w.hi + w.eps_atom) {
                const double k = p.bc;
                const double c = std::sqrt(2.0 / k);
                EigenEntry e;
                e.lambda = lam;
                e.u = [c, k](double t) { return cd(c * std::exp(-t / k), 0); };
                e.du = [c, k](double t) { return cd(-c / k * std::exp(-t / k), 0); };
                e.d2u = [c, k](double t) { return cd(c / (k * k) * std::exp(-t / k), 0); };
                out.entries.push_back(std::move(e));
            }
            return out;
        }
        case FamilyKind::Symbolic:
            throw UnsupportedFamily("symbolic operators carry no coordinate eigenfunctions");
    }
    throw UnsupportedFamily("unknown operator family");
}

struct EigenResidualReport {
    double max_bc_residual = 0.0;
    double max_ode_residual = 0.0;
};

// Residual verification on a check grid: boundary condition and
// (tau - lambda) u = 0 coordinatewise.
inline EigenResidualReport verify_eigen_data(const OperatorSpec& spec, const EigenData& d,
                                             int grid_n = 101) {
    EigenResidualReport rep;
    for (const auto& e : d.entries) {
        double bc = 0.0;
        switch (spec.family()) {
            case FamilyKind::ImpulseOnUnit: {
                const double a = spec.impulse().alpha;
                bc = std::abs(e.u(0.0) - cd(std::cos(a), std::sin(a)) * e.u(1.0));
                break;
            }
            case FamilyKind::DirichletSLOnPi:
                bc = std::max(std::abs(e.u(0.0)), std::abs(e.u(M_PI)));
                break;
            case FamilyKind::HalfLineKinetic:
                bc = std::abs(e.u(0.0) + spec.half_line().bc * e.du(0.0));
                break;
            case FamilyKind::Symbolic:
                break;
        }
        rep.max_bc_residual = std::max(rep.max_bc_residual, bc);
        for (int j = 0; j < grid_n; ++j) {
            const double x = d.x_lo + (d.x_hi - d.x_lo) * j / (grid_n - 1);
            rep.max_ode_residual = std::max(
                rep.max_ode_residual, std::abs(tau_apply(d.tau, e, x) - e.lambda * e.u(x)));
        }
    }
    return rep;
}

// Ordered-representation data of one coordinate operator: measure class,
// theta-essential multiplicity sets (e_1 = subspectrum for catalog
// families), and concrete pp weights where a point spectrum exists.
struct OrderedRepData {
    SpectralMeasureClass theta;
    std::vector<RealSet> mult_sets;
    int m = 1;
    std::optional<WeightedPPMeasure> pp_weights;
};

inline OrderedRepData ordered_rep_data(const OperatorSpec& spec, const Window& w) {
    OrderedRepData out;
    if (spec.family() == FamilyKind::Symbolic) {
        const auto& d = spec.symbolic_data();
        if (!d.theta.window().matches(w))
            throw WindowMismatch("symbolic spectral data lives on a different window");
        out.theta = d.theta;
        for (const auto& e : d.mult_sets) {
            RealSet essential = charged_restriction_set(d.theta, e);
            if (essential.is_empty()) break; // trailing null levels are vacuous
            out.mult_sets.push_back(std::move(essential));
        }
        if (out.mult_sets.empty()) out.mult_sets.push_back(RealSet::empty(w));
        out.m = static_cast<int>(out.mult_sets.size());
        if (d.pp_weights) out.pp_weights = d.pp_weights->restricted(d.theta.pp_support());
        else if (!d.theta.pp_support().is_empty()) {
            std::vector<std::pair<double, double>> atoms;
            for (double a : d.theta.pp_support().atoms()) atoms.push_back({a, 1.0});
            out.pp_weights = WeightedPPMeasure(w, std::move(atoms));
        }
        return out;
    }
    const RealSet eps_set = subspectrum(spec, w);
    out.theta = SpectralMeasureClass(eps_set.interval_part(), eps_set.atom_part());
    out.mult_sets = {eps_set};
    out.m = 1;
    if (!eps_set.atoms().empty()) {
        std::vector<std::pair<double, double>> atoms;
        for (double a : eps_set.atoms()) atoms.push_back({a, 1.0});
        out.pp_weights = WeightedPPMeasure(w, std::move(atoms));
    }
    return out;
}

// Spectral measure of a vector given by expansion coefficients over the
// operator's point spectrum: atoms at the eigenvalues with mass |c|^2 * w.
inline WeightedPPMeasure vector_spectral_measure(const OperatorSpec& spec, const Window& w,
                                                 const std::vector<cd>& coeffs) {
    const OrderedRepData rep = ordered_rep_data(spec, w);
    const auto& pp = rep.theta.pp_support().atoms();
    if (pp.empty())
        throw ContinuousSpectrumOnly("vector_spectral_measure needs a point spectrum");
    if (coeffs.size() != pp.size())
        throw DimensionMismatch("coefficient count does not match the eigenvalue count");
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        const double weight = rep.pp_weights ? rep.pp_weights->mass_at(pp[i]) : 1.0;
        const double mass = std::norm(coeffs[i]) * weight;
        if (mass > 0.0) atoms.push_back({pp[i], mass});
    }
    return WeightedPPMeasure(w, std::move(atoms));
}

} // namespace emz
