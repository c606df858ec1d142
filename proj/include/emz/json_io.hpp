#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emz/errors.hpp"
#include "emz/expansion.hpp"
#include "emz/ordered_rep.hpp"
#include "emz/shin_zettl.hpp"
#include "emz/vector_op.hpp"

namespace emz::io {

using json = nlohmann::ordered_json;

inline json to_json(const RealSet& s) {
    json j;
    j["window"] = {s.window().lo, s.window().hi};
    j["intervals"] = json::array();
    for (const auto& iv : s.intervals())
        j["intervals"].push_back({{"lo", iv.lo},
                                  {"hi", iv.hi},
                                  {"lo_closed", iv.lo_closed},
                                  {"hi_closed", iv.hi_closed}});
    j["atoms"] = s.atoms();
    if (s.generator()) j["generator"] = *s.generator();
    return j;
}

inline RealSet real_set_from_json(const json& j, const Window& w) {
    if (!j.is_object()) throw SchemaError("real set must be a JSON object");
    if (j.contains("window")) {
        const auto& jw = j.at("window");
        if (!jw.is_array() || jw.size() != 2)
            throw SchemaError("real set window must be [lo, hi]");
        Window nested{jw[0].get<double>(), jw[1].get<double>(), w.eps_atom};
        if (!nested.matches(w))
            throw WindowMismatch("nested real set window differs from the system window");
    }
    std::vector<Interval> ivs;
    if (j.contains("intervals"))
        for (const auto& ji : j.at("intervals"))
            ivs.push_back(Interval{ji.at("lo").get<double>(), ji.at("hi").get<double>(),
                                   ji.value("lo_closed", false), ji.value("hi_closed", false)});
    std::vector<double> atoms;
    if (j.contains("atoms"))
        for (const auto& ja : j.at("atoms")) atoms.push_back(ja.get<double>());
    std::optional<std::string> gen;
    if (j.contains("generator")) gen = j.at("generator").get<std::string>();
    return RealSet(w, std::move(ivs), std::move(atoms), std::move(gen));
}

inline json to_json(const SpectralMeasureClass& m) {
    return json{{"ac_support", to_json(m.ac_support())}, {"pp_support", to_json(m.pp_support())}};
}

inline SpectralMeasureClass measure_class_from_json(const json& j, const Window& w) {
    RealSet ac = j.contains("ac_support") ? real_set_from_json(j.at("ac_support"), w)
                                          : RealSet::empty(w);
    RealSet pp = j.contains("pp_support") ? real_set_from_json(j.at("pp_support"), w)
                                          : RealSet::empty(w);
    return SpectralMeasureClass(std::move(ac), std::move(pp));
}

inline json to_json(const WeightedPPMeasure& m) {
    json j = json::array();
    for (const auto& [p, w] : m.atoms()) j.push_back({p, w});
    return j;
}

inline OperatorSpec operator_from_json(const json& j, const Window& w) {
    const std::string id = j.at("id").get<std::string>();
    const std::string family = j.at("family").get<std::string>();
    if (family == "half_line_kinetic") {
        const auto& p = j.at("params");
        const std::string sign = p.at("sign").get<std::string>();
        const int sgn = sign == "-" ? -1 : sign == "+" ? +1 : 0;
        if (sgn == 0) throw SchemaError("half_line_kinetic sign must be \"-\" or \"+\"");
        const auto& k = p.at("k");
        if (k.is_string()) {
            if (k.get<std::string>() != "inf")
                throw SchemaError("half_line_kinetic k must be a number or \"inf\"");
            return OperatorSpec::half_line_kinetic_infinite_bc(id, sgn);
        }
        return OperatorSpec::half_line_kinetic(id, sgn, k.get<double>());
    }
    if (family == "impulse_on_unit")
        return OperatorSpec::impulse_on_unit(id, j.at("params").at("alpha").get<double>());
    if (family == "dirichlet_sl_on_pi") return OperatorSpec::dirichlet_sl_on_pi(id);
    if (family == "symbolic") {
        const auto& d = j.at("spectral_data");
        SymbolicData data{measure_class_from_json(d.at("theta"), w), {}, std::nullopt};
        for (const auto& je : d.at("mult_sets")) data.mult_sets.push_back(real_set_from_json(je, w));
        if (d.contains("pp_weights")) {
            std::vector<std::pair<double, double>> atoms;
            for (const auto& ja : d.at("pp_weights"))
                atoms.push_back({ja.at(0).get<double>(), ja.at(1).get<double>()});
            data.pp_weights = WeightedPPMeasure(w, std::move(atoms));
        }
        return OperatorSpec::symbolic(id, std::move(data));
    }
    throw SchemaError("unknown operator family: " + family);
}

inline ShinZettlMatrix matrix_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    const auto& ji = j.at("interval");
    if (!ji.is_array() || ji.size() != 2) throw SchemaError("matrix interval must be [a, b]");
    const double a = ji[0].get<double>(), b = ji[1].get<double>();
    const int nodes = j.value("grid_points", 401);
    ShinZettlMatrix m(n, a, b, nodes);
    const auto& rows = j.at("entries");
    if (static_cast<int>(rows.size()) != n) throw SchemaError("matrix entries must be n rows");
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n)
            throw SchemaError("matrix entries must be n columns per row");
        for (int s = 0; s < n; ++s) {
            const auto& cell = rows[r][s];
            if (cell.is_number()) {
                m.set_entry(r, s, [v = cell.get<double>()](double) { return cd(v, 0); });
            } else if (cell.is_array() && cell.size() == 2) {
                m.set_entry(r, s, [re = cell[0].get<double>(), im = cell[1].get<double>()](
                                      double) { return cd(re, im); });
            } else if (cell.is_object() && cell.contains("samples")) {
                std::vector<cd> samples;
                for (const auto& v : cell.at("samples")) {
                    if (v.is_number()) samples.push_back(cd(v.get<double>(), 0));
                    else samples.push_back(cd(v.at(0).get<double>(), v.at(1).get<double>()));
                }
                m.set_samples(r, s, std::move(samples));
            } else {
                throw SchemaError("matrix entry must be a number, [re, im] or {samples: [...]}");
            }
        }
    }
    return m;
}

struct SystemFile {
    Window window;
    std::vector<OperatorSpec> operators;
    std::vector<ShinZettlMatrix> matrices;
    std::vector<std::string> notes;
};

inline SystemFile parse_system(const json& j, std::optional<Window> window_override,
                               double eps_atom) {
    SystemFile out;
    if (window_override) {
        out.window = *window_override;
        out.window.eps_atom = eps_atom;
    } else {
        if (!j.contains("window")) throw SchemaError("system file needs a window (or --window)");
        const auto& jw = j.at("window");
        if (!jw.is_array() || jw.size() != 2) throw SchemaError("window must be [lo, hi]");
        out.window = Window{jw[0].get<double>(), jw[1].get<double>(), eps_atom};
    }
    if (!(out.window.lo < out.window.hi)) throw SchemaError("window requires lo < hi");
    if (!j.contains("operators") || !j.at("operators").is_array())
        throw SchemaError("system file needs an operators array");
    for (const auto& jo : j.at("operators")) {
        out.operators.push_back(operator_from_json(jo, out.window));
        if (out.operators.back().needs_negative_bc_note())
            out.notes.push_back("operator " + out.operators.back().id() +
                                ": k < 0 bound-state analysis is outside the worked case "
                                "split; no bound state is claimed");
    }
    if (j.contains("matrices"))
        for (const auto& jm : j.at("matrices")) out.matrices.push_back(matrix_from_json(jm));
    return out;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in, nullptr, true, true); // allow comments in fixtures
    } catch (const json::exception& e) {
        throw ParseError(std::string("JSON parse failure: ") + e.what());
    }
}

inline json to_json(const SuperpositionGraph& g) {
    json j;
    j["nodes"] = g.nodes;
    j["edges"] = json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back(
            {{"a", g.nodes[e.a]}, {"b", g.nodes[e.b]}, {"overlap", to_json(e.overlap)}});
    return j;
}

inline json to_json(const PartitionResult& p) {
    json j;
    j["lambda"] = p.lambda;
    j["groups"] = p.groups;
    j["certificate"] = p.certificate;
    j["clique_lower_bound"] = p.clique_lower_bound;
    if (p.unique_optimum) j["unique_optimum"] = *p.unique_optimum;
    return j;
}

inline json to_json(const std::vector<CyclicPlanVector>& plan) {
    json j = json::array();
    for (const auto& v : plan) {
        json parts = json::array();
        for (const auto& p : v.parts)
            parts.push_back(
                {{"slot", p.slot_id}, {"kind", p.kind}, {"atom_count", p.atom_count}});
        j.push_back({{"group", v.group}, {"parts", parts}});
    }
    return j;
}

inline json to_json(const MaxVectorProvenance& prov) {
    json levels = json::array();
    for (const auto& lvl : prov.levels) {
        json kept = json::array();
        for (const auto& p : lvl.kept)
            kept.push_back({{"slot", p.slot_id}, {"class", to_json(p.cls)}});
        json steps = json::array();
        for (const auto& s : lvl.steps) {
            json discarded = json::array();
            for (const auto& d : s.discarded)
                discarded.push_back({{"slot", d.slot_id}, {"class", to_json(d.cls)}});
            steps.push_back({{"incoming", s.incoming},
                             {"overlap", to_json(s.overlap)},
                             {"max_choice", s.max_choice},
                             {"discarded", discarded}});
        }
        levels.push_back({{"level", lvl.level}, {"kept", kept}, {"steps", steps}});
    }
    return json{{"levels", levels}};
}

inline json to_json(const OrderedRepresentation& rep) {
    json j;
    j["lambda"] = rep.lambda;
    j["multiplicity"] = rep.spectral_multiplicity;
    j["distorted"] = rep.distorted;
    j["s_n"] = json::array();
    for (const auto& s : rep.mult_sets) j["s_n"].push_back(to_json(s));
    j["theta"] = to_json(rep.theta);
    j["theta_pp"] = to_json(rep.theta_pp);
    j["provenance"] = to_json(rep.provenance);
    return j;
}

inline json to_json(const std::vector<SzViolation>& violations) {
    json j = json::array();
    for (const auto& v : violations)
        j.push_back({{"condition", v.condition},
                     {"row", v.row},
                     {"col", v.col},
                     {"node", v.node},
                     {"x", v.x},
                     {"message", v.message}});
    return j;
}

inline VectorFunction vector_from_json(const json& j, const EMZSystem& sys) {
    if (!j.is_object()) throw SchemaError("vector file must map slot ids to [[lambda,re,im]...]");
    VectorFunction out;
    for (const auto& s : sys.slots())
        out.coeffs[s.id] = std::vector<cd>(s.atoms.size(), cd(0, 0));
    const double eps = sys.window().eps_atom;
    for (const auto& [id, entries] : j.items()) {
        const Slot& slot = sys.slot(id);
        for (const auto& e : entries) {
            if (!e.is_array() || e.size() != 3)
                throw SchemaError("vector entries must be [lambda, re, im]");
            const double lam = e[0].get<double>();
            const int idx = slot.atom_index(lam, eps);
            if (idx < 0)
                throw DimensionMismatch("vector entry at lambda " + std::to_string(lam) +
                                        " matches no eigenvalue of slot " + id);
            out.coeffs[id][idx] = cd(e[1].get<double>(), e[2].get<double>());
        }
    }
    return out;
}

inline json to_json(const EMZSystem& sys, const VectorFunction& v) {
    json j;
    for (const auto& [id, c] : v.coeffs) {
        const Slot& slot = sys.slot(id);
        json entries = json::array();
        for (std::size_t i = 0; i < c.size(); ++i)
            entries.push_back({slot.atoms[i], c[i].real(), c[i].imag()});
        j[id] = entries;
    }
    return j;
}

} // namespace emz::io
