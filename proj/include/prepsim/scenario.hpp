// Copyright 2026 The Prepsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario files: JSON documents selecting a model (sg, hole, custom, or
// raio-twin) and its parameters. Parsing validates structure with field
// context; the build functions produce fully validated PreparatorSpec or
// RaioInstance values.

#ifndef PREPSIM_SCENARIO_HPP
#define PREPSIM_SCENARIO_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "prepsim/preparators.hpp"
#include "prepsim/raio.hpp"
#include "prepsim/serialize.hpp"

namespace prepsim {

// Scenario-file problem: parse failure or a field violating its contract.
// Messages carry the file path and the offending field.
class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

enum class ScenarioModel { Sg, Hole, Custom, RaioTwin };

inline const char* to_string(ScenarioModel m) {
    switch (m) {
        case ScenarioModel::Sg: return "sg";
        case ScenarioModel::Hole: return "hole";
        case ScenarioModel::Custom: return "custom";
        case ScenarioModel::RaioTwin: return "raio-twin";
    }
    return "custom";
}

inline ScenarioModel scenario_model_from_string(const std::string& s) {
    if (s == "sg") return ScenarioModel::Sg;
    if (s == "hole") return ScenarioModel::Hole;
    if (s == "custom") return ScenarioModel::Custom;
    if (s == "raio-twin") return ScenarioModel::RaioTwin;
    throw ScenarioError("unknown model \"" + s + "\" (expected sg, hole, custom or raio-twin)");
}

// A parsed scenario document. `raw` retains the full document for echoing
// into reports; typed fields cover everything the builders need.
struct Scenario {
    std::string path;
    Json raw;
    ScenarioModel model = ScenarioModel::Custom;
    std::string variant;
    Complex alpha{0.0, 0.0};
    Complex beta{0.0, 0.0};
    std::optional<Vector> psi_in;
    GridGeometry geometry;
    Tolerances tolerances;
    std::optional<std::uint64_t> seed;
    int d_second = 0;
    int region_size = 0;
    std::string label;
};

namespace detail {

inline std::string field_msg(const std::string& path, const std::string& field, const std::string& what) {
    return "scenario " + path + ": field " + field + ": " + what;
}

inline void require_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& path,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ScenarioError(field_msg(path, where.empty() ? item.key() : where + "." + item.key(),
                                          "unknown field"));
        }
    }
}

template <typename T>
T typed_field(const Json& obj, const std::string& key, const std::string& path, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ScenarioError(field_msg(path, where, e.what()));
    }
}

template <typename T>
T typed_field_or(const Json& obj, const std::string& key, const std::string& path, const std::string& where,
                 T fallback) {
    if (!obj.contains(key)) return fallback;
    return typed_field<T>(obj, key, path, where);
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("scenario " + path + ": cannot open file");
    }
    Scenario sc;
    sc.path = path;
    try {
        sc.raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ScenarioError("scenario " + path + ": " + e.what());
    }
    if (!sc.raw.is_object()) {
        throw ScenarioError("scenario " + path + ": document must be an object");
    }

    const Json& j = sc.raw;
    std::string model_str = detail::typed_field<std::string>(j, "model", path, "model");
    try {
        sc.model = scenario_model_from_string(model_str);
    } catch (const ScenarioError& e) {
        throw ScenarioError(detail::field_msg(path, "model", e.what()));
    }

    std::set<std::string> allowed = {"model", "tolerances", "seed", "label"};
    switch (sc.model) {
        case ScenarioModel::Sg:
            allowed.insert({"variant", "alpha_re", "alpha_im", "beta_re", "beta_im", "geometry", "unitaries"});
            break;
        case ScenarioModel::Hole:
            allowed.insert({"variant", "psi_in", "geometry", "unitaries"});
            break;
        case ScenarioModel::Custom:
            allowed.insert({"rho_composite", "trigger", "kind", "occurrence", "unitaries"});
            break;
        case ScenarioModel::RaioTwin:
            allowed.insert({"alpha_re", "alpha_im", "beta_re", "beta_im", "d_second", "region_size"});
            break;
    }
    detail::require_keys(j, allowed, path, "");

    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        if (!t.is_object()) {
            throw ScenarioError(detail::field_msg(path, "tolerances", "must be an object"));
        }
        detail::require_keys(t, {"validation_eps", "identity_eps", "certainty_eps"}, path, "tolerances");
        sc.tolerances.validation_eps = detail::typed_field_or<double>(t, "validation_eps", path,
                                                                      "tolerances.validation_eps",
                                                                      sc.tolerances.validation_eps);
        sc.tolerances.identity_eps = detail::typed_field_or<double>(t, "identity_eps", path,
                                                                    "tolerances.identity_eps",
                                                                    sc.tolerances.identity_eps);
        sc.tolerances.certainty_eps = detail::typed_field_or<double>(t, "certainty_eps", path,
                                                                     "tolerances.certainty_eps",
                                                                     sc.tolerances.certainty_eps);
        try {
            sc.tolerances.validate();
        } catch (const ValidationError& e) {
            throw ScenarioError(detail::field_msg(path, "tolerances", e.what()));
        }
    }
    if (j.contains("seed")) {
        sc.seed = detail::typed_field<std::uint64_t>(j, "seed", path, "seed");
    }
    sc.label = detail::typed_field_or<std::string>(j, "label", path, "label", "");

    if (sc.model == ScenarioModel::Sg || sc.model == ScenarioModel::RaioTwin) {
        sc.alpha = Complex(detail::typed_field_or<double>(j, "alpha_re", path, "alpha_re", 0.0),
                           detail::typed_field_or<double>(j, "alpha_im", path, "alpha_im", 0.0));
        sc.beta = Complex(detail::typed_field_or<double>(j, "beta_re", path, "beta_re", 0.0),
                          detail::typed_field_or<double>(j, "beta_im", path, "beta_im", 0.0));
    }
    if (sc.model == ScenarioModel::Sg || sc.model == ScenarioModel::Hole) {
        sc.variant = detail::typed_field<std::string>(j, "variant", path, "variant");
    }
    if (j.contains("geometry")) {
        const Json& g = j.at("geometry");
        if (!g.is_object()) {
            throw ScenarioError(detail::field_msg(path, "geometry", "must be an object"));
        }
        detail::require_keys(g, {"n_sites", "split_index", "packet_width", "packet_centers"}, path,
                             "geometry");
        sc.geometry.n_sites = detail::typed_field_or<int>(g, "n_sites", path, "geometry.n_sites",
                                                          sc.geometry.n_sites);
        sc.geometry.split_index = detail::typed_field_or<int>(g, "split_index", path, "geometry.split_index",
                                                              sc.geometry.split_index);
        sc.geometry.packet_width = detail::typed_field_or<double>(g, "packet_width", path,
                                                                  "geometry.packet_width",
                                                                  sc.geometry.packet_width);
        if (g.contains("packet_centers")) {
            auto centers = detail::typed_field<std::vector<double>>(g, "packet_centers", path,
                                                                    "geometry.packet_centers");
            if (centers.size() != 2) {
                throw ScenarioError(detail::field_msg(path, "geometry.packet_centers",
                                                      "must hold exactly two centers"));
            }
            sc.geometry.packet_centers = {centers[0], centers[1]};
        }
        try {
            sc.geometry.validate();
        } catch (const ValidationError& e) {
            throw ScenarioError(detail::field_msg(path, "geometry", e.what()));
        }
    }
    if (sc.model == ScenarioModel::Hole) {
        try {
            sc.psi_in = vector_from_json(detail::typed_field<Json>(j, "psi_in", path, "psi_in"));
        } catch (const ValidationError& e) {
            throw ScenarioError(detail::field_msg(path, "psi_in", e.what()));
        }
    }
    if (sc.model == ScenarioModel::RaioTwin) {
        sc.d_second = detail::typed_field<int>(j, "d_second", path, "d_second");
        sc.region_size = detail::typed_field<int>(j, "region_size", path, "region_size");
    }
    return sc;
}

namespace detail {

// Distinct salts keep the object-side and preparator-side seeded draws
// independent of each other for any literal seed.
inline constexpr std::uint64_t kObjectUnitarySalt = 0x6f626a6563740000ULL;
inline constexpr std::uint64_t kPreparatorUnitarySalt = 0x7072657000000000ULL;

// Resolves one entry of the `unitaries` section: absent or "identity" is
// the identity, "seeded-random:<k>" draws a Haar unitary from the literal
// seed k (salted per role), and an inline operator record is taken as is.
inline Operator resolve_unitary(const Json& parent, const std::string& key, int dim, std::uint64_t salt,
                                const std::string& path, const Tolerances& tol) {
    DimensionSignature sig({dim});
    if (!parent.contains(key)) {
        return Operator::identity(sig, OperatorKind::Unitary, tol);
    }
    const Json& u = parent.at(key);
    const std::string where = "unitaries." + key;
    if (u.is_string()) {
        const std::string s = u.get<std::string>();
        if (s == "identity") {
            return Operator::identity(sig, OperatorKind::Unitary, tol);
        }
        const std::string prefix = "seeded-random:";
        if (s.rfind(prefix, 0) == 0) {
            std::uint64_t k = 0;
            try {
                k = std::stoull(s.substr(prefix.size()));
            } catch (const std::exception&) {
                throw ScenarioError(field_msg(path, where, "malformed seed in \"" + s + "\""));
            }
            Rng rng(splitmix64(k) ^ salt);
            return Operator(haar_unitary(dim, rng), sig, OperatorKind::Unitary, tol);
        }
        throw ScenarioError(field_msg(path, where, "expected identity, seeded-random:<k> or an operator record"));
    }
    if (u.is_object()) {
        Operator op = [&] {
            try {
                return operator_from_json(u, tol);
            } catch (const ValidationError& e) {
                throw ScenarioError(field_msg(path, where, e.what()));
            }
        }();
        if (op.kind() != OperatorKind::Unitary) {
            throw ScenarioError(field_msg(path, where, "operator record must have kind unitary"));
        }
        if (op.dim() != dim) {
            throw ScenarioError(field_msg(path, where, "dimension " + std::to_string(op.dim()) +
                                                           " does not match the factor dimension " +
                                                           std::to_string(dim)));
        }
        return op;
    }
    throw ScenarioError(field_msg(path, where, "expected a string or an operator record"));
}

// u_after acting after u_before; bit-exact when u_after is the identity.
inline Operator compose_unitaries(const Operator& u_after, const Operator& u_before, const Tolerances& tol) {
    if (u_after.mat().isIdentity(0.0)) return u_before;
    return Operator(u_after.mat() * u_before.mat(), u_before.signature(), OperatorKind::Unitary, tol);
}

}  // namespace detail

// Builds the preparation the scenario describes. seed_override (from the
// command line) wins over the scenario's own seed; the effective seed feeds
// the model builders. Scenario unitaries compose after the builder's own
// interaction unitaries.
inline PreparatorSpec build_preparator(const Scenario& sc, std::optional<std::uint64_t> seed_override = {},
                                       std::optional<Tolerances> tol_override = {}) {
    const Tolerances tol = tol_override.value_or(sc.tolerances);
    const std::uint64_t seed = seed_override ? *seed_override : sc.seed.value_or(0);
    const Json& j = sc.raw;
    const Json empty = Json::object();
    const Json& unitaries = j.contains("unitaries") ? j.at("unitaries") : empty;
    if (!unitaries.is_object()) {
        throw ScenarioError(detail::field_msg(sc.path, "unitaries", "must be an object"));
    }
    detail::require_keys(unitaries, {"u_object", "u_preparator"}, sc.path, "unitaries");

    switch (sc.model) {
        case ScenarioModel::Sg: {
            SgVariant variant;
            try {
                variant = sg_variant_from_string(sc.variant);
            } catch (const ValidationError& e) {
                throw ScenarioError(detail::field_msg(sc.path, "variant", e.what()));
            }
            PreparatorSpec spec = build_sg(sc.alpha, sc.beta, sc.geometry, variant, seed, tol);
            Operator u_obj = detail::resolve_unitary(unitaries, "u_object", spec.u_object.dim(),
                                                     detail::kObjectUnitarySalt, sc.path, tol);
            Operator u_prep = detail::resolve_unitary(unitaries, "u_preparator", spec.u_preparator.dim(),
                                                      detail::kPreparatorUnitarySalt, sc.path, tol);
            spec.u_object = detail::compose_unitaries(u_obj, spec.u_object, tol);
            spec.u_preparator = detail::compose_unitaries(u_prep, spec.u_preparator, tol);
            if (!sc.label.empty()) spec.label = sc.label;
            return spec;
        }
        case ScenarioModel::Hole: {
            HoleVariant variant;
            try {
                variant = hole_variant_from_string(sc.variant);
            } catch (const ValidationError& e) {
                throw ScenarioError(detail::field_msg(sc.path, "variant", e.what()));
            }
            PreparatorSpec spec = build_hole(*sc.psi_in, sc.geometry, variant, tol);
            Operator u_obj = detail::resolve_unitary(unitaries, "u_object", spec.u_object.dim(),
                                                     detail::kObjectUnitarySalt, sc.path, tol);
            Operator u_prep = detail::resolve_unitary(unitaries, "u_preparator", spec.u_preparator.dim(),
                                                      detail::kPreparatorUnitarySalt, sc.path, tol);
            spec.u_object = detail::compose_unitaries(u_obj, spec.u_object, tol);
            spec.u_preparator = detail::compose_unitaries(u_prep, spec.u_preparator, tol);
            if (!sc.label.empty()) spec.label = sc.label;
            return spec;
        }
        case ScenarioModel::Custom: {
            if (!j.contains("rho_composite")) {
                throw ScenarioError(detail::field_msg(sc.path, "rho_composite", "required for model custom"));
            }
            Operator rho = [&] {
                try {
                    return operator_from_json(j.at("rho_composite"), tol);
                } catch (const ValidationError& e) {
                    throw ScenarioError(detail::field_msg(sc.path, "rho_composite", e.what()));
                }
            }();
            if (rho.kind() != OperatorKind::Density || rho.signature().factor_count() != 2) {
                throw ScenarioError(detail::field_msg(sc.path, "rho_composite",
                                                      "must be a kind-density operator with two factors"));
            }

            std::optional<Operator> trigger;
            if (!j.contains("trigger")) {
                throw ScenarioError(detail::field_msg(sc.path, "trigger",
                                                      "required for model custom (operator record or \"certain\")"));
            }
            const Json& trig = j.at("trigger");
            if (trig.is_string()) {
                if (trig.get<std::string>() != "certain") {
                    throw ScenarioError(detail::field_msg(sc.path, "trigger",
                                                          "string form must be \"certain\""));
                }
            } else {
                try {
                    trigger = operator_from_json(trig, tol);
                } catch (const ValidationError& e) {
                    throw ScenarioError(detail::field_msg(sc.path, "trigger", e.what()));
                }
            }

            OccurrenceMode occurrence = trigger.has_value() ? OccurrenceMode::General : OccurrenceMode::None;
            if (j.contains("occurrence")) {
                try {
                    occurrence = occurrence_mode_from_string(
                        detail::typed_field<std::string>(j, "occurrence", sc.path, "occurrence"));
                } catch (const ValidationError& e) {
                    throw ScenarioError(detail::field_msg(sc.path, "occurrence", e.what()));
                }
            }
            PreparatorKind kind = PreparatorKind::Dynamical;
            if (j.contains("kind")) {
                try {
                    kind = preparator_kind_from_string(
                        detail::typed_field<std::string>(j, "kind", sc.path, "kind"));
                } catch (const ValidationError& e) {
                    throw ScenarioError(detail::field_msg(sc.path, "kind", e.what()));
                }
            }

            Operator u_obj = detail::resolve_unitary(unitaries, "u_object", rho.signature().factor_dim(0),
                                                     detail::kObjectUnitarySalt, sc.path, tol);
            Operator u_prep = detail::resolve_unitary(unitaries, "u_preparator", rho.signature().factor_dim(1),
                                                      detail::kPreparatorUnitarySalt, sc.path, tol);
            PreparatorSpec spec(std::move(rho), std::move(trigger), std::move(u_obj), std::move(u_prep),
                                kind, occurrence, sc.label.empty() ? "custom" : sc.label);
            spec.validate(tol);
            return spec;
        }
        case ScenarioModel::RaioTwin:
            throw ScenarioError("scenario " + sc.path +
                                ": model raio-twin describes a verification instance, not a preparation");
    }
    throw ScenarioError("scenario " + sc.path + ": unreachable model");
}

// Builds the verification instance a raio-twin scenario describes.
inline RaioInstance build_raio(const Scenario& sc, std::optional<std::uint64_t> seed_override = {},
                               std::optional<Tolerances> tol_override = {}) {
    if (sc.model != ScenarioModel::RaioTwin) {
        throw ScenarioError("scenario " + sc.path + ": model " + to_string(sc.model) +
                            " does not describe a verification instance (expected raio-twin)");
    }
    const Tolerances tol = tol_override.value_or(sc.tolerances);
    const std::uint64_t seed = seed_override ? *seed_override : sc.seed.value_or(0);
    try {
        return build_twin_instance(sc.alpha, sc.beta, sc.d_second, sc.region_size, seed, tol);
    } catch (const ValidationError& e) {
        throw ScenarioError("scenario " + sc.path + ": " + e.what());
    }
}

}  // namespace prepsim

#endif  // PREPSIM_SCENARIO_HPP
