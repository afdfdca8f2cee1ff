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

// Report emission. Every floating-point value is printed with 17
// significant digits so identical runs produce byte-identical text;
// non-finite values print as null. Two formats: pretty JSON and a
// tab-delimited key/value table over flattened paths.

#ifndef PREPSIM_REPORT_HPP
#define PREPSIM_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "prepsim/preparators.hpp"
#include "prepsim/raio.hpp"
#include "prepsim/serialize.hpp"
#include "prepsim/version.hpp"

namespace prepsim {

inline std::string format_real(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void emit_json_value(const Json& j, std::ostream& os, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (const auto& item : j.items()) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in << Json(item.key()).dump() << ": ";
                emit_json_value(item.value(), os, indent + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            bool first = true;
            for (const Json& item : j) {
                if (!first) os << ",\n";
                first = false;
                os << pad_in;
                emit_json_value(item, os, indent + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case Json::value_t::number_float:
            os << format_real(j.get<double>());
            return;
        default:
            os << j.dump();
            return;
    }
}

inline void emit_table_value(const Json& j, const std::string& path, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& item : j.items()) {
            emit_table_value(item.value(), path.empty() ? item.key() : path + "." + item.key(), os);
        }
        return;
    }
    if (j.is_array()) {
        std::size_t i = 0;
        for (const Json& item : j) {
            emit_table_value(item, path + "[" + std::to_string(i) + "]", os);
            ++i;
        }
        return;
    }
    os << path << "\t";
    if (j.is_number_float()) {
        os << format_real(j.get<double>());
    } else if (j.is_string()) {
        os << j.get<std::string>();
    } else {
        os << j.dump();
    }
    os << "\n";
}

}  // namespace detail

inline void emit_json(const Json& j, std::ostream& os) {
    detail::emit_json_value(j, os, 0);
    os << "\n";
}

inline void emit_table(const Json& j, std::ostream& os) {
    detail::emit_table_value(j, "", os);
}

inline std::string report_to_string(const Json& report, const std::string& format) {
    std::ostringstream os;
    if (format == "table") {
        emit_table(report, os);
    } else {
        emit_json(report, os);
    }
    return os.str();
}

// One named invariant check: pass iff the residual is finite and within the
// threshold.
inline Json make_check(const std::string& name, double residual, double threshold) {
    bool pass = std::isfinite(residual) && residual <= threshold;
    return Json{{"name", name}, {"residual", residual}, {"threshold", threshold}, {"pass", pass}};
}

inline Json make_flag_check(const std::string& name, bool pass) {
    return Json{{"name", name}, {"pass", pass}};
}

// External record for a verification report: p_Q, the three condition
// flags, their margins, the equality residual and the verdict.
inline Json raio_report_to_json(const RaioReport& rep) {
    return Json{{"p_Q", rep.p_q},
                {"cond_i", rep.cond_i_ok},
                {"cond_ii", rep.cond_ii_ok},
                {"cond_iii", rep.cond_iii_ok},
                {"margins", Json::array({rep.margin_i, rep.margin_ii, rep.margin_iii})},
                {"residual", rep.equality_residual},
                {"verdict", to_string(rep.verdict)}};
}

inline Json preparation_result_to_json(const PreparationResult& result, const std::string& label) {
    return Json{{"label", label},
                {"probability", result.probability},
                {"two_route_residual", result.two_route_residual},
                {"prepared_state", operator_to_json(result.prepared_state)},
                {"evolved_state", operator_to_json(result.evolved_state)}};
}

// Report envelope shared by all commands. Wall time is attached by the
// caller after the payload is complete, outside the deterministic parts.
inline Json make_report(const std::string& command, std::uint64_t root_seed, const Json& scenario_echo,
                        Json payload, Json checks) {
    bool all_pass = true;
    for (const Json& c : checks) {
        if (!c.at("pass").get<bool>()) all_pass = false;
    }
    return Json{{"tool", "prepsim"},       {"version", kVersion}, {"command", command},
                {"root_seed", root_seed},  {"scenario", scenario_echo}, {"payload", std::move(payload)},
                {"checks", std::move(checks)}, {"all_pass", all_pass}};
}

}  // namespace prepsim

#endif  // PREPSIM_REPORT_HPP
