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

// Command-line entry point. Four commands over scenario files:
//   run         execute a preparation and report the result
//   raio-check  verify the retroactive-occurrence conditions and equality
//   sweep       repeat a check over seeded trials and aggregate
//   validate    audit operator invariants without running anything
// Exit status: 0 all checks pass, 1 a check failed, 2 error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prepsim/report.hpp"
#include "prepsim/scenario.hpp"

namespace {

using namespace prepsim;

struct Options {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    int trials = 1;
    std::string format = "json";
    std::vector<std::string> tolerance_overrides;
    std::string out_path;
};

void add_common_options(CLI::App* cmd, Options& opt, bool with_trials) {
    cmd->add_option("--scenario", opt.scenario_path, "Scenario file to load")->required();
    cmd->add_option("--seed", opt.seed,
                    "Root seed (falls back to PREPSIM_SEED, then the scenario's seed, then 0)");
    if (with_trials) {
        cmd->add_option("--trials", opt.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--format", opt.format, "Report format")
        ->check(CLI::IsMember({"json", "table"}))
        ->default_val("json");
    cmd->add_option("--tolerance", opt.tolerance_overrides,
                    "Tolerance override as name=value (repeatable); names: validation_eps, "
                    "identity_eps, certainty_eps");
    cmd->add_option("--out", opt.out_path, "Write the report to this file instead of standard output");
}

std::uint64_t effective_seed(const Options& opt, const Scenario& sc) {
    if (opt.seed.has_value()) return *opt.seed;
    if (const char* env = std::getenv("PREPSIM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("PREPSIM_SEED: not a 64-bit unsigned integer: \"") + env +
                                  "\"");
        }
    }
    return sc.seed.value_or(0);
}

Tolerances effective_tolerances(const Options& opt, const Scenario& sc) {
    Tolerances tol = sc.tolerances;
    for (const std::string& item : opt.tolerance_overrides) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("--tolerance expects name=value, got \"" + item + "\"");
        }
        std::string name = item.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ValidationError("--tolerance " + name + ": not a number: \"" + item.substr(eq + 1) +
                                  "\"");
        }
        if (name == "validation_eps") {
            tol.validation_eps = value;
        } else if (name == "identity_eps") {
            tol.identity_eps = value;
        } else if (name == "certainty_eps") {
            tol.certainty_eps = value;
        } else {
            throw ValidationError("--tolerance: unknown tolerance \"" + name + "\"");
        }
    }
    tol.validate();
    return tol;
}

// Attaches wall time, renders, writes, and maps all_pass to the exit code.
int finish_report(Json report, const std::chrono::steady_clock::time_point& started, const Options& opt) {
    auto elapsed = std::chrono::steady_clock::now() - started;
    report["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
    std::string text = report_to_string(report, opt.format);
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path);
        if (!out) {
            throw ValidationError("cannot open output file " + opt.out_path);
        }
        out << text;
    }
    return report.at("all_pass").get<bool>() ? 0 : 1;
}

int command_run(const Options& opt) {
    auto started = std::chrono::steady_clock::now();
    Scenario sc = parse_scenario(opt.scenario_path);
    Tolerances tol = effective_tolerances(opt, sc);
    std::uint64_t seed = effective_seed(opt, sc);

    PreparatorSpec spec = build_preparator(sc, seed, tol);
    PreparationResult result = run_preparation(spec, tol);

    Json checks = Json::array();
    checks.push_back(make_check("two-route-evolution", result.two_route_residual, tol.identity_eps));
    checks.push_back(make_check("prepared-state-trace",
                                std::abs(result.prepared_state.mat().trace() - Complex(1.0, 0.0)),
                                tol.validation_eps));
    checks.push_back(make_check("prepared-state-hermiticity",
                                hermiticity_defect(result.prepared_state.mat()), tol.validation_eps));
    checks.push_back(make_check("evolved-state-trace",
                                std::abs(result.evolved_state.mat().trace() - Complex(1.0, 0.0)),
                                tol.validation_eps));

    Json report = make_report("run", seed, sc.raw, preparation_result_to_json(result, spec.label),
                              std::move(checks));
    return finish_report(std::move(report), started, opt);
}

int command_raio_check(const Options& opt) {
    auto started = std::chrono::steady_clock::now();
    Scenario sc = parse_scenario(opt.scenario_path);
    Tolerances tol = effective_tolerances(opt, sc);
    std::uint64_t seed = effective_seed(opt, sc);

    RaioInstance inst = build_raio(sc, seed, tol);
    RaioReport rep = check_raio_equality(inst, tol);

    Json checks = Json::array();
    checks.push_back(make_flag_check("condition-i", rep.cond_i_ok));
    checks.push_back(make_flag_check("condition-ii", rep.cond_ii_ok));
    checks.push_back(make_flag_check("condition-iii", rep.cond_iii_ok));
    checks.push_back(make_check("equality-residual", rep.equality_residual, tol.identity_eps));

    Json report = make_report("raio-check", seed, sc.raw, raio_report_to_json(rep), std::move(checks));
    return finish_report(std::move(report), started, opt);
}

int command_sweep(const Options& opt) {
    auto started = std::chrono::steady_clock::now();
    Scenario sc = parse_scenario(opt.scenario_path);
    Tolerances tol = effective_tolerances(opt, sc);
    std::uint64_t root_seed = effective_seed(opt, sc);

    int passes = 0;
    double max_residual = std::numeric_limits<double>::quiet_NaN();
    Json failure_seeds = Json::array();

    for (int t = 0; t < opt.trials; ++t) {
        std::uint64_t trial_seed = root_seed + static_cast<std::uint64_t>(t);
        bool pass = false;
        double residual = std::numeric_limits<double>::quiet_NaN();
        if (sc.model == ScenarioModel::RaioTwin) {
            RaioInstance inst = build_raio(sc, trial_seed, tol);
            RaioReport rep = check_raio_equality(inst, tol);
            pass = (rep.verdict == RaioVerdict::Verified);
            residual = rep.equality_residual;
        } else {
            PreparatorSpec spec = build_preparator(sc, trial_seed, tol);
            PreparationResult result = run_preparation(spec, tol);
            residual = result.two_route_residual;
            pass = std::isfinite(residual) && residual <= tol.identity_eps;
        }
        if (pass) {
            ++passes;
        } else {
            failure_seeds.push_back(trial_seed);
        }
        if (std::isfinite(residual) && (!std::isfinite(max_residual) || residual > max_residual)) {
            max_residual = residual;
        }
    }

    Json payload{{"trials", opt.trials},
                 {"passes", passes},
                 {"failures", opt.trials - passes},
                 {"max_residual", max_residual},
                 {"failure_seeds", std::move(failure_seeds)}};
    Json checks = Json::array();
    checks.push_back(make_flag_check("all-trials-pass", passes == opt.trials));

    Json report = make_report("sweep", root_seed, sc.raw, std::move(payload), std::move(checks));
    return finish_report(std::move(report), started, opt);
}

int command_validate(const Options& opt) {
    auto started = std::chrono::steady_clock::now();
    Scenario sc = parse_scenario(opt.scenario_path);
    Tolerances tol = effective_tolerances(opt, sc);
    std::uint64_t seed = effective_seed(opt, sc);

    Json checks = Json::array();
    Json payload{{"model", to_string(sc.model)}};

    if (sc.model == ScenarioModel::RaioTwin) {
        RaioInstance inst = build_raio(sc, seed, tol);
        checks.push_back(make_check("rho-trace",
                                    std::abs(inst.rho_initial.mat().trace() - Complex(1.0, 0.0)),
                                    tol.validation_eps));
        checks.push_back(make_check("rho-hermiticity", hermiticity_defect(inst.rho_initial.mat()),
                                    tol.validation_eps));
        checks.push_back(make_check("trigger-idempotency", idempotency_defect(inst.q.mat()),
                                    tol.validation_eps));
        checks.push_back(make_check("final-event-idempotency", idempotency_defect(inst.p.mat()),
                                    tol.validation_eps));
        checks.push_back(make_check("evolution-unitarity", unitarity_defect(inst.u.mat()),
                                    tol.validation_eps));
    } else {
        PreparatorSpec spec = build_preparator(sc, seed, tol);
        spec.validate(tol);
        payload["label"] = spec.label;
        payload["kind"] = to_string(spec.kind);
        payload["occurrence"] = to_string(spec.occurrence);
        checks.push_back(make_check("rho-trace",
                                    std::abs(spec.rho_composite.mat().trace() - Complex(1.0, 0.0)),
                                    tol.validation_eps));
        checks.push_back(make_check("rho-hermiticity", hermiticity_defect(spec.rho_composite.mat()),
                                    tol.validation_eps));
        checks.push_back(make_check("rho-positivity",
                                    std::max(0.0, -min_hermitian_eigenvalue(hermitize(spec.rho_composite.mat()))),
                                    tol.validation_eps));
        checks.push_back(make_check("u-object-unitarity", unitarity_defect(spec.u_object.mat()),
                                    tol.validation_eps));
        checks.push_back(make_check("u-preparator-unitarity", unitarity_defect(spec.u_preparator.mat()),
                                    tol.validation_eps));
        if (spec.trigger.has_value()) {
            checks.push_back(make_check("trigger-idempotency", idempotency_defect(spec.trigger->mat()),
                                        tol.validation_eps));
            EventProbability p = event_probability(spec.rho_composite, *spec.trigger, 1, tol);
            payload["trigger_probability"] = p.value;
            checks.push_back(make_flag_check("trigger-probability-positive", p.raw > tol.certainty_eps));
        }
    }

    Json report = make_report("validate", seed, sc.raw, std::move(payload), std::move(checks));
    return finish_report(std::move(report), started, opt);
}

int emit_error(const char* type, const std::string& message) {
    Json err{{"error", Json{{"type", type}, {"message", message}}}};
    emit_json(err, std::cerr);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prepsim: conditional-state preparation and verification toolkit"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* cmd_run = app.add_subcommand("run", "Execute a preparation scenario");
    add_common_options(cmd_run, opt, false);
    CLI::App* cmd_raio = app.add_subcommand("raio-check", "Verify conditions and the retroactive equality");
    add_common_options(cmd_raio, opt, false);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run seeded trials and aggregate the results");
    add_common_options(cmd_sweep, opt, true);
    CLI::App* cmd_validate = app.add_subcommand("validate", "Audit scenario invariants without running");
    add_common_options(cmd_validate, opt, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) return command_run(opt);
        if (cmd_raio->parsed()) return command_raio_check(opt);
        if (cmd_sweep->parsed()) return command_sweep(opt);
        if (cmd_validate->parsed()) return command_validate(opt);
        return emit_error("usage", "no command selected");
    } catch (const ScenarioError& e) {
        return emit_error("scenario", e.what());
    } catch (const ImpossibleEventError& e) {
        return emit_error("impossible-event", e.what());
    } catch (const ValidationError& e) {
        return emit_error("validation", e.what());
    } catch (const std::exception& e) {
        return emit_error("internal", e.what());
    }
}
