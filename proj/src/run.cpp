#include "bipolar/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "bipolar/initial_conditions.hpp"
#include "bipolar/oracle.hpp"
#include "bipolar/splicing.hpp"

namespace bipolar {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

PropagationOptions propagation_options(const RunConfig& config) {
    PropagationOptions o;
    o.dt = config.time.dt;
    o.t_max = config.time.t_max;
    o.snapshot_times = snapshot_schedule(config);
    o.diagnostics_stride = config.time.diagnostics_stride;
    o.stepper = config.time.stepper == "rk4" ? Stepper::runge_kutta4 : Stepper::forward_euler;
    o.norm_limit = config.time.norm_limit;
    return o;
}

ConditionThresholds condition_thresholds(const RunConfig& config) {
    ConditionThresholds t;
    t.separation = config.thresholds.separation;
    t.localization = config.thresholds.localization;
    t.node_depth = config.thresholds.node_depth;
    t.node_shoulder = config.thresholds.node_shoulder;
    t.tail_fraction = config.thresholds.tail_fraction;
    t.x_divide = config.mode.x_divide;
    return t;
}

void run_oracle(Experiment& e, const BipolarState& initial, const PotentialModel& potential) {
    const auto& config = e.config;
    OracleOptions o;
    o.dt = config.time.dt / config.oracle.dt_divisor;
    o.t_max = config.time.t_max;
    for (const auto& s : e.snapshots) o.snapshot_times.push_back(s.t - initial.t);
    o.dispersion = config.oracle.dispersion == "finite_difference" ? Dispersion::finite_difference : Dispersion::exact;

    std::vector<ComplexField> psi0;
    for (const auto& pair : initial.surfaces) psi0.push_back(pair.total());

    const auto start = Clock::now();
    e.oracle_ran = true;
    try {
        const auto result = unipolar_propagate(psi0, potential, initial.mass, o);
        if (result.snapshots.size() != e.snapshots.size())
            throw std::runtime_error("oracle: snapshot schedule does not match the bipolar run");
        for (std::size_t i = 0; i < e.snapshots.size(); ++i) {
            e.oracle_deviation.push_back(max_deviation(e.snapshots[i], result.snapshots[i]));
            e.oracle_max_deviation = std::max(e.oracle_max_deviation, e.oracle_deviation.back());
        }
    } catch (const std::runtime_error& err) {
        e.oracle_error = err.what();
    }
    e.oracle_seconds = seconds_since(start);
}

void summarize(Experiment& e) {
    const auto& config = e.config;
    auto& s = e.summary;
    const auto& snaps = e.snapshots;
    s.branches = reflection_transmission(snaps.back(), config.mode.x_divide, config.thresholds.separation);

    s.combined_min = combined_probability(snaps.front());
    s.combined_min_time = snaps.front().t;
    if (config.mode.kind == "splice") {
        for (const auto& st : snaps) {
            const double c = combined_probability(st);
            if (c < s.combined_min) {
                s.combined_min = c;
                s.combined_min_time = st.t;
            }
        }
    } else {
        for (const auto& d : e.primary.diagnostics) {
            if (d.combined() < s.combined_min) {
                s.combined_min = d.combined();
                s.combined_min_time = d.t;
            }
        }
    }
    s.combined_final = combined_probability(snaps.back());
    s.total_initial = e.primary.diagnostics.front().total();
    s.total_final = e.primary.diagnostics.back().total();
    s.norm_drift = s.total_final / s.total_initial - 1.0;

    s.conditions = check_conditions(snaps, condition_thresholds(config));
    StageOptions stage{config.stage.speed_fraction, config.stage.min_probability, config.stage.final_window};
    s.stage_transition_time = stage_transition_time(snaps, 0, Sign::minus, stage);
    s.peak_coincidence_time = peak_coincidence_time(snaps, 0, config.stage.min_probability);
}

}  // namespace

Experiment execute(const RunConfig& config) {
    Experiment e;
    e.config = config;
    e.findings = validate(config);
    for (const auto& f : e.findings)
        if (f.severity == "error") throw ValidationError(f.code + ": " + f.message, e.findings);

    const Grid grid = make_config_grid(config);
    const PotentialModel potential = make_potential(config);
    const auto psi0 = gaussian_packet(config.packet, grid);
    const auto options = propagation_options(config);
    const double mass = config.packet.mass;

    // Inadmissible packets surface as validation errors.
    auto decompose = [&](auto&& build) {
        try {
            return build();
        } catch (const std::runtime_error& err) {
            throw ValidationError(err.what(), e.findings);
        }
    };

    BipolarState initial;
    const auto start = Clock::now();
    try {
        if (config.mode.kind == "splice") {
            const auto split = decompose([&] {
                return right_decomposition(psi0, potential.left_asymptote(), potential.right_asymptote(), mass,
                                           config.thresholds.admissibility);
            });
            e.discarded_probability = split.discarded_probability;
            e.initial_minus_norm = norm_squared(split.minus);
            initial = BipolarState::incident(split.projection, mass, config.packet.t0);
            BipolarState right;
            right.mass = mass;
            right.t = config.packet.t0;
            right.surfaces.push_back({split.plus, split.minus});

            auto secondary = std::async(std::launch::async, [&] { return propagate(right, potential, options); });
            e.primary = propagate(initial, potential, options);
            e.secondary = secondary.get();

            SplicePlan plan{config.mode.x_divide, e.primary.snapshots, e.secondary->snapshots};
            for (std::size_t i = 0; i < e.primary.snapshots.size(); ++i)
                e.splice_mismatch = std::max(e.splice_mismatch, splice_mismatch(plan, i));
            e.snapshots = splice_all(plan, config.thresholds.splice_tolerance);
            const auto th = condition_thresholds(config);
            e.constituent_node_events = node_events(e.primary.snapshots, th);
            const auto more = node_events(e.secondary->snapshots, th);
            e.constituent_node_events.insert(e.constituent_node_events.end(), more.begin(), more.end());
        } else {
            if (config.mode.kind == "multisurface") {
                initial = decompose([&] {
                    return multisurface_initial(psi0, potential, mass, config.mode.incident_surface - 1,
                                                config.mode.v0_eff, config.thresholds.admissibility);
                });
                initial.t = config.packet.t0;
                for (const auto& pair : initial.surfaces) e.initial_minus_norm += norm_squared(pair.minus);
            } else {
                initial = BipolarState::incident(psi0, mass, config.packet.t0);
            }
            e.primary = propagate(initial, potential, options);
            e.snapshots = e.primary.snapshots;
        }
    } catch (const InstabilityError&) {
        throw;
    } catch (const std::invalid_argument& err) {
        throw ValidationError(err.what(), e.findings);
    }
    e.propagation_seconds = seconds_since(start);

    summarize(e);
    if (config.oracle.enabled) run_oracle(e, initial, potential);
    return e;
}

std::vector<AssertionResult> evaluate_assertions(const Experiment& e) {
    const auto& a = e.config.assertions;
    const auto& s = e.summary;
    std::vector<AssertionResult> out;
    auto add = [&](std::string name, bool pass, double value) {
        std::ostringstream detail;
        detail.precision(10);
        detail << value;
        out.push_back({std::move(name), pass, detail.str()});
    };

    if (a.max_norm_drift >= 0.0) add("norm_drift", std::abs(s.norm_drift) <= a.max_norm_drift, s.norm_drift);
    for (int c : a.conditions) {
        bool pass = false;
        double value = 0.0;
        if (c == 1) {
            pass = s.conditions.condition1_pass;
            value = std::max(s.conditions.condition1.t0_purity, s.conditions.condition1.tf_separation);
        } else if (c == 2) {
            pass = s.conditions.condition2_pass;
            value = s.conditions.condition2.worst;
        } else if (c == 3) {
            pass = s.conditions.condition3_pass && e.constituent_node_events.empty();
            value = static_cast<double>(s.conditions.condition3.events.size() + e.constituent_node_events.size());
        } else {
            continue;
        }
        add("condition" + std::to_string(c), pass, value);
    }
    if (a.combined_min_range.size() == 2)
        add("combined_min", s.combined_min >= a.combined_min_range[0] && s.combined_min <= a.combined_min_range[1],
            s.combined_min);
    if (e.config.mode.kind != "splice") {
        const double c0 = combined_probability(e.snapshots.front());
        add("combined_initial", std::abs(c0 - 1.0) <= 1e-6, c0);
    }
    if (a.combined_final_tolerance >= 0.0)
        add("combined_final", std::abs(s.combined_final - 1.0) <= a.combined_final_tolerance, s.combined_final);
    double branch_sum = 0.0;
    for (const auto& b : s.branches) branch_sum += b.reflection + b.transmission;
    if (a.branch_sum_tolerance >= 0.0) add("branch_sum", std::abs(branch_sum - 1.0) <= a.branch_sum_tolerance, branch_sum);
    if (e.oracle_ran)
        add("oracle", e.oracle_error.empty() && e.oracle_max_deviation <= a.oracle_tolerance, e.oracle_max_deviation);
    return out;
}

std::string snapshot_csv(const BipolarState& state) {
    std::string out = "x";
    for (std::size_t i = 1; i <= state.n_surfaces(); ++i) {
        const std::string n = std::to_string(i);
        for (const char* col : {"re_psi%_plus", "im_psi%_plus", "re_psi%_minus", "im_psi%_minus", "rho%_plus",
                                "rho%_minus", "rho%", "re_Psi%_plus", "im_Psi%_plus", "re_Psi%_minus",
                                "im_Psi%_minus"}) {
            std::string name(col);
            name.replace(name.find('%'), 1, n);
            out += "," + name;
        }
    }
    out += "\n";

    std::vector<ComplexField> big_plus, big_minus;
    for (const auto& pair : state.surfaces) {
        big_plus.push_back(cumulative_integral(pair.plus));
        big_minus.push_back(cumulative_integral(pair.minus));
    }
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    const Grid& g = state.grid();
    for (std::size_t k = 0; k < g.n_points; ++k) {
        put(g.x(k));
        for (std::size_t i = 0; i < state.n_surfaces(); ++i) {
            const Complex p = state.surfaces[i].plus[k];
            const Complex m = state.surfaces[i].minus[k];
            for (double v : {p.real(), p.imag(), m.real(), m.imag(), std::norm(p), std::norm(m), std::norm(p + m),
                             big_plus[i][k].real(), big_plus[i][k].imag(), big_minus[i][k].real(),
                             big_minus[i][k].imag()}) {
                out += ",";
                put(v);
            }
        }
        out += "\n";
    }
    return out;
}

std::string summary_json(const Experiment& e, const std::vector<AssertionResult>& assertions) {
    const auto& s = e.summary;
    auto optional = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["config"] = json::parse(to_json_text(e.config));

    json branches = json::array();
    for (std::size_t i = 0; i < s.branches.size(); ++i)
        branches.push_back({{"surface", i + 1},
                            {"reflection", s.branches[i].reflection},
                            {"transmission", s.branches[i].transmission},
                            {"separated", s.branches[i].separated}});
    j["branches"] = branches;
    j["combined_probability"] = {{"min", s.combined_min}, {"min_time", s.combined_min_time}, {"final", s.combined_final}};
    j["total_probability"] = {{"initial", s.total_initial}, {"final", s.total_final}, {"drift", s.norm_drift}};
    j["stage_transition_time"] = optional(s.stage_transition_time);
    j["peak_coincidence_time"] = optional(s.peak_coincidence_time);

    const auto& c = s.conditions;
    json events = json::array();
    for (const auto& ev : c.condition3.events)
        events.push_back({{"t", ev.t}, {"x", ev.x}, {"surface", ev.surface + 1},
                          {"component", ev.sign == Sign::plus ? "plus" : "minus"}, {"depth", ev.depth}});
    j["conditions"] = {
        {"condition1",
         {{"pass", c.condition1_pass},
          {"t0_purity", c.condition1.t0_purity},
          {"tf_separation", c.condition1.tf_separation},
          {"tf_minus_right", c.condition1.tf_minus_right},
          {"tf_plus_left", c.condition1.tf_plus_left}}},
        {"condition2", {{"pass", c.condition2_pass}, {"worst_tail_ratio", c.condition2.worst}}},
        {"condition3", {{"pass", c.condition3_pass}, {"events", events}}},
        {"thresholds",
         {{"separation", c.thresholds.separation},
          {"localization", c.thresholds.localization},
          {"node_depth", c.thresholds.node_depth},
          {"node_shoulder", c.thresholds.node_shoulder},
          {"tail_fraction", c.thresholds.tail_fraction},
          {"x_divide", c.thresholds.x_divide}}}};

    j["initial"] = {{"minus_norm", e.initial_minus_norm}, {"discarded_probability", e.discarded_probability}};
    if (e.secondary) {
        j["splice"] = {{"max_total_mismatch", e.splice_mismatch},
                       {"constituent_node_events", e.constituent_node_events.size()}};
    }
    if (e.oracle_ran) {
        j["oracle"] = {{"max_deviation", e.oracle_max_deviation},
                       {"per_snapshot", e.oracle_deviation},
                       {"error", e.oracle_error.empty() ? json(nullptr) : json(e.oracle_error)}};
    }
    json findings = json::array();
    for (const auto& f : e.findings)
        findings.push_back({{"severity", f.severity}, {"code", f.code}, {"message", f.message}, {"value", f.value}});
    j["findings"] = findings;
    json checks = json::array();
    for (const auto& a : assertions) checks.push_back({{"name", a.name}, {"pass", a.pass}, {"value", a.detail}});
    j["assertions"] = checks;
    j["steps"] = e.primary.steps;
    return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content, std::vector<std::string>& files) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    files.push_back(path.string());
}

std::string norms_csv(const PropagationResult& r) {
    std::string out = "step,t,combined,total\n";
    char buf[128];
    for (const auto& d : r.diagnostics) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", d.step, d.t, d.combined(), d.total());
        out += buf;
    }
    return out;
}

}  // namespace

RunOutcome run(RunConfig config, const RunOptions& options) {
    RunOutcome outcome;
    if (options.oracle) config.oracle.enabled = *options.oracle;
    if (options.output_directory) config.output.directory = *options.output_directory;

    Experiment e;
    try {
        e = execute(config);
    } catch (const ValidationError& err) {
        outcome.exit_code = exit_validation;
        outcome.message = err.what();
        return outcome;
    } catch (const InstabilityError& err) {
        outcome.exit_code = exit_instability;
        outcome.message = err.what();
        return outcome;
    }

    outcome.assertions = evaluate_assertions(e);
    namespace fs = std::filesystem;
    const fs::path dir(config.output.directory);
    fs::create_directories(dir);
    write_file(dir / "config.json", to_json_text(config) + "\n", outcome.files);
    write_file(dir / "summary.json", summary_json(e, options.assert_acceptance ? outcome.assertions
                                                                               : std::vector<AssertionResult>{}),
               outcome.files);
    write_file(dir / "norms.csv", norms_csv(e.primary), outcome.files);
    json timings = {{"propagation_seconds", e.propagation_seconds}, {"oracle_seconds", e.oracle_seconds}};
    write_file(dir / "timings.json", timings.dump(2) + "\n", outcome.files);

    if (config.output.snapshots) {
        fs::create_directories(dir / "snapshots");
        const std::size_t stride = std::max<std::size_t>(1, config.output.snapshot_stride);
        for (std::size_t i = 0; i < e.snapshots.size(); ++i) {
            if (i % stride != 0 && i + 1 != e.snapshots.size()) continue;
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
            write_file(dir / "snapshots" / name, snapshot_csv(e.snapshots[i]), outcome.files);
        }
    }

    std::ostringstream msg;
    msg << "wrote " << outcome.files.size() << " files to " << dir.string();
    outcome.message = msg.str();
    if (options.assert_acceptance) {
        for (const auto& a : outcome.assertions) {
            if (!a.pass) {
                outcome.exit_code = exit_assertion;
                outcome.message += "; assertion failed: " + a.name + " = " + a.detail;
            }
        }
    }
    return outcome;
}

}  // namespace bipolar
