#include "bipolar/config.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bipolar {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PotentialConfig, model, v0, alpha, beta, v_left, v_right, d0, surfaces)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PacketSpec, gamma, x0, p0, mass, t0)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GridConfig, x_left, x_right, n_points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TimeConfig, dt, t_max, snapshot_count, snapshot_times, stepper,
                                                diagnostics_stride, norm_limit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModeConfig, kind, x_divide, v0_eff, incident_surface)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ThresholdConfig, separation, localization, node_depth, node_shoulder,
                                                tail_fraction, admissibility, splice_tolerance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(StageConfig, speed_fraction, min_probability, final_window)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OracleConfig, enabled, dt_divisor, dispersion)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OutputConfig, directory, snapshots, snapshot_stride)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AssertionConfig, max_norm_drift, conditions, combined_min_range,
                                                combined_final_tolerance, branch_sum_tolerance, oracle_tolerance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, name, potential, packet, grid, time, mode, thresholds,
                                                stage, oracle, output, assertions)

namespace {

using nlohmann::json;

void reject_unknown(const json& given, const json& known, const std::string& path) {
    if (!given.is_object()) return;
    for (const auto& [key, value] : given.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!known.contains(key)) throw std::invalid_argument("config: unknown key '" + here + "'");
        if (known.at(key).is_object()) reject_unknown(value, known.at(key), here);
    }
}

RunConfig from_json_checked(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown(j, json(RunConfig{}), "");
    try {
        return j.get<RunConfig>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

double incident_momentum(double mass, double energy) { return std::sqrt(2.0 * mass * energy); }

}  // namespace

std::string to_json_text(const RunConfig& config, int indent) { return json(config).dump(indent); }

RunConfig config_from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return from_json_checked(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw std::invalid_argument("--set expects key=value, got '" + std::string(assignment) + "'");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));

    std::string pointer;
    std::stringstream parts(key);
    for (std::string part; std::getline(parts, part, '.');) pointer += "/" + part;

    json j = config;
    const json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw std::invalid_argument("--set: unknown key '" + key + "'");
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    j[ptr] = value;
    config = from_json_checked(j);
}

std::vector<std::string> preset_names() {
    return {"eckart-proton",        "eckart-electron", "barrier-ramp-spliced", "barrier-ramp-left",
            "two-surface",          "two-surface-uncoupled", "free-particle"};
}

RunConfig preset(std::string_view name) {
    RunConfig c;
    c.name = std::string(name);
    c.output.directory = "out-" + c.name;
    const double proton_p0 = incident_momentum(2000.0, 0.0027);
    auto proton_packet = [&](double p0) {
        c.packet.gamma = 0.35;
        c.packet.x0 = -7.0;
        c.packet.p0 = p0;
        c.packet.mass = 2000.0;
    };

    if (name == "eckart-proton") {
        c.potential = {"eckart", 0.0024, 2.5, 2.5, 0.0, 0.0, 0.0, 1};
        proton_packet(proton_p0);
        c.time.dt = 0.1;
        c.time.t_max = 11600.0;
        c.assertions.combined_min_range = {0.84, 0.88};
    } else if (name == "eckart-electron") {
        c.potential = {"eckart", 20.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1};
        c.packet = {1.0, -7.5, incident_momentum(1.0, 30.0), 1.0, 0.0};
        c.time.dt = 2.5e-4;
        c.time.t_max = 2.5;
    } else if (name == "barrier-ramp-spliced") {
        c.potential = {"barrier_ramp", 0.0020, 2.5, 2.5, 0.0, 0.0008, 0.0, 1};
        proton_packet(4.0);
        // Euler at dt = 0.1 amplifies grid-scale content of the V_R-started run past the guard.
        c.time.dt = 0.05;
        c.time.t_max = 9570.0;
        c.mode.kind = "splice";
        c.mode.x_divide = 0.0;
    } else if (name == "barrier-ramp-left") {
        c.potential = {"barrier_ramp", 0.0020, 2.5, 2.5, 0.0, 0.0008, 0.0, 1};
        proton_packet(proton_p0);
        c.time.dt = 0.1;
        c.time.t_max = 11600.0;
        c.assertions.conditions = {3};
        c.assertions.combined_final_tolerance = -1.0;
        c.assertions.branch_sum_tolerance = -1.0;
    } else if (name == "two-surface" || name == "two-surface-uncoupled") {
        const double d0 = name == "two-surface" ? 0.00072 : 0.0;
        c.potential = {"two_surface", 0.0024, 2.5, 2.5, 0.0, 0.0, d0, 2};
        proton_packet(proton_p0);
        c.time.dt = 0.1;
        c.time.t_max = 11600.0;
        c.mode.kind = "multisurface";
        c.mode.v0_eff = 0.0;
        c.assertions.conditions = {1, 3};
    } else if (name == "free-particle") {
        c.potential = {"free", 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1};
        c.packet = {0.1, 0.0, 0.0, 2000.0, 0.0};
        // At dx = 0.02 the stencil contributes about 2.5e-7 of the error at t = 500.
        c.grid = {-15.0, 15.0, 1501};
        c.time.dt = 0.01;
        c.time.t_max = 500.0;
        c.time.snapshot_count = 11;
        c.output.snapshot_stride = 5;
        c.assertions.conditions = {3};
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

PotentialModel make_potential(const RunConfig& config) {
    const auto& p = config.potential;
    if (p.model == "eckart") return eckart(p.v0, p.alpha);
    if (p.model == "barrier_ramp") return barrier_ramp(p.v0, p.alpha, p.beta, p.v_left, p.v_right);
    if (p.model == "two_surface") return two_surface(p.v0, p.d0, p.alpha);
    if (p.model == "free") return free_particle(p.surfaces);
    throw std::invalid_argument("unknown potential model '" + p.model + "'");
}

Grid make_config_grid(const RunConfig& config) {
    return make_grid(config.grid.x_left, config.grid.x_right, config.grid.n_points);
}

std::vector<double> snapshot_schedule(const RunConfig& config) {
    if (!config.time.snapshot_times.empty()) return config.time.snapshot_times;
    const std::size_t count = std::max<std::size_t>(2, config.time.snapshot_count);
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i)
        times[i] = config.time.t_max * static_cast<double>(i) / static_cast<double>(count - 1);
    return times;
}

std::vector<Finding> validate(const RunConfig& config) {
    std::vector<Finding> findings;
    auto error = [&](std::string code, std::string message, double value = 0.0) {
        findings.push_back({"error", std::move(code), std::move(message), value});
    };
    auto warning = [&](std::string code, std::string message, double value = 0.0) {
        findings.push_back({"warning", std::move(code), std::move(message), value});
    };

    const double numbers[] = {config.potential.v0,     config.potential.alpha,   config.potential.beta,
                              config.potential.v_left, config.potential.v_right, config.potential.d0,
                              config.packet.gamma,     config.packet.x0,         config.packet.p0,
                              config.packet.mass,      config.grid.x_left,       config.grid.x_right,
                              config.time.dt,          config.time.t_max,        config.mode.x_divide,
                              config.mode.v0_eff};
    for (double v : numbers)
        if (!std::isfinite(v)) {
            error("non-finite", "physical parameters must be finite", v);
            return findings;
        }
    if (!(config.packet.gamma > 0.0)) error("packet", "packet.gamma must be positive", config.packet.gamma);
    if (!(config.packet.mass > 0.0)) error("packet", "packet.mass must be positive", config.packet.mass);
    if (!(config.time.dt > 0.0)) error("time", "time.dt must be positive", config.time.dt);
    if (config.time.t_max < 0.0) error("time", "time.t_max must be non-negative", config.time.t_max);
    for (double t : config.time.snapshot_times)
        if (t < 0.0 || t > config.time.t_max) error("time", "snapshot time outside [0, t_max]", t);
    if (config.time.stepper != "euler" && config.time.stepper != "rk4")
        error("time", "time.stepper must be euler or rk4");
    if (config.oracle.dispersion != "exact" && config.oracle.dispersion != "finite_difference")
        error("oracle", "oracle.dispersion must be exact or finite_difference");
    if (!(config.oracle.dt_divisor >= 1.0)) error("oracle", "oracle.dt_divisor must be >= 1", config.oracle.dt_divisor);

    Grid grid;
    try {
        grid = make_config_grid(config);
    } catch (const std::exception& e) {
        error("grid", e.what());
    }
    std::optional<PotentialModel> potential;
    try {
        potential.emplace(make_potential(config));
    } catch (const std::exception& e) {
        error("potential", e.what());
    }
    const auto& mode = config.mode;
    if (mode.kind != "single" && mode.kind != "splice" && mode.kind != "multisurface")
        error("mode", "mode.kind must be single, splice or multisurface");
    if (potential && potential->n_surfaces() > 1 && mode.kind != "multisurface")
        error("mode", "multi-surface potentials require mode.kind = multisurface");
    if (potential && mode.kind == "splice" && potential->n_surfaces() != 1)
        error("mode", "splice mode needs a single-surface potential");
    if (potential && mode.kind == "multisurface" &&
        (mode.incident_surface < 1 || mode.incident_surface > potential->n_surfaces()))
        error("mode", "mode.incident_surface out of range", static_cast<double>(mode.incident_surface));
    if (std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == "error"; }))
        return findings;

    // Packet clearance from the grid edges.
    double edge = 0.0;
    for (double xe : {grid.x_left, grid.x_right}) {
        const double u = xe - config.packet.x0;
        edge = std::max(edge, std::exp(-config.packet.gamma * u * u));
    }
    if (edge >= 1e-8) {
        error("clearance", "packet overlaps the grid edges (edge amplitude relative to peak)", edge);
        return findings;
    }

    // Admissibility against the effective right asymptote of the decomposition.
    const std::size_t incident = mode.kind == "multisurface" ? mode.incident_surface - 1 : 0;
    const double v_left = potential->left_asymptote(incident);
    double v_eff = v_left;
    if (mode.kind == "splice") v_eff = potential->right_asymptote(0);
    if (mode.kind == "multisurface") v_eff = mode.v0_eff;
    const double p_min = minimum_momentum(v_left, v_eff, config.packet.mass);
    const auto psi0 = gaussian_packet(config.packet, grid);
    const double inadmissible = negative_momentum_probability(psi0, p_min);
    const double tol = config.thresholds.admissibility;
    if (inadmissible > tol) {
        std::ostringstream msg;
        msg << "probability below p_min = " << p_min << " is " << inadmissible << " (tolerance " << tol << ")";
        const bool decomposed = v_eff != v_left;
        if (decomposed && inadmissible > 100.0 * tol)
            error("admissibility", msg.str(), inadmissible);
        else
            warning("admissibility", msg.str(), inadmissible);
    }

    // Forward Euler grows each plane wave by (1 + (E dt)^2) in norm^2 per step.
    const double steps = std::round(config.time.t_max / config.time.dt);
    if (config.time.stepper == "euler") {
        double v_max = 0.0;
        const auto sampled = potential->sample(grid);
        for (const auto& row : sampled.value)
            for (double v : row) v_max = std::max(v_max, std::abs(v));
        // Energy is conserved, so the potential counts at the packet centre only.
        const double mean_energy =
            (config.packet.p0 * config.packet.p0 + config.packet.gamma) / (2.0 * config.packet.mass) +
            std::abs(potential->value(incident, incident, config.packet.x0));
        const double growth = std::expm1(steps * std::pow(mean_energy * config.time.dt, 2));
        if (growth > 0.01)
            warning("stability", "estimated forward-Euler norm growth over the run exceeds 1%; reduce dt", growth);
        const double lambda_max = 2.0 / (config.packet.mass * grid.dx * grid.dx) + v_max;
        const double roundoff = steps * std::pow(lambda_max * config.time.dt, 2);
        // A decomposed start seeds grid-scale modes far above roundoff.
        const bool decomposed = v_eff != v_left;
        const double allowed = decomposed ? 1e8 : 1e16;
        if (roundoff > std::log(allowed)) {
            std::ostringstream msg;
            msg << "grid-scale modes amplify by more than " << allowed << " in norm^2 (dt * lambda_max too large)";
            warning("stability", msg.str(), lambda_max * config.time.dt);
        }
    }
    return findings;
}

}  // namespace bipolar
