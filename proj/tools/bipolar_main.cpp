#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bipolar/config.hpp"
#include "bipolar/run.hpp"

namespace {

struct Common {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--preset", c.preset, "Built-in configuration to start from");
    cmd->add_option("--config", c.config_path, "JSON configuration file");
    cmd->add_option("--set", c.overrides, "Override a field, e.g. --set packet.p0=4 (repeatable)");
}

bipolar::RunConfig resolve(const Common& c) {
    if (!c.preset.empty() && !c.config_path.empty())
        throw std::invalid_argument("--preset and --config are mutually exclusive");
    bipolar::RunConfig config;
    if (!c.preset.empty()) config = bipolar::preset(c.preset);
    if (!c.config_path.empty()) config = bipolar::load_config(c.config_path);
    for (const auto& o : c.overrides) bipolar::apply_override(config, o);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bipolar wavepacket propagation"};
    app.require_subcommand(1);

    Common run_args;
    bool assert_flag = false;
    std::string output;
    std::string oracle;
    auto* run_cmd = app.add_subcommand("run", "Propagate and write snapshots and a summary");
    add_common(run_cmd, run_args);
    run_cmd->add_flag("--assert", assert_flag, "Exit 4 if any configured acceptance check fails");
    run_cmd->add_option("--output", output, "Output directory");
    run_cmd->add_option("--oracle", oracle, "Cross-check against the split-step propagator")
        ->check(CLI::IsMember({"on", "off"}));

    Common validate_args;
    auto* validate_cmd = app.add_subcommand("validate", "Report problems with a configuration");
    add_common(validate_cmd, validate_args);

    bool show = false;
    auto* list_cmd = app.add_subcommand("list-presets", "List built-in configurations");
    list_cmd->add_flag("--show", show, "Print each preset as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list_cmd) {
            for (const auto& name : bipolar::preset_names()) {
                if (show)
                    std::cout << bipolar::to_json_text(bipolar::preset(name)) << "\n";
                else
                    std::cout << name << "\n";
            }
            return 0;
        }

        if (*validate_cmd) {
            const auto config = resolve(validate_args);
            const auto findings = bipolar::validate(config);
            int code = 0;
            for (const auto& f : findings) {
                std::cout << f.severity << " " << f.code << ": " << f.message << " [" << f.value << "]\n";
                if (f.severity == "error") code = bipolar::exit_validation;
            }
            if (findings.empty()) std::cout << "ok\n";
            return code;
        }

        const auto config = resolve(run_args);
        bipolar::RunOptions options;
        options.assert_acceptance = assert_flag;
        if (!oracle.empty()) options.oracle = oracle == "on";
        if (!output.empty()) options.output_directory = output;
        const auto outcome = bipolar::run(config, options);
        for (const auto& a : outcome.assertions)
            if (assert_flag) std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << " = " << a.detail << "\n";
        (outcome.exit_code == 0 ? std::cout : std::cerr) << outcome.message << "\n";
        return outcome.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bipolar::exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
