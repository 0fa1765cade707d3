// mimocap: command-line front end for channel synthesis, detection demos,
// water-filling and capacity sweeps.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numeric failure.

#include "mimocap/cli/run.hpp"
#include "mimocap/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

} // namespace

int main(int argc, char** argv) {
    using namespace mimocap::cli;

    CLI::App app{"MIMO link-level and capacity toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1, 1);

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool plot = false;
    unsigned workers = 1;

    const std::pair<Command, const char*> commands[] = {
        {Command::channel_gen, "Dump channel realizations as CSV"},
        {Command::link_demo, "Run the two-stream LS/LMMSE link demo"},
        {Command::waterfill, "Water-fill power over channels and subcarriers"},
        {Command::capacity_sweep, "Monte-Carlo ergodic capacity vs SNR with impairments"},
        {Command::mux_gain, "Finite-SNR and classic multiplexing gains"},
    };
    for (const auto& [command, help] : commands) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(command)), help);
        sub->add_option("--config", config_path, "JSON parameter file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed (overrides the config file)");
        sub->add_option("--out", out_dir, "output directory (default: out)");
        sub->add_flag("--plot", plot, "also write an SVG per table");
        sub->add_option("--workers", workers, "worker threads; affects speed only")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    const Command command = *parse_command(app.get_subcommands().front()->get_name());
    Overrides overrides;
    overrides.seed = seed;
    if (out_dir) {
        overrides.out = std::filesystem::path(*out_dir);
    }
    overrides.plot = plot;
    overrides.workers = workers;

    try {
        std::optional<std::filesystem::path> path;
        if (config_path) {
            path = std::filesystem::path(*config_path);
        }
        const RunManifest manifest = run(load_run_config(command, path, overrides));
        for (const std::string& line : manifest.summary) {
            std::cout << line << '\n';
        }
        for (const OutputFile& f : manifest.outputs) {
            std::cout << "wrote " << f.name << " (" << f.sha256 << ")\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mimocap::Error& e) {
        std::cerr << "numeric failure in " << e.operation() << ": " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
