#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mimocap::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Command { channel_gen, link_demo, waterfill, capacity_sweep, mux_gain };

std::string_view to_string(Command command) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

/// Invalid input; the front end maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::waterfill;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t master_seed = 0;
    std::filesystem::path output_dir = "out";
    bool plot = false;
    unsigned workers = 1; ///< speed only; never changes output bytes
};

struct OutputFile {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunManifest {
    nlohmann::json config_echo;
    std::string tool_version;
    double duration_s = 0.0;
    std::vector<OutputFile> outputs;
    std::vector<std::string> summary; ///< human-readable lines for stdout

    nlohmann::json to_json() const;
};

/// Flag values that take precedence over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    bool plot = false;
    unsigned workers = 1;
};

/// Reads an optional JSON config file (params plus optional master_seed) and
/// applies flag overrides. Throws ConfigError on unreadable or malformed input.
RunConfig load_run_config(Command command, const std::optional<std::filesystem::path>& config_path,
                          const Overrides& overrides);

/// Validates every parameter, computes all results in memory, then writes the
/// CSVs, optional SVGs and manifest.json into output_dir. Nothing is written if
/// validation fails (ConfigError). Numeric failures surface as mimocap::Error.
RunManifest run(const RunConfig& config);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace mimocap::cli
