#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ieikit::cli {

enum class ParamKind { text, count, real, flag };

struct Param {
    std::string key;  // JSON key; the flag is "--" + key with '_' as '-'
    ParamKind kind = ParamKind::text;
    nlohmann::json fallback;
    std::string help;
    bool required = false;
    bool positional = false;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<Param> params;
};

/// All subcommands with their parameters and defaults.
const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(const std::string& name);

std::string flag_name(const std::string& key);

/// Failure with a fixed process exit code and a stable error code name.
class CommandError : public std::runtime_error {
  public:
    CommandError(int exit_code, std::string code, const std::string& message)
        : std::runtime_error(message), exit_code_(exit_code), code_(std::move(code)) {}

    [[nodiscard]] int exit_code() const noexcept { return exit_code_; }
    [[nodiscard]] const std::string& code() const noexcept { return code_; }

  private:
    int exit_code_;
    std::string code_;
};

/// The RunConfig embedded in an output of this tool (JSON report, CSV with a
/// leading "# {...}" line, or EMB1 manifest), or a plain JSON config object.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// defaults < `file_config` < `flags`; checks keys, types and required values.
nlohmann::json resolve(const CommandSpec& spec, const nlohmann::json& file_config, const nlohmann::json& flags);

/// {"toolkit_version": ..., "run_config": ...}
nlohmann::json provenance(const nlohmann::json& run_config);

} // namespace ieikit::cli
