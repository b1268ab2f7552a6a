#include <deque>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "ieikit/error.hpp"
#include "ieikit/report.hpp"
#include "run_config.hpp"

namespace {

using nlohmann::json;
using namespace ieikit::cli;

struct Slot {
    const Param* param = nullptr;
    std::string text;
    bool flag = false;
    CLI::Option* option = nullptr;
};

int fail(int exit_code, const std::string& code, const std::string& message) {
    std::cerr << json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump() << "\n";
    return exit_code;
}

int exit_code_for(ieikit::ErrorCode code) {
    switch (code) {
    case ieikit::ErrorCode::IoError: return 3;
    case ieikit::ErrorCode::DivergenceDetected: return 4;
    default: return 2;
    }
}

json parse_value(const Param& p, const std::string& text) {
    std::size_t used = 0;
    try {
        if (p.kind == ParamKind::count) {
            if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("");
            return std::stoull(text, &used);
        }
        if (p.kind == ParamKind::real) {
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("");
            return v;
        }
    } catch (const std::exception&) {
        throw CommandError(2, "INVALID_ARGUMENT", "--" + flag_name(p.key) + ": cannot parse '" + text + "'");
    }
    return text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ieikit: information evaluation indicators for training-data selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ieikit::kToolkitVersion));

    bool json_mode = false;
    std::string config_path;
    std::map<std::string, std::deque<Slot>> slots;
    std::map<std::string, CLI::App*> subs;
    for (const auto& spec : command_specs()) {
        auto* sub = app.add_subcommand(spec.name, spec.help);
        subs[spec.name] = sub;
        sub->add_option("--config", config_path, "re-run from a config JSON or any output of this tool");
        sub->add_flag("--json", json_mode, "print a machine-readable JSON summary");
        auto& mine = slots[spec.name];
        for (const auto& p : spec.params) {
            auto& s = mine.emplace_back();
            s.param = &p;
            const std::string f = flag_name(p.key);
            if (p.kind == ParamKind::flag) {
                s.option = sub->add_flag("--" + f + ",!--no-" + f, s.flag, p.help);
            } else if (p.positional) {
                s.option = sub->add_option(p.key, s.text, p.help);
            } else {
                s.option = sub->add_option("--" + f, s.text, p.help);
            }
            if (!p.fallback.is_string() || !p.fallback.get<std::string>().empty()) {
                s.option->description(p.help + " [default: " + p.fallback.dump() + "]");
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "USAGE", e.what());
    }

    std::string command;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) command = name;
    }

    try {
        const auto& spec = command_spec(command);
        json flags = json::object();
        for (const auto& s : slots[command]) {
            if (s.option->count() == 0) continue;
            flags[s.param->key] = s.param->kind == ParamKind::flag ? json(s.flag) : parse_value(*s.param, s.text);
        }
        const json file_config = config_path.empty() ? json::object() : load_config_file(config_path);
        const json config = resolve(spec, file_config, flags);
        json summary = run_command(config);
        if (json_mode) {
            summary["command"] = command;
            summary["run_config"] = config;
            std::cout << summary.dump() << "\n";
        } else {
            for (const auto& out : summary["outputs"]) std::cout << "wrote " << out.get<std::string>() << "\n";
            if (summary.contains("test_accuracy")) {
                std::cout << "test accuracy " << summary["test_accuracy"].get<double>() << " (std "
                          << summary["accuracy_std"].get<double>() << ")\n";
            }
        }
        return 0;
    } catch (const CommandError& e) {
        return fail(e.exit_code(), e.code(), e.what());
    } catch (const ieikit::Error& e) {
        return fail(exit_code_for(e.code()), std::string(ieikit::error_code_name(e.code())), e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(3, "IO_ERROR", e.what());
    } catch (const std::exception& e) {
        return fail(4, "RUNTIME", e.what());
    }
}
