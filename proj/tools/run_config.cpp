#include "run_config.hpp"

#include <algorithm>
#include <cmath>

#include "ieikit/error.hpp"
#include "ieikit/report.hpp"
#include "ieikit/table.hpp"

namespace ieikit::cli {

namespace {

using nlohmann::json;

Param text(std::string key, std::string fallback, std::string help, bool required = false) {
    return {std::move(key), ParamKind::text, std::move(fallback), std::move(help), required, false};
}
Param count(std::string key, std::uint64_t fallback, std::string help) {
    return {std::move(key), ParamKind::count, fallback, std::move(help), false, false};
}
Param real(std::string key, double fallback, std::string help) {
    return {std::move(key), ParamKind::real, fallback, std::move(help), false, false};
}
Param flag(std::string key, bool fallback, std::string help) {
    return {std::move(key), ParamKind::flag, fallback, std::move(help), false, false};
}
Param seed() { return count("seed", 42, "seed for every random choice"); }

std::vector<Param> probe_params() {
    return {text("probe", "linear", "evaluator: linear or nearest-prototype"),
            real("step", 0.1, "linear probe step size"),
            count("epochs", 200, "linear probe epochs"),
            real("l2", 1e-4, "linear probe weight decay")};
}

std::vector<Param> concat(std::vector<Param> a, const std::vector<Param>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<CommandSpec> build_specs() {
    std::vector<CommandSpec> specs;
    specs.push_back({"score", "score every sample of an EMB1 table with an indicator",
                     {text("in", "", "input EMB1 table", true),
                      text("out", "", "score file (.csv, or .json for a full report)", true),
                      text("indicator", "distance-entropy", "distance-entropy, entropy or metric"),
                      text("prototypes", "", "EMB1 table whose class means are the prototypes (default: --in)"),
                      flag("l2_normalize", false, "L2-normalize features before scoring"),
                      text("stats", "", "optional class statistics JSON"),
                      seed()}});
    specs.push_back({"select", "select a goodset or badset from a score CSV",
                     {text("scores", "", "score CSV", true),
                      text("out", "", "selection plan JSON", true),
                      count("budget", 0, "number of samples to select"),
                      text("scheme", "balanced", "balanced or unbalanced"),
                      text("direction", "goodset", "goodset or badset"),
                      flag("allow_exhaustion", false, "take the whole pool when it is smaller than the budget"),
                      seed()}});
    auto sim = concat({{"mode", ParamKind::text, "", "add or reduce", true, true},
                       text("universe", "", "EMB1 universe (add: split into base/pool; reduce: training set)"),
                       text("base", "", "EMB1 base set (add mode, with --pool)"),
                       text("pool", "", "EMB1 pool set (add mode, with --base)"),
                       text("eval", "", "held-out EMB1 evaluation table", true),
                       text("out_dir", "", "output directory", true),
                       real("base_fraction", 0.1, "base share of the universe per class (add mode)"),
                       text("indicator", "distance-entropy", "distance-entropy, entropy or metric"),
                       text("scheme", "balanced", "balanced or unbalanced"),
                       real("budget", 0.1, "per-round budget; below 1 a fraction of the universe"),
                       count("rounds", 9, "number of rounds"),
                       text("arms", "HID,LID,random", "comma-separated arms: HID, LID, random")},
                      probe_params());
    sim.push_back(seed());
    specs.push_back({"simulate", "run addition or reduction curves for the HID, LID and random arms", sim});
    specs.push_back({"split", "split a training table into positive and negative migration data",
                     {text("train", "", "training-domain EMB1 table", true),
                      text("test", "", "test-domain EMB1 table", true),
                      text("out_dir", "", "output directory", true),
                      real("fraction", 0.4, "positive fraction in (0, 1]"),
                      flag("per_class", true, "apply the fraction within each class"),
                      seed()}});
    auto ev = concat({text("train", "", "training EMB1 table", true),
                      text("test", "", "test EMB1 table", true),
                      text("out", "", "optional report JSON"),
                      count("repeats", 1, "number of fits with seeds seed, seed+1, ...")},
                     probe_params());
    ev.push_back(seed());
    specs.push_back({"eval", "fit a probe and report test accuracy", ev});
    specs.push_back({"stats", "per-class score statistics and class information",
                     {text("scores", "", "score CSV", true), text("out", "", "optional report JSON"), seed()}});
    specs.push_back({"gen-fixture", "write a synthetic Gaussian-mixture fixture",
                     {text("out_dir", "", "output directory", true),
                      count("classes", 10, "number of classes"),
                      count("dim", 16, "feature dimension"),
                      count("per_class", 500, "rows per class in the universe (or train domain)"),
                      count("eval_per_class", 200, "rows per class in the eval (or test domain) table"),
                      real("separation", 3.0, "norm of the class means"),
                      real("noise", 1.0, "per-axis standard deviation"),
                      real("anisotropy", 1.0, "per-axis log-scale jitter"),
                      real("difficulty_spread", 0.0, "per-class noise log-scale spread"),
                      real("separation_spread", 0.0, "per-class mean-norm log-scale spread"),
                      real("shift", 0.0, "per-class test-domain mean displacement; > 0 writes train/test"),
                      flag("logits", false, "attach logits of a linear probe fitted on the first table"),
                      seed()}});
    specs.push_back({"convert", "convert between CSV and EMB1",
                     {text("in", "", "input .csv or .emb1", true),
                      text("out", "", "output .emb1 or .csv", true),
                      count("classes", 0, "class count for CSV input (0: infer)"),
                      flag("logits", false, "CSV input carries trailing logit columns"),
                      text("domain", "train", "domain tag for CSV input"),
                      seed()}});
    return specs;
}

bool matches_kind(const json& v, ParamKind kind) {
    switch (kind) {
    case ParamKind::text: return v.is_string();
    case ParamKind::count: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case ParamKind::real: return v.is_number() && std::isfinite(v.get<double>());
    case ParamKind::flag: return v.is_boolean();
    }
    return false;
}

[[noreturn]] void invalid(const std::string& message) { throw CommandError(2, "INVALID_ARGUMENT", message); }

} // namespace

const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs = build_specs();
    return specs;
}

const CommandSpec& command_spec(const std::string& name) {
    for (const auto& s : command_specs()) {
        if (s.name == name) return s;
    }
    invalid("unknown command '" + name + "'");
}

std::string flag_name(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return f;
}

json load_config_file(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file(path);
    } catch (const Error& e) {
        throw CommandError(3, std::string(error_code_name(e.code())), e.what());
    }
    const std::string text(bytes.begin(), bytes.end());
    json doc;
    try {
        if (text.rfind("EMB1", 0) == 0) {
            doc = json::parse(decode_table(bytes).manifest.provenance);
        } else if (text.rfind("# ", 0) == 0) {
            doc = json::parse(text.substr(2, text.find('\n') - 2));
        } else {
            doc = json::parse(text);
        }
    } catch (const json::exception& e) {
        invalid("config " + path.string() + " is not valid JSON: " + e.what());
    } catch (const Error& e) {
        throw CommandError(2, std::string(error_code_name(e.code())), e.what());
    }
    if (doc.is_object() && doc.contains("run_config")) doc = doc["run_config"];
    if (!doc.is_object()) invalid("config " + path.string() + " holds no run configuration");
    return doc;
}

json resolve(const CommandSpec& spec, const json& file_config, const json& flags) {
    json cfg = json::object();
    cfg["command"] = spec.name;
    for (const auto& p : spec.params) cfg[p.key] = p.fallback;

    auto overlay = [&](const json& layer, const std::string& origin) {
        for (const auto& [key, value] : layer.items()) {
            if (key == "command") {
                if (value != spec.name) {
                    invalid(origin + " belongs to command '" + value.dump() + "', not '" + spec.name + "'");
                }
                continue;
            }
            const auto it = std::find_if(spec.params.begin(), spec.params.end(),
                                         [&](const Param& p) { return p.key == key; });
            if (it == spec.params.end()) invalid(origin + " has unknown key '" + key + "'");
            if (!matches_kind(value, it->kind)) invalid(origin + " has a value of the wrong type for '" + key + "'");
            cfg[key] = it->kind == ParamKind::real ? json(value.get<double>()) : value;
        }
    };
    overlay(file_config, "config file");
    overlay(flags, "command line");

    for (const auto& p : spec.params) {
        if (p.required && cfg[p.key].get<std::string>().empty()) {
            invalid("missing required " + (p.positional ? p.key : "--" + flag_name(p.key)));
        }
    }
    return cfg;
}

json provenance(const json& run_config) {
    return {{"toolkit_version", std::string(kToolkitVersion)}, {"run_config", run_config}};
}

} // namespace ieikit::cli
