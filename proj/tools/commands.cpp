#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "ieikit/fixture.hpp"
#include "ieikit/iei.hpp"
#include "ieikit/ood_split.hpp"
#include "ieikit/probe.hpp"
#include "ieikit/report.hpp"
#include "ieikit/selection.hpp"
#include "ieikit/table.hpp"
#include "run_config.hpp"

namespace ieikit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) { throw CommandError(2, "INVALID_ARGUMENT", message); }

std::string str(const json& c, const char* key) { return c.at(key).get<std::string>(); }
std::uint64_t num(const json& c, const char* key) { return c.at(key).get<std::uint64_t>(); }
double real(const json& c, const char* key) { return c.at(key).get<double>(); }

bool has_extension(const std::string& path, const std::string& ext) {
    auto e = fs::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return e == ext;
}

/// Refuses to write over any input.
void guard(const std::vector<std::string>& inputs, const std::vector<fs::path>& outputs) {
    for (const auto& out : outputs) {
        for (const auto& in : inputs) {
            if (!in.empty() && fs::weakly_canonical(in) == fs::weakly_canonical(out)) {
                invalid("output " + out.string() + " would overwrite an input");
            }
        }
    }
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

EmbeddingTable stamped(EmbeddingTable t, const json& run_config, json extra = json::object()) {
    json p = provenance(run_config);
    p.update(extra);
    t.manifest.provenance = p.dump();
    return t;
}

ProbeConfig probe_config(const json& c, std::uint64_t seed) {
    ProbeConfig p;
    p.kind = parse_probe_kind(str(c, "probe"));
    p.step = real(c, "step");
    p.epochs = static_cast<std::uint32_t>(num(c, "epochs"));
    p.l2 = real(c, "l2");
    p.seed = seed;
    return p;
}

ScoreTable load_scores(const std::string& path) {
    const auto bytes = read_file(path);
    return scores_from_csv(std::string(bytes.begin(), bytes.end()));
}

json outputs_of(const std::vector<fs::path>& paths) {
    json out = json::array();
    for (const auto& p : paths) out.push_back(p.string());
    return out;
}

json outs_or_empty(const std::string& path) {
    return path.empty() ? json::array() : outputs_of({path});
}

// Commands -------------------------------------------------------------------

json cmd_score(const json& c) {
    const fs::path out = str(c, "out");
    const std::string stats_path = str(c, "stats");
    std::vector<fs::path> outs{out};
    if (!stats_path.empty()) outs.emplace_back(stats_path);
    guard({str(c, "in"), str(c, "prototypes")}, outs);

    const auto table = load_table(str(c, "in"));
    const Indicator indicator = parse_indicator(str(c, "indicator"));
    const ScoringOptions options{c.at("l2_normalize").get<bool>()};
    ClassPrototypes prototypes;
    if (indicator != Indicator::probability_entropy) {
        const std::string ref = str(c, "prototypes");
        prototypes = class_prototypes(ref.empty() ? table : load_table(ref), options);
    }
    const auto scores = score_table(indicator, table, prototypes, options);
    const auto stats = aci(class_distribution_stats(scores));
    const json prov = provenance(c);

    if (has_extension(out, ".json")) {
        json report = prov;
        report["scores"] = to_json(scores);
        report["class_stats"] = to_json(stats);
        write_json(out, report);
    } else {
        write_file_atomic(out, scores_to_csv(scores, prov.dump()));
    }
    if (!stats_path.empty()) {
        json report = prov;
        report["class_stats"] = to_json(stats);
        write_json(stats_path, report);
    }
    return {{"n_samples", scores.size()},
            {"indicator", indicator_name(indicator)},
            {"class_stats", to_json(stats)},
            {"outputs", outputs_of(outs)}};
}

json cmd_select(const json& c) {
    const fs::path out = str(c, "out");
    guard({str(c, "scores")}, {out});
    const std::uint64_t budget = num(c, "budget");
    if (budget == 0) invalid("--budget must be at least 1");

    const auto scores = load_scores(str(c, "scores"));
    const auto stats = aci(class_distribution_stats(scores));
    const BudgetScheme scheme{parse_budget_kind(str(c, "scheme")), budget};
    const auto plan = select(scores, scheme, parse_direction(str(c, "direction")), stats,
                             c.at("allow_exhaustion").get<bool>());
    json report = provenance(c);
    report["plan"] = to_json(plan);
    report["class_stats"] = to_json(stats);
    write_json(out, report);
    return {{"selected", plan.selected_ids.size()},
            {"per_class_budget", plan.per_class_budget},
            {"exhausted", plan.exhausted},
            {"outputs", outputs_of({out})}};
}

std::vector<std::string> parse_arms(const std::string& text) {
    std::vector<std::string> arms;
    std::stringstream ss(text);
    std::string arm;
    while (std::getline(ss, arm, ',')) {
        if (arm != "HID" && arm != "LID" && arm != "random") invalid("unknown arm '" + arm + "'");
        if (std::find(arms.begin(), arms.end(), arm) != arms.end()) invalid("arm '" + arm + "' listed twice");
        arms.push_back(arm);
    }
    if (arms.empty()) invalid("--arms lists no arm");
    return arms;
}

json cmd_simulate(const json& c) {
    const std::string mode = str(c, "mode");
    if (mode != "add" && mode != "reduce") invalid("simulate mode must be 'add' or 'reduce'");
    const bool adding = mode == "add";
    const std::string universe_path = str(c, "universe");
    const std::string base_path = str(c, "base");
    const std::string pool_path = str(c, "pool");
    if (adding && universe_path.empty() == (base_path.empty() || pool_path.empty())) {
        invalid("simulate add needs either --universe or both --base and --pool");
    }
    if (!adding && universe_path.empty()) invalid("simulate reduce needs --universe");
    const auto arms = parse_arms(str(c, "arms"));
    const std::string out_dir = str(c, "out_dir");
    std::vector<fs::path> outs;
    for (const auto& arm : arms) {
        outs.push_back(fs::path(out_dir) / (arm + ".csv"));
        outs.push_back(fs::path(out_dir) / (arm + ".json"));
    }
    guard({universe_path, base_path, pool_path, str(c, "eval")}, outs);

    const std::uint64_t seed = num(c, "seed");
    EmbeddingTable base, pool, universe;
    if (!universe_path.empty()) {
        universe = load_table(universe_path);
        if (adding) std::tie(base, pool) = random_base_split(universe, real(c, "base_fraction"), seed);
    } else {
        base = load_table(base_path);
        pool = load_table(pool_path);
        universe = merge(base, pool);
    }
    const auto eval = load_table(str(c, "eval"));

    const double budget = real(c, "budget");
    std::size_t round_budget = 0;
    if (budget > 0.0 && budget < 1.0) {
        round_budget = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(budget * universe.size())));
    } else if (budget >= 1.0 && budget == std::floor(budget)) {
        round_budget = static_cast<std::size_t>(budget);
    } else {
        invalid("--budget must be a fraction in (0, 1) or a whole count");
    }

    LoopOptions o;
    o.indicator = parse_indicator(str(c, "indicator"));
    o.scheme = parse_budget_kind(str(c, "scheme"));
    o.round_budget = round_budget;
    o.rounds = num(c, "rounds");
    o.probe = probe_config(c, seed);
    make_dir(out_dir);

    json summary{{"round_budget", round_budget}, {"arms", json::object()}};
    for (const auto& arm : arms) {
        LoopOptions a = o;
        a.arm = arm;
        // HID adds the goodset or removes the badset; LID does the opposite.
        const bool good = (arm == "HID") == adding;
        a.direction = good ? Direction::goodset : Direction::badset;
        if (arm == "random") {
            a.direction = Direction::goodset;
            a.provider = random_provider(seed);
            a.score_label = "random";
        }
        CurveRecord curve;
        try {
            curve = adding ? addition_loop(base, pool, eval, a) : reduction_loop(universe, eval, a);
        } catch (const Error& e) {
            throw CommandError(4, std::string(error_code_name(e.code())), arm + " arm: " + e.what());
        }
        json prov = provenance(c);
        prov["arm"] = arm;
        write_file_atomic(fs::path(out_dir) / (arm + ".csv"), curve_to_csv(curve, prov.dump()));
        json report = prov;
        report["curve"] = to_json(curve);
        write_json(fs::path(out_dir) / (arm + ".json"), report);
        summary["arms"][arm] = {{"sizes", curve.sizes()}, {"accuracies", curve.accuracies()},
                                {"exhausted", curve.exhausted}};
    }
    summary["outputs"] = outputs_of(outs);
    return summary;
}

json cmd_split(const json& c) {
    const fs::path dir = str(c, "out_dir");
    const std::vector<fs::path> outs{dir / "positive.emb1", dir / "negative.emb1", dir / "manifest.json"};
    guard({str(c, "train"), str(c, "test")}, outs);
    const double fraction = real(c, "fraction");
    if (!(fraction > 0.0 && fraction <= 1.0)) invalid("--fraction must lie in (0, 1]");

    const auto train = load_table(str(c, "train"));
    const auto test = load_table(str(c, "test"));
    const auto distances = migration_distances(train, test_domain_prototypes(test));
    const auto split = migration_split(distances, fraction, c.at("per_class").get<bool>());

    make_dir(dir.string());
    const std::string& source = train.manifest.provenance;
    save_table(stamped(subset(train, split.positive_ids), c, {{"part", "positive"}, {"source", source}}), outs[0]);
    save_table(stamped(subset(train, split.negative_ids), c, {{"part", "negative"}, {"source", source}}), outs[1]);
    json manifest = provenance(c);
    manifest["split"] = to_json(split);
    write_json(outs[2], manifest);
    return {{"positive", split.positive_ids.size()},
            {"negative", split.negative_ids.size()},
            {"outputs", outputs_of(outs)}};
}

json cmd_eval(const json& c) {
    const std::string out = str(c, "out");
    if (!out.empty()) guard({str(c, "train"), str(c, "test")}, {out});
    const std::uint64_t repeats = num(c, "repeats");
    if (repeats == 0) invalid("--repeats must be at least 1");
    const auto train = load_table(str(c, "train"));
    const auto test = load_table(str(c, "test"));

    const std::uint64_t seed = num(c, "seed");
    std::vector<double> accuracies;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < repeats; ++r) {
        seeds.push_back(seed + r);
        accuracies.push_back(evaluate(fit_probe(train, probe_config(c, seed + r)), test));
    }
    double mean = 0.0;
    for (double a : accuracies) mean += a;
    mean /= static_cast<double>(accuracies.size());
    double var = 0.0;
    for (double a : accuracies) var += (a - mean) * (a - mean);
    var /= static_cast<double>(accuracies.size());

    json report = provenance(c);
    report["train_size"] = train.size();
    report["test_size"] = test.size();
    report["test_accuracy"] = mean;
    report["accuracy_std"] = std::sqrt(var);
    report["accuracies"] = accuracies;
    report["seed"] = seed;
    report["seeds"] = seeds;
    report["probe_config"] = to_json(probe_config(c, seed));
    if (!out.empty()) write_json(out, report);
    json summary = report;
    summary.erase("run_config");
    summary["outputs"] = outs_or_empty(out);
    return summary;
}

json cmd_stats(const json& c) {
    const std::string out = str(c, "out");
    if (!out.empty()) guard({str(c, "scores")}, {out});
    const auto scores = load_scores(str(c, "scores"));
    const auto stats = aci(class_distribution_stats(scores));
    json report = provenance(c);
    report["indicator"] = indicator_name(scores.indicator);
    report["class_stats"] = to_json(stats);
    if (!out.empty()) write_json(out, report);
    return {{"indicator", indicator_name(scores.indicator)},
            {"class_stats", to_json(stats)},
            {"outputs", outs_or_empty(out)}};
}

json cmd_gen_fixture(const json& c) {
    MixtureSpec spec;
    spec.n_classes = num(c, "classes");
    spec.dim = num(c, "dim");
    spec.separation = real(c, "separation");
    spec.noise = real(c, "noise");
    spec.anisotropy = real(c, "anisotropy");
    spec.difficulty_spread = real(c, "difficulty_spread");
    spec.separation_spread = real(c, "separation_spread");
    if (spec.n_classes < 1 || spec.dim < 1) invalid("--classes and --dim must be at least 1");
    if (num(c, "per_class") < 1) invalid("--per-class must be at least 1");
    const double shift = real(c, "shift");
    if (shift < 0.0) invalid("--shift must be non-negative");

    const std::uint64_t seed = num(c, "seed");
    const fs::path dir = str(c, "out_dir");
    EmbeddingTable first, second;
    std::vector<fs::path> outs;
    if (shift > 0.0) {
        auto f = make_ood_fixture(spec, num(c, "per_class"), num(c, "eval_per_class"), shift, seed);
        first = std::move(f.train);
        second = std::move(f.test);
        outs = {dir / "train.emb1", dir / "test.emb1"};
    } else {
        auto f = make_iid_fixture(spec, num(c, "per_class"), num(c, "eval_per_class"), seed);
        first = std::move(f.universe);
        second = std::move(f.eval);
        outs = {dir / "universe.emb1", dir / "eval.emb1"};
    }
    if (c.at("logits").get<bool>()) {
        const auto model = fit_linear_probe(first, ProbeConfig{ProbeKind::linear, 0.1, 200, 1e-4, seed});
        first = attach_logits(model, first);
        if (!second.empty()) second = attach_logits(model, second);
    }
    make_dir(dir.string());
    save_table(stamped(first, c, {{"source", first.manifest.provenance}}), outs[0]);
    save_table(stamped(second, c, {{"source", second.manifest.provenance}}), outs[1]);
    return {{"sizes", {first.size(), second.size()}}, {"outputs", outputs_of(outs)}};
}

json cmd_convert(const json& c) {
    const std::string in = str(c, "in");
    const fs::path out = str(c, "out");
    guard({in}, {out});
    if (has_extension(in, ".csv") && has_extension(out, ".emb1")) {
        CsvImportOptions o;
        o.n_classes = num(c, "classes");
        o.with_logits = c.at("logits").get<bool>();
        o.domain = parse_domain_tag(str(c, "domain"));
        const auto table = import_csv(in, o);
        save_table(stamped(table, c), out);
        return {{"n_samples", table.size()}, {"outputs", outputs_of({out})}};
    }
    if (has_extension(in, ".emb1") && has_extension(out, ".csv")) {
        const auto table = load_table(in);
        write_file_atomic(out, "# " + provenance(c).dump() + "\n" + export_csv(table));
        return {{"n_samples", table.size()}, {"outputs", outputs_of({out})}};
    }
    invalid("convert needs .csv -> .emb1 or .emb1 -> .csv");
}

} // namespace

json run_command(const json& config) {
    static const std::map<std::string, json (*)(const json&)> table{
        {"score", cmd_score}, {"select", cmd_select}, {"simulate", cmd_simulate},
        {"split", cmd_split}, {"eval", cmd_eval},     {"stats", cmd_stats},
        {"gen-fixture", cmd_gen_fixture}, {"convert", cmd_convert},
    };
    const auto it = table.find(config.at("command").get<std::string>());
    if (it == table.end()) invalid("unknown command");
    return it->second(config);
}

} // namespace ieikit::cli
