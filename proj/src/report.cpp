#include "ieikit/report.hpp"

#include <cstdio>

namespace ieikit {

using nlohmann::json;

json to_json(const ProbeConfig& c) {
    return json{{"kind", probe_kind_name(c.kind)}, {"step", c.step}, {"epochs", c.epochs}, {"l2", c.l2}, {"seed", c.seed}};
}

ProbeConfig probe_config_from_json(const json& j) {
    ProbeConfig c;
    c.kind = parse_probe_kind(j.at("kind").get<std::string>());
    c.step = j.at("step").get<double>();
    c.epochs = j.at("epochs").get<std::uint32_t>();
    c.l2 = j.at("l2").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json to_json(const ScoreTable& s) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) {
        rows.push_back({{"id", s.sample_ids[i]}, {"label", s.labels[i]}, {"score", s.scores[i]}});
    }
    return json{{"indicator", indicator_name(s.indicator)}, {"n_classes", s.n_classes}, {"scores", rows}};
}

json to_json(const ClassStats& stats) {
    json classes = json::array();
    for (std::size_t c = 0; c < stats.classes.size(); ++c) {
        const auto& k = stats.classes[c];
        json entry{{"class", c}, {"count", k.count}, {"mean", k.mean}, {"variance", k.variance}};
        if (stats.aci_populated) entry["aci"] = k.aci;
        classes.push_back(entry);
    }
    return json{{"classes", classes}, {"aci_populated", stats.aci_populated}, {"degenerate", stats.degenerate}};
}

json to_json(const SelectionPlan& p) {
    return json{{"selected_ids", p.selected_ids},
                {"per_class_budget", p.per_class_budget},
                {"direction", direction_name(p.direction)},
                {"indicator", p.indicator},
                {"scheme", budget_kind_name(p.scheme.kind)},
                {"total_budget", p.scheme.total_budget},
                {"exhausted", p.exhausted},
                {"class_capped", p.class_capped}};
}

SelectionPlan selection_plan_from_json(const json& j) {
    SelectionPlan p;
    p.selected_ids = j.at("selected_ids").get<std::vector<SampleId>>();
    p.per_class_budget = j.at("per_class_budget").get<std::vector<std::size_t>>();
    p.direction = parse_direction(j.at("direction").get<std::string>());
    p.indicator = j.at("indicator").get<std::string>();
    p.scheme.kind = parse_budget_kind(j.at("scheme").get<std::string>());
    p.scheme.total_budget = j.at("total_budget").get<std::size_t>();
    p.exhausted = j.at("exhausted").get<bool>();
    p.class_capped = j.value("class_capped", false);
    return p;
}

json to_json(const CurveRecord& c) {
    json rounds = json::array();
    for (const auto& p : c.rounds) {
        json r{{"round", p.round}, {"train_size", p.train_size}, {"accuracy", p.accuracy}};
        if (p.plan) r["plan"] = to_json(*p.plan);
        if (p.pool_stats) r["pool_stats"] = to_json(*p.pool_stats);
        rounds.push_back(r);
    }
    return json{{"mode", c.mode == LoopMode::addition ? "addition" : "reduction"},
                {"arm", c.arm},
                {"indicator", c.indicator},
                {"direction", direction_name(c.direction)},
                {"scheme", budget_kind_name(c.scheme)},
                {"round_budget", c.round_budget},
                {"probe", to_json(c.probe)},
                {"exhausted", c.exhausted},
                {"class_capped", c.class_capped},
                {"rounds", rounds}};
}

json to_json(const MigrationSplit& s) {
    return json{{"positive_ids", s.positive_ids},
                {"negative_ids", s.negative_ids},
                {"positive_fraction", s.positive_fraction},
                {"per_class", s.per_class}};
}

MigrationSplit migration_split_from_json(const json& j) {
    MigrationSplit s;
    s.positive_ids = j.at("positive_ids").get<std::vector<SampleId>>();
    s.negative_ids = j.at("negative_ids").get<std::vector<SampleId>>();
    s.positive_fraction = j.at("positive_fraction").get<double>();
    s.per_class = j.at("per_class").get<bool>();
    return s;
}

std::string curve_to_csv(const CurveRecord& curve, std::string_view comment) {
    std::string out;
    if (!comment.empty()) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    out += "round,size,accuracy\n";
    char buf[64];
    for (const auto& p : curve.rounds) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", p.round, p.train_size, p.accuracy);
        out += buf;
    }
    return out;
}

} // namespace ieikit
