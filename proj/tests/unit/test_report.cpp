#include <doctest.h>

#include "helpers.hpp"
#include "ieikit/report.hpp"

using namespace ieikit;

TEST_CASE("selection plan JSON round-trip") {
    SelectionPlan p;
    p.selected_ids = {5, 1, 9};
    p.per_class_budget = {2, 1};
    p.direction = Direction::badset;
    p.indicator = "metric";
    p.scheme = {BudgetKind::unbalanced, 3};
    p.class_capped = true;
    CHECK(selection_plan_from_json(nlohmann::json::parse(to_json(p).dump())) == p);
}

TEST_CASE("migration split JSON round-trip") {
    MigrationSplit s{{1, 4}, {2, 3, 8}, 0.4, true};
    CHECK(migration_split_from_json(nlohmann::json::parse(to_json(s).dump())) == s);
}

TEST_CASE("probe config JSON round-trip") {
    ProbeConfig c{ProbeKind::nearest_prototype, 0.05, 17, 1e-3, 7};
    CHECK(probe_config_from_json(to_json(c)) == c);
}

TEST_CASE("curve CSV") {
    CurveRecord c;
    c.rounds = {{0, 10, 0.5, {}, {}}, {1, 20, 0.75, {}, {}}};
    CHECK(curve_to_csv(c) == "round,size,accuracy\n0,10,0.5\n1,20,0.75\n");
    CHECK(curve_to_csv(c, "x").rfind("# x\n", 0) == 0);
    const auto j = to_json(c);
    CHECK(j["rounds"].size() == 2);
}
