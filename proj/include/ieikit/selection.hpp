#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ieikit/iei.hpp"
#include "ieikit/probe.hpp"
#include "ieikit/table.hpp"

namespace ieikit {

enum class BudgetKind { balanced, unbalanced };
enum class Direction { goodset, badset };

std::string_view budget_kind_name(BudgetKind kind) noexcept;
BudgetKind parse_budget_kind(std::string_view name);
std::string_view direction_name(Direction direction) noexcept;
Direction parse_direction(std::string_view name);

struct BudgetScheme {
    BudgetKind kind = BudgetKind::balanced;
    std::size_t total_budget = 1;

    bool operator==(const BudgetScheme&) const = default;
};

struct ClassStat {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // population variance
    double aci = 0.0;

    bool operator==(const ClassStat&) const = default;
};

struct ClassStats {
    std::vector<ClassStat> classes;  // indexed by class label
    bool aci_populated = false;
    bool degenerate = false;  // all present class means identical; ACI set to 0

    [[nodiscard]] std::size_t total_count() const;
    [[nodiscard]] std::vector<std::size_t> counts() const;

    bool operator==(const ClassStats&) const = default;
};

/// Per-class mean and population variance of the scores (two-pass).
/// Throws EmptyScores.
ClassStats class_distribution_stats(const ScoreTable& scores);

/// Amount of class information: the negated z-score of each present class's
/// mean score across present classes. Classes with low mean sample score get
/// high ACI. Identical means leave ACI at 0 and set `degenerate`.
ClassStats aci(ClassStats stats);

struct ClassBudgets {
    std::vector<std::size_t> counts;
    bool capped = false;  // some class hit its availability cap and its share moved elsewhere

    [[nodiscard]] std::size_t total() const;
};

/// Splits the budget over classes. Balanced: equal shares. Unbalanced: shares
/// proportional to max(mean score, 0) + 1e-6. Both use largest-remainder
/// rounding (remainder ties to the lower class index); a class capped by its
/// availability hands its excess back to the others by the same rule.
/// Throws InsufficientPool when the classes cannot cover the budget.
ClassBudgets class_budgets(const ClassStats& stats, const BudgetScheme& scheme, std::span<const std::size_t> available);

struct SelectionPlan {
    std::vector<SampleId> selected_ids;  // grouped by class, best rank first
    std::vector<std::size_t> per_class_budget;
    Direction direction = Direction::goodset;
    std::string indicator;  // indicator name, or "random" for the baseline arm
    BudgetScheme scheme;
    bool exhausted = false;  // the pool could not cover the requested budget
    bool class_capped = false;

    bool operator==(const SelectionPlan&) const = default;
};

/// Within each class takes the budget_c highest (goodset) or lowest (badset)
/// scores, ties to the lower sample id. Throws InsufficientPool when the pool
/// is smaller than the budget, unless `allow_exhaustion` is set, in which case
/// the whole pool is taken and `exhausted` is flagged.
SelectionPlan select(const ScoreTable& scores, const BudgetScheme& scheme, Direction direction,
                     const ClassStats& stats, bool allow_exhaustion = false);

// Simulation loops -------------------------------------------------------------

/// Scores `candidates` given the current training set and the probe fitted on it.
using ScoreProvider =
    std::function<ScoreTable(const EmbeddingTable& train, const ProbeModel& current, const EmbeddingTable& candidates)>;

/// Prototypes come from `train`; probability entropy uses the current probe's logits.
ScoreProvider indicator_provider(Indicator indicator, ScoringOptions options = {});

/// Uniform random scores; selecting on them draws a random subset per class.
ScoreProvider random_provider(std::uint64_t seed);

struct LoopOptions {
    Indicator indicator = Indicator::distance_entropy;
    BudgetKind scheme = BudgetKind::balanced;
    /// Addition: the set moved from pool to train. Reduction: the set removed.
    Direction direction = Direction::goodset;
    std::size_t round_budget = 0;
    std::size_t rounds = 0;
    ProbeConfig probe;
    ScoringOptions scoring;
    /// Overrides the indicator scorer (random baseline, external rescoring).
    ScoreProvider provider;
    std::string arm;  // free-form label, e.g. "HID"
    /// Recorded in plans instead of the indicator name when set, e.g. "random".
    std::string score_label;
};

struct CurvePoint {
    std::size_t round = 0;
    std::size_t train_size = 0;
    double accuracy = 0.0;
    std::optional<SelectionPlan> plan;     // absent for round 0
    std::optional<ClassStats> pool_stats;  // score distribution the plan was drawn from

    bool operator==(const CurvePoint&) const = default;
};

enum class LoopMode { addition, reduction };

struct CurveRecord {
    LoopMode mode = LoopMode::addition;
    std::string arm;
    std::string indicator;
    Direction direction = Direction::goodset;
    BudgetKind scheme = BudgetKind::balanced;
    std::size_t round_budget = 0;
    ProbeConfig probe;
    std::vector<CurvePoint> rounds;
    bool exhausted = false;     // ran out of pool before the requested rounds
    bool class_capped = false;  // some round redistributed a capped class budget

    [[nodiscard]] std::vector<double> accuracies() const;
    [[nodiscard]] std::vector<std::size_t> sizes() const;

    bool operator==(const CurveRecord&) const = default;
};

/// Grows `base` round by round with selections from `pool`, refitting the probe
/// and recording its accuracy on `eval` after every round.
CurveRecord addition_loop(const EmbeddingTable& base, const EmbeddingTable& pool, const EmbeddingTable& eval,
                          const LoopOptions& options);

/// Shrinks `train` round by round by removing selections, refitting and
/// recording accuracy on `eval`. Requires round_budget * rounds < |train|.
CurveRecord reduction_loop(const EmbeddingTable& train, const EmbeddingTable& eval, const LoopOptions& options);

/// Stratified random split into (base, pool): floor(fraction * n_c) rows of
/// every class, at least one, go to the base.
std::pair<EmbeddingTable, EmbeddingTable> random_base_split(const EmbeddingTable& universe, double fraction,
                                                            std::uint64_t seed);

/// Ids of `table` not in `ids` (ascending).
std::vector<SampleId> complement_ids(const EmbeddingTable& table, std::span<const SampleId> ids);

} // namespace ieikit
