#include "ieikit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ieikit {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

constexpr double kUnbalancedEpsilon = 1e-6;

// Largest-remainder apportionment of `budget` over classes with weight > 0,
// capped by `caps`. Capped classes are fixed at their cap and the rest is
// re-apportioned among the others until nothing exceeds its cap.
ClassBudgets apportion(std::vector<double> weights, std::span<const std::size_t> caps, std::size_t budget) {
    const std::size_t k = weights.size();
    ClassBudgets out;
    out.counts.assign(k, 0);
    std::vector<bool> active(k);
    for (std::size_t c = 0; c < k; ++c) active[c] = caps[c] > 0 && weights[c] > 0.0;

    std::size_t remaining = budget;
    while (remaining > 0) {
        double total_weight = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (active[c]) total_weight += weights[c];
        }
        if (total_weight <= 0.0) break;

        std::vector<std::size_t> tentative(k, 0);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < k; ++c) {
            if (!active[c]) continue;
            const double quota = static_cast<double>(remaining) * weights[c] / total_weight;
            const auto whole = static_cast<std::size_t>(std::floor(quota));
            tentative[c] = whole;
            assigned += whole;
            remainders.emplace_back(quota - static_cast<double>(whole), c);
        }
        // Larger remainder first; ties to the lower class index.
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < remaining && r < remainders.size(); ++r, ++assigned) {
            ++tentative[remainders[r].second];
        }

        bool over = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (active[c] && out.counts[c] + tentative[c] > caps[c]) {
                remaining -= caps[c] - out.counts[c];
                out.counts[c] = caps[c];
                active[c] = false;
                over = true;
            }
        }
        if (over) {
            out.capped = true;
            continue;
        }
        for (std::size_t c = 0; c < k; ++c) out.counts[c] += tentative[c];
        remaining = 0;
    }
    return out;
}

} // namespace

std::string_view budget_kind_name(BudgetKind kind) noexcept {
    return kind == BudgetKind::balanced ? "balanced" : "unbalanced";
}

BudgetKind parse_budget_kind(std::string_view name) {
    if (name == "balanced" || name == "balance") return BudgetKind::balanced;
    if (name == "unbalanced" || name == "unbalance") return BudgetKind::unbalanced;
    fail(ErrorCode::InvalidArgument, "unknown budget scheme '" + std::string(name) + "'");
}

std::string_view direction_name(Direction direction) noexcept {
    return direction == Direction::goodset ? "goodset" : "badset";
}

Direction parse_direction(std::string_view name) {
    if (name == "goodset" || name == "good") return Direction::goodset;
    if (name == "badset" || name == "bad") return Direction::badset;
    fail(ErrorCode::InvalidArgument, "unknown direction '" + std::string(name) + "'");
}

std::size_t ClassStats::total_count() const {
    std::size_t n = 0;
    for (const auto& c : classes) n += c.count;
    return n;
}

std::vector<std::size_t> ClassStats::counts() const {
    std::vector<std::size_t> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(c.count);
    return out;
}

std::size_t ClassBudgets::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

ClassStats class_distribution_stats(const ScoreTable& scores) {
    if (scores.empty()) fail(ErrorCode::EmptyScores, "no scores to summarize");
    ClassStats stats;
    stats.classes.resize(scores.n_classes);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& c = stats.classes.at(scores.labels[i]);
        ++c.count;
        c.mean += scores.scores[i];
    }
    for (auto& c : stats.classes) {
        if (c.count > 0) c.mean /= static_cast<double>(c.count);
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& c = stats.classes[scores.labels[i]];
        const double d = scores.scores[i] - c.mean;
        c.variance += d * d;
    }
    for (auto& c : stats.classes) {
        if (c.count > 0) c.variance /= static_cast<double>(c.count);
    }
    return stats;
}

ClassStats aci(ClassStats stats) {
    std::vector<std::size_t> present;
    for (std::size_t c = 0; c < stats.classes.size(); ++c) {
        if (stats.classes[c].count > 0) present.push_back(c);
    }
    if (present.empty()) fail(ErrorCode::EmptyScores, "ACI needs at least one class with scores");

    double centre = 0.0;
    for (auto c : present) centre += stats.classes[c].mean;
    centre /= static_cast<double>(present.size());
    double spread = 0.0;
    for (auto c : present) spread += (stats.classes[c].mean - centre) * (stats.classes[c].mean - centre);
    spread = std::sqrt(spread / static_cast<double>(present.size()));

    for (auto& c : stats.classes) c.aci = 0.0;
    stats.degenerate = !(spread > 0.0);
    if (!stats.degenerate) {
        for (auto c : present) stats.classes[c].aci = -(stats.classes[c].mean - centre) / spread;
    }
    stats.aci_populated = true;
    return stats;
}

ClassBudgets class_budgets(const ClassStats& stats, const BudgetScheme& scheme, std::span<const std::size_t> available) {
    if (available.size() != stats.classes.size()) {
        fail(ErrorCode::DimMismatch, "availability and class statistics disagree on the class count");
    }
    if (scheme.total_budget < 1) fail(ErrorCode::InvalidArgument, "total budget must be at least 1");
    const std::size_t pool = std::accumulate(available.begin(), available.end(), std::size_t{0});
    if (pool < scheme.total_budget) {
        fail(ErrorCode::InsufficientPool, "budget " + std::to_string(scheme.total_budget) + " exceeds pool of " +
                                              std::to_string(pool));
    }
    std::vector<double> weights(stats.classes.size(), 1.0);
    if (scheme.kind == BudgetKind::unbalanced) {
        for (std::size_t c = 0; c < weights.size(); ++c) {
            weights[c] = std::max(stats.classes[c].mean, 0.0) + kUnbalancedEpsilon;
        }
    }
    return apportion(std::move(weights), available, scheme.total_budget);
}

SelectionPlan select(const ScoreTable& scores, const BudgetScheme& scheme, Direction direction,
                     const ClassStats& stats, bool allow_exhaustion) {
    if (scores.empty()) fail(ErrorCode::EmptyScores, "cannot select from an empty pool");
    if (stats.classes.size() != scores.n_classes) {
        fail(ErrorCode::DimMismatch, "class statistics do not match the score table");
    }
    SelectionPlan plan;
    plan.direction = direction;
    plan.indicator = std::string(indicator_name(scores.indicator));
    plan.scheme = scheme;

    BudgetScheme effective = scheme;
    if (scores.size() < scheme.total_budget) {
        if (!allow_exhaustion) {
            fail(ErrorCode::InsufficientPool, "budget " + std::to_string(scheme.total_budget) +
                                                  " exceeds pool of " + std::to_string(scores.size()));
        }
        effective.total_budget = scores.size();
        plan.exhausted = true;
    }
    std::vector<std::size_t> available(scores.n_classes, 0);
    for (auto label : scores.labels) ++available[label];
    const ClassBudgets budgets = class_budgets(stats, effective, available);
    plan.per_class_budget = budgets.counts;
    plan.class_capped = budgets.capped;

    std::vector<std::vector<std::size_t>> rows(scores.n_classes);
    for (std::size_t i = 0; i < scores.size(); ++i) rows[scores.labels[i]].push_back(i);
    for (std::size_t c = 0; c < scores.n_classes; ++c) {
        auto& r = rows[c];
        const auto better = [&](std::size_t a, std::size_t b) {
            const double sa = scores.scores[a];
            const double sb = scores.scores[b];
            if (sa != sb) return direction == Direction::goodset ? sa > sb : sa < sb;
            return scores.sample_ids[a] < scores.sample_ids[b];
        };
        const std::size_t take = budgets.counts[c];
        std::partial_sort(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(take), r.end(), better);
        for (std::size_t k = 0; k < take; ++k) plan.selected_ids.push_back(scores.sample_ids[r[k]]);
    }
    return plan;
}

// Simulation loops -------------------------------------------------------------

ScoreProvider indicator_provider(Indicator indicator, ScoringOptions options) {
    return [indicator, options](const EmbeddingTable& train, const ProbeModel& current,
                                const EmbeddingTable& candidates) -> ScoreTable {
        if (indicator == Indicator::probability_entropy) {
            return probability_entropy_scores(attach_logits(current, candidates));
        }
        return score_table(indicator, candidates, class_prototypes(train, options), options);
    };
}

ScoreProvider random_provider(std::uint64_t seed) {
    return [seed](const EmbeddingTable& train, const ProbeModel&, const EmbeddingTable& candidates) {
        // Keyed on the loop state so every round draws fresh, reproducible scores.
        std::seed_seq seq{seed, static_cast<std::uint64_t>(train.size()), static_cast<std::uint64_t>(candidates.size())};
        std::mt19937_64 rng(seq);
        ScoreTable s;
        s.n_classes = candidates.n_classes;
        s.sample_ids = candidates.sample_ids;
        s.labels = candidates.labels;
        s.scores.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            s.scores.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
        }
        return s;
    };
}

std::vector<double> CurveRecord::accuracies() const {
    std::vector<double> out;
    for (const auto& p : rounds) out.push_back(p.accuracy);
    return out;
}

std::vector<std::size_t> CurveRecord::sizes() const {
    std::vector<std::size_t> out;
    for (const auto& p : rounds) out.push_back(p.train_size);
    return out;
}

std::vector<SampleId> complement_ids(const EmbeddingTable& table, std::span<const SampleId> ids) {
    std::vector<SampleId> drop(ids.begin(), ids.end());
    std::sort(drop.begin(), drop.end());
    std::vector<SampleId> keep;
    keep.reserve(table.size());
    std::set_difference(table.sample_ids.begin(), table.sample_ids.end(), drop.begin(), drop.end(),
                        std::back_inserter(keep));
    return keep;
}

namespace {

CurveRecord start_record(LoopMode mode, const LoopOptions& o) {
    CurveRecord rec;
    rec.mode = mode;
    rec.arm = o.arm;
    rec.indicator = o.score_label.empty() ? std::string(indicator_name(o.indicator)) : o.score_label;
    rec.direction = o.direction;
    rec.scheme = o.scheme;
    rec.round_budget = o.round_budget;
    rec.probe = o.probe;
    return rec;
}

SelectionPlan plan_round(const ScoreProvider& provider, const EmbeddingTable& train, const ProbeModel& model,
                         const EmbeddingTable& candidates, const LoopOptions& o, const std::string& label,
                         ClassStats& stats_out) {
    const ScoreTable scores = provider(train, model, candidates);
    stats_out = aci(class_distribution_stats(scores));
    const BudgetScheme scheme{o.scheme, std::min(o.round_budget, candidates.size())};
    SelectionPlan plan = select(scores, scheme, o.direction, stats_out, true);
    plan.indicator = label;
    plan.scheme.total_budget = o.round_budget;
    plan.exhausted = plan.exhausted || candidates.size() < o.round_budget;
    return plan;
}

} // namespace

CurveRecord addition_loop(const EmbeddingTable& base, const EmbeddingTable& pool, const EmbeddingTable& eval,
                          const LoopOptions& o) {
    if (base.dim != pool.dim || base.n_classes != pool.n_classes) {
        fail(ErrorCode::DimMismatch, "base and pool tables have different shapes");
    }
    if (o.rounds > 0 && o.round_budget < 1) fail(ErrorCode::InvalidArgument, "round budget must be at least 1");
    const ScoreProvider provider = o.provider ? o.provider : indicator_provider(o.indicator, o.scoring);
    CurveRecord rec = start_record(LoopMode::addition, o);

    EmbeddingTable train = base;
    EmbeddingTable remaining = pool;
    ProbeModel model = fit_probe(train, o.probe);
    rec.rounds.push_back({0, train.size(), evaluate(model, eval), std::nullopt, std::nullopt});

    for (std::size_t round = 1; round <= o.rounds; ++round) {
        if (remaining.empty()) {
            rec.exhausted = true;
            break;
        }
        ClassStats stats;
        SelectionPlan plan = plan_round(provider, train, model, remaining, o, rec.indicator, stats);
        rec.exhausted = rec.exhausted || plan.exhausted;
        rec.class_capped = rec.class_capped || plan.class_capped;

        train = merge(train, subset(remaining, plan.selected_ids));
        const auto keep = complement_ids(remaining, plan.selected_ids);
        remaining = subset(remaining, keep);
        model = fit_probe(train, o.probe);
        rec.rounds.push_back({round, train.size(), evaluate(model, eval), std::move(plan), std::move(stats)});
    }
    return rec;
}

CurveRecord reduction_loop(const EmbeddingTable& train_in, const EmbeddingTable& eval, const LoopOptions& o) {
    if (o.rounds > 0 && o.round_budget < 1) fail(ErrorCode::InvalidArgument, "round budget must be at least 1");
    if (o.round_budget * o.rounds >= train_in.size() && o.rounds > 0) {
        fail(ErrorCode::InsufficientPool, "reduction would remove " + std::to_string(o.round_budget * o.rounds) +
                                              " of " + std::to_string(train_in.size()) + " samples");
    }
    const ScoreProvider provider = o.provider ? o.provider : indicator_provider(o.indicator, o.scoring);
    CurveRecord rec = start_record(LoopMode::reduction, o);

    EmbeddingTable train = train_in;
    ProbeModel model = fit_probe(train, o.probe);
    rec.rounds.push_back({0, train.size(), evaluate(model, eval), std::nullopt, std::nullopt});

    for (std::size_t round = 1; round <= o.rounds; ++round) {
        ClassStats stats;
        SelectionPlan plan = plan_round(provider, train, model, train, o, rec.indicator, stats);
        rec.class_capped = rec.class_capped || plan.class_capped;
        train = subset(train, complement_ids(train, plan.selected_ids));
        model = fit_probe(train, o.probe);
        rec.rounds.push_back({round, train.size(), evaluate(model, eval), std::move(plan), std::move(stats)});
    }
    return rec;
}

std::pair<EmbeddingTable, EmbeddingTable> random_base_split(const EmbeddingTable& universe, double fraction,
                                                            std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorCode::InvalidArgument, "base fraction must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<SampleId>> by_class(universe.n_classes);
    for (std::size_t i = 0; i < universe.size(); ++i) by_class[universe.labels[i]].push_back(universe.sample_ids[i]);
    std::vector<SampleId> base_ids;
    for (auto& ids : by_class) {
        if (ids.empty()) continue;
        std::shuffle(ids.begin(), ids.end(), rng);
        const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ids.size()))));
        base_ids.insert(base_ids.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take));
    }
    EmbeddingTable base = subset(universe, base_ids);
    EmbeddingTable pool = subset(universe, complement_ids(universe, base_ids));
    base.domain = DomainTag::base;
    pool.domain = DomainTag::pool;
    return {std::move(base), std::move(pool)};
}

} // namespace ieikit
