#include "ieikit/ood_split.hpp"

#include <algorithm>
#include <cmath>

namespace ieikit {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

bool closer(const MigrationEntry& a, const MigrationEntry& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
}

std::size_t positive_count(double fraction, std::size_t n) {
    // The slack keeps products like 0.29 * 100 from flooring to 28.
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

} // namespace

ClassPrototypes test_domain_prototypes(const EmbeddingTable& test) {
    if (test.empty()) fail(ErrorCode::AbsentClass, "test domain is empty");
    ClassPrototypes p = class_prototypes(test);
    for (std::size_t c = 0; c < p.n_classes; ++c) {
        if (!p.present(c)) fail(ErrorCode::AbsentClass, "class " + std::to_string(c) + " missing from test domain");
    }
    return p;
}

MigrationDistances migration_distances(const EmbeddingTable& train, const ClassPrototypes& prototypes) {
    if (train.dim != prototypes.dim) {
        fail(ErrorCode::DimMismatch, "train dim " + std::to_string(train.dim) + " vs prototype dim " +
                                         std::to_string(prototypes.dim));
    }
    MigrationDistances out;
    out.n_classes = train.n_classes;
    out.entries.reserve(train.size());
    // Same per-row computation as the metric indicator, against foreign prototypes.
    const ScoreTable d = metric_scores(train, prototypes);
    for (std::size_t i = 0; i < d.size(); ++i) out.entries.push_back({d.sample_ids[i], d.labels[i], d.scores[i]});
    return out;
}

MigrationSplit migration_split(const MigrationDistances& distances, double positive_fraction, bool per_class) {
    if (!(positive_fraction > 0.0 && positive_fraction <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "positive fraction must lie in (0, 1]");
    }
    if (distances.entries.empty()) fail(ErrorCode::EmptyDistances, "no migration distances to split");

    MigrationSplit split;
    split.positive_fraction = positive_fraction;
    split.per_class = per_class;

    std::vector<std::vector<MigrationEntry>> groups;
    if (per_class) {
        groups.resize(distances.n_classes);
        for (const auto& e : distances.entries) groups.at(e.label).push_back(e);
    } else {
        groups.push_back(distances.entries);
    }
    for (auto& g : groups) {
        std::sort(g.begin(), g.end(), closer);
        const std::size_t take = positive_count(positive_fraction, g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            (k < take ? split.positive_ids : split.negative_ids).push_back(g[k].id);
        }
    }
    std::sort(split.positive_ids.begin(), split.positive_ids.end());
    std::sort(split.negative_ids.begin(), split.negative_ids.end());
    return split;
}

} // namespace ieikit
