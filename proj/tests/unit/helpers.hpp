#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ieikit/table.hpp"

namespace ieikit::test {

/// Random table with shuffled, gappy ids and Gaussian features.
inline EmbeddingTable random_table(std::size_t n, std::size_t dim, std::size_t n_classes, std::uint64_t seed,
                                   bool logits = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        TableRow r;
        r.id = 3 * i + 7;
        r.label = static_cast<ClassLabel>(n_classes > 0 ? (i < n_classes ? i : rng() % n_classes) : 0);
        for (std::size_t d = 0; d < dim; ++d) r.features.push_back(static_cast<float>(gauss(rng) + r.label));
        if (logits) {
            for (std::size_t c = 0; c < n_classes; ++c) r.logits.push_back(static_cast<float>(2.0 * gauss(rng)));
        }
        rows.push_back(std::move(r));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    return make_table(std::move(rows), dim, n_classes, logits);
}

inline EmbeddingTable table_from(std::vector<std::vector<float>> features, std::vector<ClassLabel> labels,
                                 std::size_t n_classes) {
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < features.size(); ++i) rows.push_back({i, labels[i], features[i], {}});
    const std::size_t dim = features.empty() ? 0 : features[0].size();
    return make_table(std::move(rows), dim, n_classes, false);
}

/// Per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ieikit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace ieikit::test
