#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ieikit/table.hpp"

namespace ieikit {

enum class Indicator { distance_entropy, probability_entropy, metric };

/// "distance_entropy", "probability_entropy", "metric".
std::string_view indicator_name(Indicator indicator) noexcept;
/// Accepts the canonical names plus the CLI spellings
/// "distance-entropy", "entropy" and "metric".
Indicator parse_indicator(std::string_view name);

/// Per-class mean feature vectors. Classes without support are kept as
/// zero rows and flagged absent; consumers reject them.
struct ClassPrototypes {
    std::size_t n_classes = 0;
    std::size_t dim = 0;
    std::vector<double> vectors;        // n_classes x dim, row-major
    std::vector<std::size_t> support;   // samples per class

    [[nodiscard]] bool present(std::size_t c) const { return support[c] > 0; }
    [[nodiscard]] bool complete() const;
    [[nodiscard]] std::span<const double> vector(std::size_t c) const { return {vectors.data() + c * dim, dim}; }

    bool operator==(const ClassPrototypes&) const = default;
};

struct ScoreTable {
    Indicator indicator = Indicator::distance_entropy;
    std::size_t n_classes = 0;
    std::vector<SampleId> sample_ids;
    std::vector<ClassLabel> labels;
    std::vector<double> scores;

    [[nodiscard]] std::size_t size() const noexcept { return sample_ids.size(); }
    [[nodiscard]] bool empty() const noexcept { return sample_ids.empty(); }

    bool operator==(const ScoreTable&) const = default;
};

struct ScoringOptions {
    /// L2-normalize each feature row (and build prototypes from normalized rows).
    bool l2_normalize = false;
};

/// Unweighted class means, accumulated in double in row order.
/// Throws EmptyTable.
ClassPrototypes class_prototypes(const EmbeddingTable& table, const ScoringOptions& options = {});

/// Euclidean distance from a feature to every class prototype.
/// Throws DimMismatch / AbsentClass.
std::vector<double> distance_vector(std::span<const float> feature, const ClassPrototypes& prototypes);
std::vector<double> distance_vector(std::span<const double> feature, const ClassPrototypes& prototypes);

/// softmax(-distances), max-shifted.
std::vector<double> prototype_probabilities(std::span<const double> distances);

/// softmax(logits), max-shifted.
std::vector<double> softmax(std::span<const double> logits);

/// Shannon entropy in bits with 0 log(1/0) := 0.
double shannon_entropy(std::span<const double> p);

ScoreTable distance_entropy_scores(const EmbeddingTable& table, const ClassPrototypes& prototypes,
                                   const ScoringOptions& options = {});

/// Entropy of softmax(logits) per row. Throws MissingLogits.
ScoreTable probability_entropy_scores(const EmbeddingTable& table);

/// Distance from each row to its own class prototype.
ScoreTable metric_scores(const EmbeddingTable& table, const ClassPrototypes& prototypes,
                         const ScoringOptions& options = {});

/// Dispatches on the indicator. Prototypes are only consulted by the
/// distance-based indicators.
ScoreTable score_table(Indicator indicator, const EmbeddingTable& table, const ClassPrototypes& prototypes,
                       const ScoringOptions& options = {});

// ScoreTable serialization: CSV "id,label,indicator,score". Lines starting
// with '#' are comments.
std::string scores_to_csv(const ScoreTable& scores, std::string_view comment = {});
ScoreTable scores_from_csv(std::string_view text, std::size_t n_classes = 0);

} // namespace ieikit
