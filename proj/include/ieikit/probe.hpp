#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ieikit/iei.hpp"
#include "ieikit/table.hpp"

namespace ieikit {

enum class ProbeKind : std::uint32_t { nearest_prototype = 0, linear = 1 };

std::string_view probe_kind_name(ProbeKind kind) noexcept;
ProbeKind parse_probe_kind(std::string_view name);

struct ProbeConfig {
    ProbeKind kind = ProbeKind::linear;
    double step = 0.1;
    std::uint32_t epochs = 200;
    double l2 = 1e-4;
    std::uint64_t seed = 42;

    bool operator==(const ProbeConfig&) const = default;
};

struct ProbeModel {
    ProbeConfig config;
    std::size_t n_classes = 0;
    std::size_t dim = 0;
    ClassPrototypes prototypes;       // nearest_prototype
    std::vector<double> weights;      // linear: n_classes x dim, row-major
    std::vector<double> bias;         // linear: n_classes
    std::vector<double> loss_history; // linear: loss before training, then after each epoch
    double train_accuracy = 0.0;

    bool operator==(const ProbeModel&) const = default;
};

/// Stores class prototypes; predicts the nearest one. Throws AbsentClass.
ProbeModel fit_nearest_prototype(const EmbeddingTable& train, const ProbeConfig& config = {ProbeKind::nearest_prototype});

/// Multinomial logistic regression by full-batch gradient descent from zero
/// weights. Objective: mean cross-entropy + l2/2 * ||W||^2 (bias unpenalized).
/// Throws DivergenceDetected when the loss turns non-finite.
ProbeModel fit_linear_probe(const EmbeddingTable& train, const ProbeConfig& config = {});

/// Dispatches on config.kind.
ProbeModel fit_probe(const EmbeddingTable& train, const ProbeConfig& config);

/// n_samples x n_classes, row-major. Nearest-prototype logits are negated distances.
std::vector<double> predict_logits(const ProbeModel& model, const EmbeddingTable& table);

/// argmax per row, ties to the lowest class index.
std::vector<ClassLabel> predict_labels(const ProbeModel& model, const EmbeddingTable& table);

/// Fraction of rows whose argmax logit equals the label. Throws EmptyTable.
double evaluate(const ProbeModel& model, const EmbeddingTable& table);

/// Table with the model's logits attached as float32.
EmbeddingTable attach_logits(const ProbeModel& model, const EmbeddingTable& table);

/// Objective value and gradient of the linear probe at the given parameters.
/// Parameters are packed as [W row-major, b].
struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};
LossAndGradient linear_loss_and_gradient(const EmbeddingTable& train, std::span<const double> params, double l2);

// PRB1 checkpoint blob ------------------------------------------------------

std::vector<std::uint8_t> encode_probe(const ProbeModel& model);
ProbeModel decode_probe(std::span<const std::uint8_t> bytes);
void save_probe(const ProbeModel& model, const std::filesystem::path& path);
ProbeModel load_probe(const std::filesystem::path& path);

} // namespace ieikit
