#include "ieikit/iei.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ieikit {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

void require_complete(const ClassPrototypes& p) {
    for (std::size_t c = 0; c < p.n_classes; ++c) {
        if (!p.present(c)) fail(ErrorCode::AbsentClass, "class " + std::to_string(c) + " has no prototype");
    }
}

void require_dim(std::size_t dim, const ClassPrototypes& p) {
    if (dim != p.dim) {
        fail(ErrorCode::DimMismatch,
             "feature dim " + std::to_string(dim) + " vs prototype dim " + std::to_string(p.dim));
    }
}

std::vector<double> row_as_double(std::span<const float> row, bool normalize) {
    std::vector<double> v(row.begin(), row.end());
    if (normalize) {
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (sq > 0.0) {
            const double inv = 1.0 / std::sqrt(sq);
            for (double& x : v) x *= inv;
        }
    }
    return v;
}

ScoreTable empty_scores(Indicator indicator, const EmbeddingTable& table) {
    ScoreTable s;
    s.indicator = indicator;
    s.n_classes = table.n_classes;
    s.sample_ids = table.sample_ids;
    s.labels = table.labels;
    s.scores.reserve(table.size());
    return s;
}

template <class T>
double euclidean(std::span<const T> a, std::span<const double> b) {
    double sq = 0.0;
    for (std::size_t d = 0; d < b.size(); ++d) {
        const double diff = static_cast<double>(a[d]) - b[d];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

template <class T>
std::vector<double> distances_impl(std::span<const T> feature, const ClassPrototypes& p) {
    require_dim(feature.size(), p);
    require_complete(p);
    std::vector<double> out(p.n_classes);
    for (std::size_t c = 0; c < p.n_classes; ++c) out[c] = euclidean(feature, p.vector(c));
    return out;
}

} // namespace

std::string_view indicator_name(Indicator indicator) noexcept {
    switch (indicator) {
    case Indicator::distance_entropy: return "distance_entropy";
    case Indicator::probability_entropy: return "probability_entropy";
    case Indicator::metric: return "metric";
    }
    return "unknown";
}

Indicator parse_indicator(std::string_view name) {
    if (name == "distance_entropy" || name == "distance-entropy") return Indicator::distance_entropy;
    if (name == "probability_entropy" || name == "probability-entropy" || name == "entropy") {
        return Indicator::probability_entropy;
    }
    if (name == "metric") return Indicator::metric;
    fail(ErrorCode::InvalidArgument, "unknown indicator '" + std::string(name) + "'");
}

bool ClassPrototypes::complete() const {
    return std::all_of(support.begin(), support.end(), [](std::size_t n) { return n > 0; });
}

ClassPrototypes class_prototypes(const EmbeddingTable& table, const ScoringOptions& options) {
    if (table.empty()) fail(ErrorCode::EmptyTable, "cannot build prototypes from an empty table");
    ClassPrototypes p;
    p.n_classes = table.n_classes;
    p.dim = table.dim;
    p.vectors.assign(p.n_classes * p.dim, 0.0);
    p.support.assign(p.n_classes, 0);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::size_t c = table.labels[i];
        const auto row = row_as_double(table.feature_row(i), options.l2_normalize);
        double* acc = p.vectors.data() + c * p.dim;
        for (std::size_t d = 0; d < p.dim; ++d) acc[d] += row[d];
        ++p.support[c];
    }
    for (std::size_t c = 0; c < p.n_classes; ++c) {
        if (p.support[c] == 0) continue;
        const double n = static_cast<double>(p.support[c]);
        for (std::size_t d = 0; d < p.dim; ++d) p.vectors[c * p.dim + d] /= n;
    }
    return p;
}

std::vector<double> distance_vector(std::span<const float> feature, const ClassPrototypes& prototypes) {
    return distances_impl(feature, prototypes);
}

std::vector<double> distance_vector(std::span<const double> feature, const ClassPrototypes& prototypes) {
    return distances_impl(feature, prototypes);
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> p(logits.size());
    if (logits.empty()) return p;
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - top);
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

std::vector<double> prototype_probabilities(std::span<const double> distances) {
    std::vector<double> negated(distances.size());
    std::transform(distances.begin(), distances.end(), negated.begin(), [](double a) { return -a; });
    return softmax(negated);
}

double shannon_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    // Rounding can push a near-one-hot vector a hair below zero.
    return std::max(h, 0.0);
}

ScoreTable distance_entropy_scores(const EmbeddingTable& table, const ClassPrototypes& prototypes,
                                   const ScoringOptions& options) {
    require_dim(table.dim, prototypes);
    require_complete(prototypes);
    ScoreTable s = empty_scores(Indicator::distance_entropy, table);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto row = row_as_double(table.feature_row(i), options.l2_normalize);
        const auto dist = distance_vector(std::span<const double>(row), prototypes);
        s.scores.push_back(shannon_entropy(prototype_probabilities(dist)));
    }
    return s;
}

ScoreTable probability_entropy_scores(const EmbeddingTable& table) {
    if (!table.has_logits()) fail(ErrorCode::MissingLogits, "probability entropy requires logits");
    ScoreTable s = empty_scores(Indicator::probability_entropy, table);
    std::vector<double> row(table.n_classes);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto logits = table.logit_row(i);
        std::copy(logits.begin(), logits.end(), row.begin());
        s.scores.push_back(shannon_entropy(softmax(row)));
    }
    return s;
}

ScoreTable metric_scores(const EmbeddingTable& table, const ClassPrototypes& prototypes,
                         const ScoringOptions& options) {
    require_dim(table.dim, prototypes);
    ScoreTable s = empty_scores(Indicator::metric, table);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::size_t c = table.labels[i];
        if (c >= prototypes.n_classes || !prototypes.present(c)) {
            fail(ErrorCode::AbsentClass, "class " + std::to_string(c) + " has no prototype");
        }
        const auto row = row_as_double(table.feature_row(i), options.l2_normalize);
        s.scores.push_back(euclidean(std::span<const double>(row), prototypes.vector(c)));
    }
    return s;
}

ScoreTable score_table(Indicator indicator, const EmbeddingTable& table, const ClassPrototypes& prototypes,
                       const ScoringOptions& options) {
    switch (indicator) {
    case Indicator::distance_entropy: return distance_entropy_scores(table, prototypes, options);
    case Indicator::probability_entropy: return probability_entropy_scores(table);
    case Indicator::metric: return metric_scores(table, prototypes, options);
    }
    fail(ErrorCode::InvalidArgument, "unknown indicator");
}

std::string scores_to_csv(const ScoreTable& s, std::string_view comment) {
    std::string out;
    if (!comment.empty()) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    out += "id,label,indicator,score\n";
    const std::string name(indicator_name(s.indicator));
    char buf[40];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", s.scores[i]);
        out += std::to_string(s.sample_ids[i]) + ',' + std::to_string(s.labels[i]) + ',' + name + ',' + buf + '\n';
    }
    return out;
}

ScoreTable scores_from_csv(std::string_view text, std::size_t n_classes) {
    ScoreTable s;
    bool have_indicator = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::size_t max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
        std::istringstream ls(line);
        std::string id, label, indicator, score;
        if (!std::getline(ls, id, ',') || !std::getline(ls, label, ',') || !std::getline(ls, indicator, ',') ||
            !std::getline(ls, score)) {
            fail(ErrorCode::InvariantViolation, "score CSV line " + std::to_string(line_no) + " is malformed");
        }
        try {
            const Indicator ind = parse_indicator(indicator);
            if (have_indicator && ind != s.indicator) {
                fail(ErrorCode::InvariantViolation, "score CSV mixes indicators");
            }
            s.indicator = ind;
            have_indicator = true;
            s.sample_ids.push_back(std::stoull(id));
            s.labels.push_back(static_cast<ClassLabel>(std::stoul(label)));
            s.scores.push_back(std::stod(score));
        } catch (const std::logic_error&) {
            fail(ErrorCode::InvariantViolation, "score CSV line " + std::to_string(line_no) + " is malformed");
        }
        max_label = std::max<std::size_t>(max_label, s.labels.back());
        if (!std::isfinite(s.scores.back()) || s.scores.back() < 0.0) {
            fail(ErrorCode::InvariantViolation, "score CSV line " + std::to_string(line_no) + " has invalid score");
        }
    }
    s.n_classes = n_classes != 0 ? n_classes : (s.empty() ? 0 : max_label + 1);
    for (auto label : s.labels) {
        if (label >= s.n_classes) fail(ErrorCode::InvariantViolation, "score label outside class range");
    }
    return s;
}

} // namespace ieikit
