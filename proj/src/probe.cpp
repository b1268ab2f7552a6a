#include "ieikit/probe.hpp"

#include <Eigen/Dense>
#include <zlib.h>

#include <cmath>
#include <cstring>
#include <sstream>

namespace ieikit {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

RowMatrix design_matrix(const EmbeddingTable& t) {
    RowMatrix x(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.dim));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = t.feature_row(i);
        for (std::size_t d = 0; d < t.dim; ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = row[d];
    }
    return x;
}

RowMatrix one_hot(const EmbeddingTable& t) {
    RowMatrix y = RowMatrix::Zero(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.n_classes));
    for (std::size_t i = 0; i < t.size(); ++i) y(static_cast<Eigen::Index>(i), t.labels[i]) = 1.0;
    return y;
}

// Objective and gradient for W (C x D) and b (C).
struct LinearObjective {
    const RowMatrix& x;
    const RowMatrix& y;
    double l2;

    double evaluate(const RowMatrix& w, const Eigen::VectorXd& b, RowMatrix* grad_w, Eigen::VectorXd* grad_b) const {
        const auto n = static_cast<double>(x.rows());
        RowMatrix z = x * w.transpose();
        z.rowwise() += b.transpose();
        double loss = 0.0;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double top = z.row(i).maxCoeff();
            double total = 0.0;
            for (Eigen::Index c = 0; c < z.cols(); ++c) {
                z(i, c) = std::exp(z(i, c) - top);
                total += z(i, c);
            }
            z.row(i) /= total;
            for (Eigen::Index c = 0; c < z.cols(); ++c) {
                if (y(i, c) > 0.0) loss -= std::log(std::max(z(i, c), 1e-300));
            }
        }
        loss = loss / n + 0.5 * l2 * w.squaredNorm();
        if (grad_w != nullptr) {
            const RowMatrix residual = z - y;
            *grad_w = residual.transpose() * x / n + l2 * w;
            *grad_b = residual.colwise().sum().transpose() / n;
        }
        return loss;
    }
};

void require_shape(const ProbeModel& m, const EmbeddingTable& t) {
    if (t.dim != m.dim || t.n_classes != m.n_classes) {
        fail(ErrorCode::DimMismatch, "table shape (dim " + std::to_string(t.dim) + ", " +
                                         std::to_string(t.n_classes) + " classes) does not match probe (dim " +
                                         std::to_string(m.dim) + ", " + std::to_string(m.n_classes) + " classes)");
    }
}

} // namespace

std::string_view probe_kind_name(ProbeKind kind) noexcept {
    return kind == ProbeKind::linear ? "linear" : "nearest_prototype";
}

ProbeKind parse_probe_kind(std::string_view name) {
    if (name == "linear") return ProbeKind::linear;
    if (name == "nearest_prototype" || name == "nearest-prototype" || name == "prototype") {
        return ProbeKind::nearest_prototype;
    }
    fail(ErrorCode::InvalidArgument, "unknown probe kind '" + std::string(name) + "'");
}

ProbeModel fit_nearest_prototype(const EmbeddingTable& train, const ProbeConfig& config) {
    ProbeModel m;
    m.config = config;
    m.config.kind = ProbeKind::nearest_prototype;
    m.n_classes = train.n_classes;
    m.dim = train.dim;
    m.prototypes = class_prototypes(train);
    if (!m.prototypes.complete()) {
        for (std::size_t c = 0; c < m.n_classes; ++c) {
            if (!m.prototypes.present(c)) {
                fail(ErrorCode::AbsentClass, "class " + std::to_string(c) + " has no training samples");
            }
        }
    }
    m.train_accuracy = evaluate(m, train);
    return m;
}

LossAndGradient linear_loss_and_gradient(const EmbeddingTable& train, std::span<const double> params, double l2) {
    const auto c = static_cast<Eigen::Index>(train.n_classes);
    const auto d = static_cast<Eigen::Index>(train.dim);
    if (params.size() != static_cast<std::size_t>(c * d + c)) {
        fail(ErrorCode::DimMismatch, "parameter vector has the wrong length");
    }
    const RowMatrix x = design_matrix(train);
    const RowMatrix y = one_hot(train);
    RowMatrix w = Eigen::Map<const RowMatrix>(params.data(), c, d);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(params.data() + c * d, c);
    RowMatrix gw;
    Eigen::VectorXd gb;
    LossAndGradient out;
    out.loss = LinearObjective{x, y, l2}.evaluate(w, b, &gw, &gb);
    out.gradient.assign(gw.data(), gw.data() + gw.size());
    out.gradient.insert(out.gradient.end(), gb.data(), gb.data() + gb.size());
    return out;
}

ProbeModel fit_linear_probe(const EmbeddingTable& train, const ProbeConfig& config) {
    if (train.n_classes < 2) fail(ErrorCode::InvalidArgument, "linear probe needs at least 2 classes");
    if (config.epochs < 1) fail(ErrorCode::InvalidArgument, "linear probe needs at least 1 epoch");
    if (train.empty()) fail(ErrorCode::EmptyTable, "cannot fit a probe on an empty table");

    const RowMatrix x = design_matrix(train);
    const RowMatrix y = one_hot(train);
    const LinearObjective objective{x, y, config.l2};
    const auto c = static_cast<Eigen::Index>(train.n_classes);
    const auto d = static_cast<Eigen::Index>(train.dim);
    RowMatrix w = RowMatrix::Zero(c, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
    RowMatrix gw;
    Eigen::VectorXd gb;

    ProbeModel m;
    m.config = config;
    m.config.kind = ProbeKind::linear;
    m.n_classes = train.n_classes;
    m.dim = train.dim;
    m.loss_history.reserve(config.epochs + 1);

    auto check = [&](double loss, std::uint32_t epoch) {
        if (!std::isfinite(loss)) {
            std::ostringstream msg;
            msg << "linear probe diverged at epoch " << epoch << " (step " << config.step << ", epochs "
                << config.epochs << ", l2 " << config.l2 << ", seed " << config.seed << ")";
            fail(ErrorCode::DivergenceDetected, msg.str());
        }
        m.loss_history.push_back(loss);
    };
    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        check(objective.evaluate(w, b, &gw, &gb), epoch);
        w -= config.step * gw;
        b -= config.step * gb;
    }
    check(objective.evaluate(w, b, nullptr, nullptr), config.epochs);

    m.weights.assign(w.data(), w.data() + w.size());
    m.bias.assign(b.data(), b.data() + b.size());
    m.train_accuracy = evaluate(m, train);
    return m;
}

ProbeModel fit_probe(const EmbeddingTable& train, const ProbeConfig& config) {
    return config.kind == ProbeKind::linear ? fit_linear_probe(train, config) : fit_nearest_prototype(train, config);
}

std::vector<double> predict_logits(const ProbeModel& m, const EmbeddingTable& t) {
    require_shape(m, t);
    std::vector<double> out(t.size() * m.n_classes);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = t.feature_row(i);
        double* z = out.data() + i * m.n_classes;
        if (m.config.kind == ProbeKind::nearest_prototype) {
            const auto dist = distance_vector(row, m.prototypes);
            for (std::size_t c = 0; c < m.n_classes; ++c) z[c] = -dist[c];
        } else {
            for (std::size_t c = 0; c < m.n_classes; ++c) {
                double acc = m.bias[c];
                const double* w = m.weights.data() + c * m.dim;
                for (std::size_t d = 0; d < m.dim; ++d) acc += w[d] * static_cast<double>(row[d]);
                z[c] = acc;
            }
        }
    }
    return out;
}

std::vector<ClassLabel> predict_labels(const ProbeModel& m, const EmbeddingTable& t) {
    const auto logits = predict_logits(m, t);
    std::vector<ClassLabel> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double* z = logits.data() + i * m.n_classes;
        std::size_t best = 0;
        for (std::size_t c = 1; c < m.n_classes; ++c) {
            if (z[c] > z[best]) best = c;
        }
        out[i] = static_cast<ClassLabel>(best);
    }
    return out;
}

double evaluate(const ProbeModel& m, const EmbeddingTable& t) {
    if (t.empty()) fail(ErrorCode::EmptyTable, "cannot evaluate on an empty table");
    const auto predicted = predict_labels(m, t);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < t.size(); ++i) correct += predicted[i] == t.labels[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(t.size());
}

EmbeddingTable attach_logits(const ProbeModel& m, const EmbeddingTable& t) {
    const auto logits = predict_logits(m, t);
    return with_logits(t, std::vector<float>(logits.begin(), logits.end()));
}

// PRB1 ---------------------------------------------------------------------
//
// 64-byte header: magic "PRB1", u32 version, u32 kind, u32 n_classes,
// u32 dim, u32 epochs, u64 seed, f64 step, f64 l2, f64 train_accuracy,
// u32 n_loss, 4 zero bytes. Payload (f64): prototypes + support (as f64)
// or weights + bias, then the loss history, then a u32 CRC-32 of everything
// before it.

namespace {

constexpr char kProbeMagic[4] = {'P', 'R', 'B', '1'};
constexpr std::uint32_t kProbeVersion = 1;

template <class T>
void write_at(std::vector<std::uint8_t>& out, std::size_t offset, T v) {
    std::memcpy(out.data() + offset, &v, sizeof v);
}

template <class T>
T read_at(std::span<const std::uint8_t> in, std::size_t offset) {
    T v;
    std::memcpy(&v, in.data() + offset, sizeof v);
    return v;
}

void append_doubles(std::vector<std::uint8_t>& out, std::span<const double> values) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
    out.insert(out.end(), p, p + values.size() * sizeof(double));
}

std::vector<double> read_doubles(std::span<const std::uint8_t> in, std::size_t& offset, std::size_t count) {
    if (offset + count * sizeof(double) > in.size()) fail(ErrorCode::MalformedHeader, "PRB1 payload truncated");
    std::vector<double> v(count);
    if (count > 0) std::memcpy(v.data(), in.data() + offset, count * sizeof(double));
    offset += count * sizeof(double);
    return v;
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
    return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

} // namespace

std::vector<std::uint8_t> encode_probe(const ProbeModel& m) {
    std::vector<std::uint8_t> out(kHeaderSize, 0);
    std::memcpy(out.data(), kProbeMagic, 4);
    write_at<std::uint32_t>(out, 4, kProbeVersion);
    write_at<std::uint32_t>(out, 8, static_cast<std::uint32_t>(m.config.kind));
    write_at<std::uint32_t>(out, 12, static_cast<std::uint32_t>(m.n_classes));
    write_at<std::uint32_t>(out, 16, static_cast<std::uint32_t>(m.dim));
    write_at<std::uint32_t>(out, 20, m.config.epochs);
    write_at<std::uint64_t>(out, 24, m.config.seed);
    write_at<double>(out, 32, m.config.step);
    write_at<double>(out, 40, m.config.l2);
    write_at<double>(out, 48, m.train_accuracy);
    write_at<std::uint32_t>(out, 56, static_cast<std::uint32_t>(m.loss_history.size()));
    if (m.config.kind == ProbeKind::nearest_prototype) {
        append_doubles(out, m.prototypes.vectors);
        std::vector<double> support(m.prototypes.support.begin(), m.prototypes.support.end());
        append_doubles(out, support);
    } else {
        append_doubles(out, m.weights);
        append_doubles(out, m.bias);
    }
    append_doubles(out, m.loss_history);
    const std::uint32_t crc = crc_of(out);
    out.resize(out.size() + 4);
    write_at(out, out.size() - 4, crc);
    return out;
}

ProbeModel decode_probe(std::span<const std::uint8_t> in) {
    if (in.size() < kHeaderSize + 4 || std::memcmp(in.data(), kProbeMagic, 4) != 0) {
        fail(ErrorCode::MalformedHeader, "missing PRB1 magic bytes");
    }
    if (read_at<std::uint32_t>(in, 4) != kProbeVersion) fail(ErrorCode::MalformedHeader, "unsupported PRB1 version");
    if (read_at<std::uint32_t>(in, in.size() - 4) != crc_of(in.first(in.size() - 4))) {
        fail(ErrorCode::ChecksumMismatch, "PRB1 checksum mismatch");
    }
    const auto kind = read_at<std::uint32_t>(in, 8);
    if (kind > 1) fail(ErrorCode::MalformedHeader, "unknown probe kind in PRB1 header");
    ProbeModel m;
    m.config.kind = static_cast<ProbeKind>(kind);
    m.n_classes = read_at<std::uint32_t>(in, 12);
    m.dim = read_at<std::uint32_t>(in, 16);
    m.config.epochs = read_at<std::uint32_t>(in, 20);
    m.config.seed = read_at<std::uint64_t>(in, 24);
    m.config.step = read_at<double>(in, 32);
    m.config.l2 = read_at<double>(in, 40);
    m.train_accuracy = read_at<double>(in, 48);
    const auto n_loss = read_at<std::uint32_t>(in, 56);

    const std::size_t body = in.size() - 4;
    auto span = in.first(body);
    std::size_t offset = kHeaderSize;
    if (m.config.kind == ProbeKind::nearest_prototype) {
        m.prototypes.n_classes = m.n_classes;
        m.prototypes.dim = m.dim;
        m.prototypes.vectors = read_doubles(span, offset, m.n_classes * m.dim);
        const auto support = read_doubles(span, offset, m.n_classes);
        m.prototypes.support.assign(support.begin(), support.end());
    } else {
        m.weights = read_doubles(span, offset, m.n_classes * m.dim);
        m.bias = read_doubles(span, offset, m.n_classes);
    }
    m.loss_history = read_doubles(span, offset, n_loss);
    if (offset != body) fail(ErrorCode::MalformedHeader, "PRB1 payload length mismatch");
    for (double v : m.weights) {
        if (!std::isfinite(v)) fail(ErrorCode::InvariantViolation, "non-finite probe parameter");
    }
    return m;
}

void save_probe(const ProbeModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, encode_probe(model));
}

ProbeModel load_probe(const std::filesystem::path& path) { return decode_probe(read_file(path)); }

} // namespace ieikit
