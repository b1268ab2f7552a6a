#include "ieikit/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace ieikit {

namespace {

// Independent sub-streams of one user seed.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{seed, index};
    return std::mt19937_64(seq);
}

std::vector<double> random_directions(std::size_t rows, std::size_t dim, double norm, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            out[r * dim + d] = gauss(rng);
            sq += out[r * dim + d] * out[r * dim + d];
        }
        const double scale = sq > 0.0 ? norm / std::sqrt(sq) : 0.0;
        for (std::size_t d = 0; d < dim; ++d) out[r * dim + d] *= scale;
    }
    return out;
}

std::string describe(const MixtureSpec& s) {
    return "gaussian mixture: classes=" + std::to_string(s.n_classes) + " dim=" + std::to_string(s.dim) +
           " separation=" + std::to_string(s.separation) + " noise=" + std::to_string(s.noise) +
           " difficulty_spread=" + std::to_string(s.difficulty_spread) +
           " separation_spread=" + std::to_string(s.separation_spread) +
           " anisotropy=" + std::to_string(s.anisotropy);
}

} // namespace

Mixture make_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    if (spec.n_classes < 1 || spec.dim < 1) throw Error(ErrorCode::InvalidArgument, "mixture needs classes and dims");
    auto rng = stream(seed, 0);
    Mixture m;
    m.spec = spec;
    m.means = random_directions(spec.n_classes, spec.dim, spec.separation, rng);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    m.scales.resize(spec.n_classes * spec.dim);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        const double class_scale = spec.noise * std::exp(spec.difficulty_spread * unit(rng));
        double sq = 0.0;
        for (std::size_t d = 0; d < spec.dim; ++d) {
            const double s = std::exp(spec.anisotropy * gauss(rng));
            m.scales[c * spec.dim + d] = s;
            sq += s * s;
        }
        // Anisotropy reshapes the class but keeps its RMS axis scale at class_scale.
        const double norm = class_scale / std::sqrt(sq / static_cast<double>(spec.dim));
        for (std::size_t d = 0; d < spec.dim; ++d) m.scales[c * spec.dim + d] *= norm;
    }
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        const double factor = std::exp(spec.separation_spread * unit(rng));
        for (std::size_t d = 0; d < spec.dim; ++d) m.means[c * spec.dim + d] *= factor;
    }
    return m;
}

std::vector<double> domain_shift(const Mixture& mixture, double magnitude, std::uint64_t seed) {
    auto rng = stream(seed, 3);
    return random_directions(mixture.spec.n_classes, mixture.spec.dim, magnitude, rng);
}

EmbeddingTable sample_mixture(const Mixture& mixture, std::size_t per_class, std::uint64_t seed, DomainTag domain,
                              SampleId first_id, std::span<const double> shift) {
    const auto& spec = mixture.spec;
    if (!shift.empty() && shift.size() != spec.n_classes * spec.dim) {
        throw Error(ErrorCode::DimMismatch, "domain shift must be n_classes x dim");
    }
    auto rng = stream(seed, 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = per_class * spec.n_classes;
    std::vector<SampleId> ids(n);
    std::iota(ids.begin(), ids.end(), first_id);
    std::shuffle(ids.begin(), ids.end(), rng);

    std::vector<TableRow> rows;
    rows.reserve(n);
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        for (std::size_t k = 0; k < per_class; ++k) {
            TableRow row;
            row.id = ids[rows.size()];
            row.label = static_cast<ClassLabel>(c);
            row.features.resize(spec.dim);
            for (std::size_t d = 0; d < spec.dim; ++d) {
                double v = mixture.means[c * spec.dim + d] + mixture.scales[c * spec.dim + d] * gauss(rng);
                if (!shift.empty()) v += shift[c * spec.dim + d];
                row.features[d] = static_cast<float>(v);
            }
            rows.push_back(std::move(row));
        }
    }
    TableManifest manifest;
    manifest.provenance = describe(spec) + (shift.empty() ? "" : " (shifted domain)");
    return make_table(std::move(rows), spec.dim, spec.n_classes, false, domain, std::move(manifest));
}

IidFixture make_iid_fixture(const MixtureSpec& spec, std::size_t per_class, std::size_t eval_per_class,
                            std::uint64_t seed) {
    const Mixture m = make_mixture(spec, seed);
    IidFixture f;
    f.universe = sample_mixture(m, per_class, seed * 2 + 1, DomainTag::train);
    f.eval = sample_mixture(m, eval_per_class, seed * 2 + 2, DomainTag::test);
    return f;
}

OodFixture make_ood_fixture(const MixtureSpec& spec, std::size_t train_per_class, std::size_t test_per_class,
                            double shift, std::uint64_t seed) {
    const Mixture m = make_mixture(spec, seed);
    const auto displacement = domain_shift(m, shift, seed);
    OodFixture f;
    f.train = sample_mixture(m, train_per_class, seed * 2 + 1, DomainTag::train);
    f.test = sample_mixture(m, test_per_class, seed * 2 + 2, DomainTag::test, 0, displacement);
    return f;
}

} // namespace ieikit
