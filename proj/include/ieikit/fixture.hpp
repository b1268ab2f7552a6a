#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ieikit/table.hpp"

namespace ieikit {

/// Synthetic Gaussian-mixture embeddings for experiments without real data.
struct MixtureSpec {
    std::size_t n_classes = 10;
    std::size_t dim = 16;
    double separation = 3.0;         // norm of every class mean
    double noise = 1.0;              // per-axis standard deviation
    double difficulty_spread = 0.0;  // class c's noise is scaled by exp(spread * u_c), u_c ~ U[-1, 1]
    double anisotropy = 0.0;         // per-axis log-scale jitter exp(anisotropy * z), z ~ N(0, 1), RMS-normalized
    double separation_spread = 0.0;  // class c's mean norm is scaled by exp(spread * v_c), v_c ~ U[-1, 1]
};

struct Mixture {
    MixtureSpec spec;
    std::vector<double> means;   // n_classes x dim
    std::vector<double> scales;  // n_classes x dim, per-axis standard deviations
};

Mixture make_mixture(const MixtureSpec& spec, std::uint64_t seed);

/// Random per-class displacement vectors of the given norm (n_classes x dim).
std::vector<double> domain_shift(const Mixture& mixture, double magnitude, std::uint64_t seed);

/// `per_class` rows of every class; ids are a seeded permutation of
/// [first_id, first_id + n). `shift` (n_classes x dim) displaces the means.
EmbeddingTable sample_mixture(const Mixture& mixture, std::size_t per_class, std::uint64_t seed,
                              DomainTag domain = DomainTag::train, SampleId first_id = 0,
                              std::span<const double> shift = {});

struct IidFixture {
    EmbeddingTable universe;  // to be split into base and pool
    EmbeddingTable eval;      // held-out, same distribution
};

IidFixture make_iid_fixture(const MixtureSpec& spec, std::size_t per_class, std::size_t eval_per_class,
                            std::uint64_t seed);

struct OodFixture {
    EmbeddingTable train;  // source domain
    EmbeddingTable test;   // same classes, means displaced per class
};

OodFixture make_ood_fixture(const MixtureSpec& spec, std::size_t train_per_class, std::size_t test_per_class,
                            double shift, std::uint64_t seed);

} // namespace ieikit
