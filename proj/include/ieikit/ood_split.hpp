#pragma once

#include <vector>

#include "ieikit/iei.hpp"
#include "ieikit/table.hpp"

namespace ieikit {

struct MigrationEntry {
    SampleId id = 0;
    ClassLabel label = 0;
    double distance = 0.0;  // to the own-class test-domain prototype

    bool operator==(const MigrationEntry&) const = default;
};

struct MigrationDistances {
    std::size_t n_classes = 0;
    std::vector<MigrationEntry> entries;  // one per training row, ascending id
};

struct MigrationSplit {
    std::vector<SampleId> positive_ids;  // ascending
    std::vector<SampleId> negative_ids;  // ascending
    double positive_fraction = 0.4;
    bool per_class = true;

    bool operator==(const MigrationSplit&) const = default;
};

/// Class means of the test domain. Every class must be present (AbsentClass).
ClassPrototypes test_domain_prototypes(const EmbeddingTable& test);

/// Euclidean distance of every training row to its own class's prototype.
MigrationDistances migration_distances(const EmbeddingTable& train, const ClassPrototypes& prototypes);

/// The floor(fraction * n) rows closest to the test domain (per class, or over
/// the whole table) are positive migration data; ties go to the lower id.
/// fraction must lie in (0, 1]; 1 marks everything positive.
MigrationSplit migration_split(const MigrationDistances& distances, double positive_fraction = 0.4,
                               bool per_class = true);

} // namespace ieikit
