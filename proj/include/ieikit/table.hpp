#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ieikit/error.hpp"

namespace ieikit {

using SampleId = std::uint64_t;
using ClassLabel = std::uint32_t;

enum class DomainTag : std::uint32_t { train = 0, validation = 1, test = 2, pool = 3, base = 4 };

std::string_view domain_tag_name(DomainTag tag) noexcept;
DomainTag parse_domain_tag(std::string_view name);

inline constexpr std::string_view kFormatVersion = "EMB1/1";

struct TableManifest {
    std::string format_version{kFormatVersion};
    std::vector<std::string> class_names;
    std::string provenance;
    // Derived from the payload: filled by save_table/load_table, ignored by ==.
    std::string checksum;

    bool operator==(const TableManifest& other) const {
        return format_version == other.format_version && class_names == other.class_names &&
               provenance == other.provenance;
    }
};

/// Rows of (sample id, label, feature vector, optional logits), always kept
/// sorted by ascending sample id. Construct through make_table() so the
/// invariants are checked once; afterwards the table is treated as immutable.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::size_t n_classes = 0;
    DomainTag domain = DomainTag::train;
    std::vector<SampleId> sample_ids;
    std::vector<ClassLabel> labels;
    std::vector<float> features;               // n_samples x dim, row-major
    std::optional<std::vector<float>> logits;  // n_samples x n_classes, row-major
    TableManifest manifest;

    [[nodiscard]] std::size_t size() const noexcept { return sample_ids.size(); }
    [[nodiscard]] bool empty() const noexcept { return sample_ids.empty(); }
    [[nodiscard]] bool has_logits() const noexcept { return logits.has_value(); }

    [[nodiscard]] std::span<const float> feature_row(std::size_t i) const {
        return {features.data() + i * dim, dim};
    }
    [[nodiscard]] std::span<const float> logit_row(std::size_t i) const {
        return {logits->data() + i * n_classes, n_classes};
    }

    bool operator==(const EmbeddingTable&) const = default;
};

/// One row used to assemble tables in arbitrary order.
struct TableRow {
    SampleId id = 0;
    ClassLabel label = 0;
    std::vector<float> features;
    std::vector<float> logits;  // empty when the table carries no logits
};

/// Sorts rows by id, fills class names if missing and validates every invariant.
EmbeddingTable make_table(std::vector<TableRow> rows, std::size_t dim, std::size_t n_classes,
                          bool with_logits, DomainTag domain = DomainTag::train,
                          TableManifest manifest = {});

/// Throws InvariantViolation on the first broken invariant.
void validate(const EmbeddingTable& table);

EmbeddingTable empty_like(const EmbeddingTable& table);

/// Rows for the requested ids, ascending. Throws UnknownId.
EmbeddingTable subset(const EmbeddingTable& table, std::span<const SampleId> ids);

/// Union of two tables with disjoint ids. Throws DimMismatch / DuplicateId.
EmbeddingTable merge(const EmbeddingTable& a, const EmbeddingTable& b);

/// Same rows, with the logit matrix replaced (or added).
EmbeddingTable with_logits(const EmbeddingTable& table, std::vector<float> logits);

/// Row index of an id, if present.
std::optional<std::size_t> find_row(const EmbeddingTable& table, SampleId id);

// EMB1 binary format -------------------------------------------------------

inline constexpr std::size_t kHeaderSize = 64;

std::vector<std::uint8_t> encode_table(const EmbeddingTable& table);
EmbeddingTable decode_table(std::span<const std::uint8_t> bytes);

/// CRC-32 over the 64-byte header and the binary payload, as "crc32:xxxxxxxx".
std::string payload_checksum(const EmbeddingTable& table);

EmbeddingTable load_table(const std::filesystem::path& path);
void save_table(const EmbeddingTable& table, const std::filesystem::path& path);

// CSV convenience path: id,label,f1..fd[,l1..lc]. Lines starting with '#' and
// a header line starting with "id" are skipped.
struct CsvImportOptions {
    std::size_t n_classes = 0;  // 0: infer as max label + 1
    bool with_logits = false;   // trailing n_classes columns are logits
    DomainTag domain = DomainTag::train;
};

EmbeddingTable import_csv(const std::filesystem::path& path, const CsvImportOptions& options);
std::string export_csv(const EmbeddingTable& table);

// File helpers --------------------------------------------------------------

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

} // namespace ieikit
