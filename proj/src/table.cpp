#include "ieikit/table.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace ieikit {

static_assert(std::endian::native == std::endian::little, "EMB1 I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagLogits = 1u;

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

template <class T>
void put(std::vector<std::uint8_t>& out, std::size_t offset, T value) {
    std::memcpy(out.data() + offset, &value, sizeof(T));
}

template <class T>
T get(std::span<const std::uint8_t> in, std::size_t offset) {
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    return value;
}

template <class T>
void append(std::vector<std::uint8_t>& out, const std::vector<T>& values) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
    out.insert(out.end(), p, p + values.size() * sizeof(T));
}

template <class T>
std::vector<T> take(std::span<const std::uint8_t> in, std::size_t& offset, std::size_t count) {
    std::vector<T> values(count);
    if (count > 0) std::memcpy(values.data(), in.data() + offset, count * sizeof(T));
    offset += count * sizeof(T);
    return values;
}

std::array<std::uint8_t, kHeaderSize> encode_header(const EmbeddingTable& t) {
    std::vector<std::uint8_t> h(kHeaderSize, 0);
    std::memcpy(h.data(), kMagic, 4);
    put<std::uint32_t>(h, 4, kVersion);
    put<std::uint64_t>(h, 8, t.size());
    put<std::uint32_t>(h, 16, static_cast<std::uint32_t>(t.dim));
    put<std::uint32_t>(h, 20, static_cast<std::uint32_t>(t.n_classes));
    put<std::uint32_t>(h, 24, t.has_logits() ? kFlagLogits : 0u);
    put<std::uint32_t>(h, 28, static_cast<std::uint32_t>(t.domain));
    std::array<std::uint8_t, kHeaderSize> out{};
    std::copy(h.begin(), h.end(), out.begin());
    return out;
}

std::string format_crc(std::uint32_t crc) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "crc32:%08x", crc);
    return buf;
}

std::uint32_t crc_update(std::uint32_t crc, const void* data, std::size_t size) {
    const auto* p = static_cast<const Bytef*>(data);
    // zlib takes uInt lengths; feed large buffers in chunks.
    while (size > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
        crc = static_cast<std::uint32_t>(::crc32(crc, p, chunk));
        p += chunk;
        size -= chunk;
    }
    return crc;
}

nlohmann::json manifest_json(const TableManifest& m, const std::string& checksum) {
    return nlohmann::json{{"format_version", m.format_version},
                          {"class_names", m.class_names},
                          {"provenance", m.provenance},
                          {"checksum", checksum}};
}

} // namespace

std::string_view domain_tag_name(DomainTag tag) noexcept {
    switch (tag) {
    case DomainTag::train: return "train";
    case DomainTag::validation: return "validation";
    case DomainTag::test: return "test";
    case DomainTag::pool: return "pool";
    case DomainTag::base: return "base";
    }
    return "unknown";
}

DomainTag parse_domain_tag(std::string_view name) {
    for (auto tag : {DomainTag::train, DomainTag::validation, DomainTag::test, DomainTag::pool,
                     DomainTag::base}) {
        if (domain_tag_name(tag) == name) return tag;
    }
    fail(ErrorCode::InvalidArgument, "unknown domain tag '" + std::string(name) + "'");
}

void validate(const EmbeddingTable& t) {
    const std::size_t n = t.sample_ids.size();
    if (t.labels.size() != n || t.features.size() != n * t.dim) {
        fail(ErrorCode::InvariantViolation, "row count mismatch between ids, labels and features");
    }
    if (t.logits && t.logits->size() != n * t.n_classes) {
        fail(ErrorCode::InvariantViolation, "logit matrix shape does not match n_samples x n_classes");
    }
    if (!t.manifest.class_names.empty() && t.manifest.class_names.size() != t.n_classes) {
        fail(ErrorCode::InvariantViolation, "manifest class_names length differs from n_classes");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.labels[i] >= t.n_classes) {
            fail(ErrorCode::InvariantViolation,
                 "label " + std::to_string(t.labels[i]) + " of sample " +
                     std::to_string(t.sample_ids[i]) + " outside [0, " +
                     std::to_string(t.n_classes) + ")");
        }
        if (i > 0 && t.sample_ids[i] <= t.sample_ids[i - 1]) {
            fail(ErrorCode::InvariantViolation,
                 t.sample_ids[i] == t.sample_ids[i - 1]
                     ? "duplicate sample id " + std::to_string(t.sample_ids[i])
                     : "sample ids not in ascending order");
        }
    }
    for (std::size_t k = 0; k < t.features.size(); ++k) {
        if (!std::isfinite(t.features[k])) {
            fail(ErrorCode::InvariantViolation,
                 "non-finite feature in sample " + std::to_string(t.sample_ids[k / t.dim]));
        }
    }
    if (t.logits) {
        for (std::size_t k = 0; k < t.logits->size(); ++k) {
            if (!std::isfinite((*t.logits)[k])) {
                fail(ErrorCode::InvariantViolation,
                     "non-finite logit in sample " + std::to_string(t.sample_ids[k / t.n_classes]));
            }
        }
    }
}

EmbeddingTable make_table(std::vector<TableRow> rows, std::size_t dim, std::size_t n_classes,
                          bool with_logits, DomainTag domain, TableManifest manifest) {
    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) { return a.id < b.id; });
    EmbeddingTable t;
    t.dim = dim;
    t.n_classes = n_classes;
    t.domain = domain;
    t.manifest = std::move(manifest);
    if (t.manifest.class_names.empty()) {
        for (std::size_t c = 0; c < n_classes; ++c) t.manifest.class_names.push_back("class_" + std::to_string(c));
    }
    t.sample_ids.reserve(rows.size());
    t.labels.reserve(rows.size());
    t.features.reserve(rows.size() * dim);
    if (with_logits) t.logits.emplace().reserve(rows.size() * n_classes);
    for (auto& r : rows) {
        if (r.features.size() != dim) {
            fail(ErrorCode::DimMismatch, "row " + std::to_string(r.id) + " has " +
                                             std::to_string(r.features.size()) + " features, expected " +
                                             std::to_string(dim));
        }
        if (with_logits && r.logits.size() != n_classes) {
            fail(ErrorCode::InvariantViolation, "row " + std::to_string(r.id) + " has wrong logit count");
        }
        t.sample_ids.push_back(r.id);
        t.labels.push_back(r.label);
        t.features.insert(t.features.end(), r.features.begin(), r.features.end());
        if (with_logits) t.logits->insert(t.logits->end(), r.logits.begin(), r.logits.end());
    }
    validate(t);
    return t;
}

EmbeddingTable empty_like(const EmbeddingTable& table) {
    EmbeddingTable t;
    t.dim = table.dim;
    t.n_classes = table.n_classes;
    t.domain = table.domain;
    t.manifest = table.manifest;
    if (table.logits) t.logits.emplace();
    return t;
}

std::optional<std::size_t> find_row(const EmbeddingTable& table, SampleId id) {
    auto it = std::lower_bound(table.sample_ids.begin(), table.sample_ids.end(), id);
    if (it == table.sample_ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - table.sample_ids.begin());
}

EmbeddingTable subset(const EmbeddingTable& table, std::span<const SampleId> ids) {
    std::vector<std::size_t> rows;
    rows.reserve(ids.size());
    for (SampleId id : ids) {
        auto row = find_row(table, id);
        if (!row) fail(ErrorCode::UnknownId, "sample id " + std::to_string(id) + " not in table");
        rows.push_back(*row);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

    EmbeddingTable out = empty_like(table);
    out.sample_ids.reserve(rows.size());
    out.labels.reserve(rows.size());
    out.features.reserve(rows.size() * table.dim);
    for (std::size_t r : rows) {
        out.sample_ids.push_back(table.sample_ids[r]);
        out.labels.push_back(table.labels[r]);
        auto f = table.feature_row(r);
        out.features.insert(out.features.end(), f.begin(), f.end());
        if (table.logits) {
            auto l = table.logit_row(r);
            out.logits->insert(out.logits->end(), l.begin(), l.end());
        }
    }
    return out;
}

EmbeddingTable merge(const EmbeddingTable& a, const EmbeddingTable& b) {
    if (a.dim != b.dim || a.n_classes != b.n_classes) {
        fail(ErrorCode::DimMismatch, "cannot merge tables of shape (dim " + std::to_string(a.dim) + ", " +
                                         std::to_string(a.n_classes) + " classes) and (dim " +
                                         std::to_string(b.dim) + ", " + std::to_string(b.n_classes) +
                                         " classes)");
    }
    // Logits survive only when both sides carry them (an empty side is neutral).
    const bool logits = (a.has_logits() || a.empty()) && (b.has_logits() || b.empty()) &&
                        (a.has_logits() || b.has_logits());

    EmbeddingTable out = empty_like(a.empty() && !b.empty() ? b : a);
    out.logits.reset();
    if (logits) out.logits.emplace();
    const std::size_t n = a.size() + b.size();
    out.sample_ids.reserve(n);
    out.labels.reserve(n);
    out.features.reserve(n * a.dim);

    std::size_t i = 0;
    std::size_t j = 0;
    auto push = [&](const EmbeddingTable& src, std::size_t r) {
        out.sample_ids.push_back(src.sample_ids[r]);
        out.labels.push_back(src.labels[r]);
        auto f = src.feature_row(r);
        out.features.insert(out.features.end(), f.begin(), f.end());
        if (logits) {
            auto l = src.logit_row(r);
            out.logits->insert(out.logits->end(), l.begin(), l.end());
        }
    };
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && j < b.size() && a.sample_ids[i] == b.sample_ids[j]) {
            fail(ErrorCode::DuplicateId, "sample id " + std::to_string(a.sample_ids[i]) + " present in both tables");
        }
        if (j == b.size() || (i < a.size() && a.sample_ids[i] < b.sample_ids[j])) {
            push(a, i++);
        } else {
            push(b, j++);
        }
    }
    return out;
}

EmbeddingTable with_logits(const EmbeddingTable& table, std::vector<float> logits) {
    EmbeddingTable out = table;
    if (logits.size() != table.size() * table.n_classes) {
        fail(ErrorCode::DimMismatch, "logit matrix does not match n_samples x n_classes");
    }
    out.logits = std::move(logits);
    return out;
}

// EMB1 ---------------------------------------------------------------------

std::string payload_checksum(const EmbeddingTable& t) {
    const auto header = encode_header(t);
    std::uint32_t crc = static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0));
    crc = crc_update(crc, header.data(), header.size());
    crc = crc_update(crc, t.features.data(), t.features.size() * sizeof(float));
    if (t.logits) crc = crc_update(crc, t.logits->data(), t.logits->size() * sizeof(float));
    crc = crc_update(crc, t.sample_ids.data(), t.sample_ids.size() * sizeof(SampleId));
    crc = crc_update(crc, t.labels.data(), t.labels.size() * sizeof(ClassLabel));
    return format_crc(crc);
}

std::vector<std::uint8_t> encode_table(const EmbeddingTable& t) {
    validate(t);
    const auto header = encode_header(t);
    std::vector<std::uint8_t> out(header.begin(), header.end());
    append(out, t.features);
    if (t.logits) append(out, *t.logits);
    append(out, t.sample_ids);
    append(out, t.labels);
    const std::string manifest = manifest_json(t.manifest, payload_checksum(t)).dump();
    const auto len = static_cast<std::uint32_t>(manifest.size());
    out.resize(out.size() + sizeof len);
    std::memcpy(out.data() + out.size() - sizeof len, &len, sizeof len);
    out.insert(out.end(), manifest.begin(), manifest.end());
    return out;
}

EmbeddingTable decode_table(std::span<const std::uint8_t> in) {
    if (in.size() < kHeaderSize || std::memcmp(in.data(), kMagic, 4) != 0) {
        fail(ErrorCode::MalformedHeader, "missing EMB1 magic bytes");
    }
    if (get<std::uint32_t>(in, 4) != kVersion) {
        fail(ErrorCode::MalformedHeader, "unsupported EMB1 version " + std::to_string(get<std::uint32_t>(in, 4)));
    }
    const auto n = get<std::uint64_t>(in, 8);
    const auto dim = get<std::uint32_t>(in, 16);
    const auto n_classes = get<std::uint32_t>(in, 20);
    const auto flags = get<std::uint32_t>(in, 24);
    const auto domain = get<std::uint32_t>(in, 28);
    if ((flags & ~kFlagLogits) != 0) fail(ErrorCode::MalformedHeader, "unknown flag bits in EMB1 header");
    if (domain > static_cast<std::uint32_t>(DomainTag::base)) {
        fail(ErrorCode::MalformedHeader, "unknown domain tag in EMB1 header");
    }
    for (std::size_t k = 32; k < kHeaderSize; ++k) {
        if (in[k] != 0) fail(ErrorCode::MalformedHeader, "reserved EMB1 header bytes are not zero");
    }
    const bool has_logits = (flags & kFlagLogits) != 0;

    // Size the payload in long double to reject absurd counts before allocating.
    const long double row_bytes = 4.0L * dim + (has_logits ? 4.0L * n_classes : 0.0L) + 8.0L + 4.0L;
    const long double payload = row_bytes * static_cast<long double>(n);
    if (payload + kHeaderSize + 4 > static_cast<long double>(in.size())) {
        fail(ErrorCode::MalformedHeader, "EMB1 header sizes exceed file length");
    }

    EmbeddingTable t;
    t.dim = dim;
    t.n_classes = n_classes;
    t.domain = static_cast<DomainTag>(domain);
    std::size_t offset = kHeaderSize;
    t.features = take<float>(in, offset, n * dim);
    if (has_logits) t.logits = take<float>(in, offset, n * n_classes);
    t.sample_ids = take<SampleId>(in, offset, n);
    t.labels = take<ClassLabel>(in, offset, n);
    const auto len = get<std::uint32_t>(in, offset);
    offset += 4;
    if (offset + len != in.size()) {
        fail(ErrorCode::MalformedHeader, "EMB1 manifest length does not match file length");
    }
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(in.begin() + static_cast<std::ptrdiff_t>(offset), in.end());
        t.manifest.format_version = m.at("format_version").get<std::string>();
        t.manifest.class_names = m.at("class_names").get<std::vector<std::string>>();
        t.manifest.provenance = m.at("provenance").get<std::string>();
        t.manifest.checksum = m.at("checksum").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedHeader, std::string("invalid EMB1 manifest: ") + e.what());
    }
    if (t.manifest.format_version != kFormatVersion) {
        fail(ErrorCode::MalformedHeader, "unsupported manifest format_version " + t.manifest.format_version);
    }
    const std::string actual = payload_checksum(t);
    if (actual != t.manifest.checksum) {
        fail(ErrorCode::ChecksumMismatch, "payload checksum " + actual + " does not match manifest " + t.manifest.checksum);
    }
    validate(t);
    return t;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::IoError, "error reading " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) fail(ErrorCode::IoError, "error writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

EmbeddingTable load_table(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return decode_table(bytes);
}

void save_table(const EmbeddingTable& table, const std::filesystem::path& path) {
    const auto bytes = encode_table(table);
    write_file_atomic(path, bytes);
}

// CSV ------------------------------------------------------------------------

EmbeddingTable import_csv(const std::filesystem::path& path, const CsvImportOptions& options) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());

    std::vector<std::vector<double>> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("id", 0) == 0) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                fail(ErrorCode::InvariantViolation,
                     path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        records.push_back(std::move(fields));
    }

    std::size_t n_classes = options.n_classes;
    if (n_classes == 0) {
        for (const auto& r : records) {
            if (r.size() >= 2) n_classes = std::max(n_classes, static_cast<std::size_t>(std::max(0.0, r[1])) + 1);
        }
    }
    if (options.with_logits && n_classes == 0) {
        fail(ErrorCode::InvalidArgument, "cannot infer n_classes for logit columns");
    }
    const std::size_t trailing = options.with_logits ? n_classes : 0;
    std::size_t dim = 0;
    std::vector<TableRow> rows;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        if (r.size() < 2 + trailing) fail(ErrorCode::InvariantViolation, "CSV record with too few columns");
        const std::size_t d = r.size() - 2 - trailing;
        if (k == 0) dim = d;
        if (d != dim) fail(ErrorCode::DimMismatch, "CSV records have inconsistent column counts");
        if (r[0] < 0 || r[0] != std::floor(r[0]) || r[1] < 0 || r[1] != std::floor(r[1])) {
            fail(ErrorCode::InvariantViolation, "CSV id and label must be non-negative integers");
        }
        TableRow row;
        row.id = static_cast<SampleId>(r[0]);
        row.label = static_cast<ClassLabel>(r[1]);
        for (std::size_t c = 0; c < d; ++c) row.features.push_back(static_cast<float>(r[2 + c]));
        for (std::size_t c = 0; c < trailing; ++c) row.logits.push_back(static_cast<float>(r[2 + d + c]));
        rows.push_back(std::move(row));
    }
    TableManifest manifest;
    manifest.provenance = "csv import: " + path.filename().string();
    return make_table(std::move(rows), dim, n_classes, options.with_logits, options.domain, std::move(manifest));
}

std::string export_csv(const EmbeddingTable& t) {
    std::string out = "id,label";
    for (std::size_t d = 0; d < t.dim; ++d) out += ",f" + std::to_string(d + 1);
    if (t.logits) {
        for (std::size_t c = 0; c < t.n_classes; ++c) out += ",l" + std::to_string(c + 1);
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += std::to_string(t.sample_ids[i]) + "," + std::to_string(t.labels[i]);
        for (float v : t.feature_row(i)) {
            std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(v));
            out += buf;
        }
        if (t.logits) {
            for (float v : t.logit_row(i)) {
                std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(v));
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace ieikit
