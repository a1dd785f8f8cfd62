#pragma once

#include "curtailkit/ingest.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace curtailkit {

/// One ISO's canonical files. Paths are relative to the catalog root unless
/// absolute.
struct DatasetEntry {
    IsoDescriptor descriptor;
    std::vector<std::filesystem::path> lmp_files;
    std::vector<std::filesystem::path> curtailment_files;
    std::vector<std::string> node_roster;
};

/// Index of canonical datasets stored as `catalog.json` under a root directory.
struct Catalog {
    std::filesystem::path root;
    std::vector<DatasetEntry> datasets;

    const DatasetEntry* find(IsoId iso) const noexcept;
    /// Replaces the entry for the same ISO or appends a new one.
    void upsert(DatasetEntry entry);
    std::filesystem::path resolve(const std::filesystem::path& file) const;
};

inline constexpr const char* kCatalogFileName = "catalog.json";

/// Accepts the root directory or the catalog file itself. A root without a
/// catalog file yields an empty catalog when `allow_missing` is set.
Catalog load_catalog(const std::filesystem::path& root_or_file, bool allow_missing = false);
void save_catalog(const Catalog& catalog);

/// Node ids unique within each ISO, one entry per ISO, descriptors valid.
void validate(const Catalog& catalog);

/// Loads every LMP file of the dataset: `.ckt` files through the columnar
/// reader, anything else as canonical CSV placed on a covering grid.
SeriesSet load_lmp_series(const Catalog& catalog, const DatasetEntry& entry, ParseOptions options = {});
SeriesSet load_curtailment_series(const Catalog& catalog, const DatasetEntry& entry, ParseOptions options = {},
                                  double percent_threshold = 0.0);

} // namespace curtailkit
