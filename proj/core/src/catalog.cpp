#include "curtailkit/catalog.hpp"

#include "curtailkit/canonical.hpp"
#include "curtailkit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace curtailkit {

using nlohmann::json;

const DatasetEntry* Catalog::find(IsoId iso) const noexcept {
    for (const auto& d : datasets) {
        if (d.descriptor.iso == iso) {
            return &d;
        }
    }
    return nullptr;
}

void Catalog::upsert(DatasetEntry entry) {
    for (auto& d : datasets) {
        if (d.descriptor.iso == entry.descriptor.iso) {
            d = std::move(entry);
            return;
        }
    }
    datasets.push_back(std::move(entry));
}

std::filesystem::path Catalog::resolve(const std::filesystem::path& file) const {
    return file.is_absolute() ? file : root / file;
}

namespace {

std::vector<std::filesystem::path> paths_from(const json& j, const char* key) {
    std::vector<std::filesystem::path> out;
    if (j.contains(key)) {
        for (const auto& p : j.at(key)) {
            out.emplace_back(p.get<std::string>());
        }
    }
    return out;
}

json paths_to(const std::vector<std::filesystem::path>& paths) {
    json arr = json::array();
    for (const auto& p : paths) {
        arr.push_back(p.generic_string());
    }
    return arr;
}

DatasetEntry entry_from(const json& j) {
    const auto iso_text = j.at("iso").get<std::string>();
    const auto iso = iso_from_string(iso_text);
    if (!iso) {
        raise(ErrorCode::ConfigError, "unknown ISO '" + iso_text + "' in catalog");
    }
    IsoDescriptor d = descriptor_for(*iso);
    if (j.contains("granularity_seconds")) {
        d.granularity = Resolution::from_seconds(j.at("granularity_seconds").get<std::int64_t>());
    }
    if (j.contains("reported_kind")) {
        const auto text = j.at("reported_kind").get<std::string>();
        const auto kind = reported_kind_from_string(text);
        if (!kind) {
            raise(ErrorCode::ConfigError, "unknown reported kind '" + text + "'");
        }
        d.reported_kind = *kind;
    }
    if (j.contains("zone")) {
        d.zone = j.at("zone").get<std::string>();
    }
    DatasetEntry e{d, paths_from(j, "lmp_files"), paths_from(j, "curtailment_files"), {}};
    if (j.contains("node_roster")) {
        e.node_roster = j.at("node_roster").get<std::vector<std::string>>();
    }
    return e;
}

} // namespace

Catalog load_catalog(const std::filesystem::path& root_or_file, bool allow_missing) {
    std::filesystem::path file = root_or_file;
    std::filesystem::path root = root_or_file;
    if (std::filesystem::is_directory(root_or_file)) {
        file = root_or_file / kCatalogFileName;
    } else {
        root = root_or_file.parent_path();
    }
    Catalog catalog{root, {}};
    std::ifstream in(file);
    if (!in) {
        if (allow_missing && std::filesystem::is_directory(root_or_file)) {
            return catalog;
        }
        raise(ErrorCode::IoError, "cannot open catalog '" + file.string() + "'");
    }
    try {
        const json j = json::parse(in);
        for (const auto& d : j.at("datasets")) {
            catalog.datasets.push_back(entry_from(d));
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::ConfigError, "malformed catalog '" + file.string() + "': " + e.what());
    }
    validate(catalog);
    return catalog;
}

void save_catalog(const Catalog& catalog) {
    validate(catalog);
    json datasets = json::array();
    for (const auto& e : catalog.datasets) {
        datasets.push_back({
            {"iso", std::string(to_string(e.descriptor.iso))},
            {"granularity_seconds", e.descriptor.granularity.seconds()},
            {"reported_kind", std::string(to_string(e.descriptor.reported_kind))},
            {"zone", e.descriptor.zone},
            {"lmp_files", paths_to(e.lmp_files)},
            {"curtailment_files", paths_to(e.curtailment_files)},
            {"node_roster", e.node_roster},
        });
    }
    const json doc = {{"version", 1}, {"datasets", datasets}};
    std::filesystem::create_directories(catalog.root);
    const auto file = catalog.root / kCatalogFileName;
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write catalog '" + file.string() + "'");
    }
    out << doc.dump(2) << '\n';
}

void validate(const Catalog& catalog) {
    std::set<IsoId> seen;
    for (const auto& e : catalog.datasets) {
        validate(e.descriptor);
        if (!seen.insert(e.descriptor.iso).second) {
            raise(ErrorCode::ConfigError, "catalog lists " + std::string(to_string(e.descriptor.iso)) + " twice");
        }
        std::set<std::string> nodes;
        for (const auto& n : e.node_roster) {
            if (!nodes.insert(n).second) {
                raise(ErrorCode::ConfigError,
                      "node '" + n + "' appears twice in the " + std::string(to_string(e.descriptor.iso)) + " roster");
            }
        }
    }
}

namespace {

bool is_cache(const std::filesystem::path& p) {
    return p.extension() == ".ckt";
}

void merge_into(SeriesSet& dst, SeriesSet&& src) {
    for (auto& [id, s] : src) {
        if (!dst.emplace(id, std::move(s)).second) {
            raise(ErrorCode::DuplicateError, "series '" + id + "' appears in more than one file");
        }
    }
}

} // namespace

SeriesSet load_lmp_series(const Catalog& catalog, const DatasetEntry& entry, ParseOptions options) {
    SeriesSet out;
    std::vector<LmpRecord> records;
    for (const auto& f : entry.lmp_files) {
        const auto path = catalog.resolve(f);
        if (is_cache(path)) {
            merge_into(out, read_canonical(path));
        } else {
            auto parsed = parse_lmp_file(path, entry.descriptor, options);
            std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(records));
        }
    }
    if (const auto grid = covering_grid(std::span<const LmpRecord>(records), entry.descriptor.granularity,
                                        entry.descriptor.zone)) {
        merge_into(out, to_series(records, *grid));
    }
    return out;
}

SeriesSet load_curtailment_series(const Catalog& catalog, const DatasetEntry& entry, ParseOptions options,
                                  double percent_threshold) {
    SeriesSet out;
    std::vector<CurtailmentRecord> records;
    for (const auto& f : entry.curtailment_files) {
        const auto path = catalog.resolve(f);
        if (is_cache(path)) {
            merge_into(out, read_canonical(path));
        } else {
            auto parsed = parse_curtailment_file(path, entry.descriptor, options);
            std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(records));
        }
    }
    if (const auto grid = covering_grid(std::span<const CurtailmentRecord>(records), entry.descriptor.granularity,
                                        entry.descriptor.zone)) {
        merge_into(out, to_series(records, *grid, percent_threshold));
    }
    return out;
}

} // namespace curtailkit
