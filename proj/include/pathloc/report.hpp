#pragma once

#include <span>
#include <string>
#include <vector>

#include "pathloc/flows.hpp"
#include "pathloc/locality.hpp"
#include "pathloc/model.hpp"

namespace pathloc::report {

enum class Format { csv, markdown };

Format parse_format(std::string_view s);

// Columns: region,n_measurements,network_leaving_n,network_leaving_pct,
// <app>_pct... with apps in sorted order. Region rows first (Europe, Oceania,
// Asia, Americas, Africa), then subregion rows; subregion names carry their
// parent as "South America (Americas)" in csv and are indented in markdown.
std::string emit_locality(std::span<const locality::LocalityRow> rows, Format format);

// Columns: region,group,n_total,network_n,network_pct,<app>_n,<app>_pct...
// Groups with zero accessibility in every row are suppressed by default.
std::string emit_jurisdiction(std::span<const locality::JurisdictionRow> rows, Format format,
                              bool suppress_all_zero_groups = true);

// Line-delimited persistence with a versioned header. Every save/load pair
// round-trips exactly. Throws SchemaError or VersionMismatch.
enum class FileKind {
    measurements,
    experiments,
    views,
    geopaths,
    locality_rows,
    jurisdiction_rows,
    flow_partition
};

std::string_view to_string(FileKind k);
FileKind peek_kind(const std::string& path);

void save_measurements(const std::string& path, std::span<const PathMeasurement> ms);
std::vector<PathMeasurement> load_measurements(const std::string& path);

void save_experiments(const std::string& path, std::span<const ExperimentRecord> recs);
std::vector<ExperimentRecord> load_experiments(const std::string& path);

void save_views(const std::string& path, std::span<const locality::ExperimentGeoView> views);
std::vector<locality::ExperimentGeoView> load_views(const std::string& path);

void save_geopaths(const std::string& path, std::span<const locality::GeoPath> paths);
std::vector<locality::GeoPath> load_geopaths(const std::string& path);

void save_locality_rows(const std::string& path, std::span<const locality::LocalityRow> rows);
std::vector<locality::LocalityRow> load_locality_rows(const std::string& path);

void save_jurisdiction_rows(const std::string& path,
                            std::span<const locality::JurisdictionRow> rows);
std::vector<locality::JurisdictionRow> load_jurisdiction_rows(const std::string& path);

// Classified flows in one file, each line tagged with its class.
void save_flow_partition(const std::string& path, const flows::Partition& partition);
flows::Partition load_flow_partition(const std::string& path);

// Serialized single records (used by journals and tests).
std::string experiment_to_line(const ExperimentRecord& rec);
ExperimentRecord experiment_from_line(const std::string& line, int lineno = -1);

// Region scheme CSV: country,region,subregion (header required).
RegionScheme load_region_scheme(const std::string& path);

// Interest groups CSV: group,country (header required); group order follows
// first appearance. Members must exist in the scheme.
std::vector<InterestGroup> load_interest_groups(const std::string& path,
                                                const RegionScheme& scheme);

}  // namespace pathloc::report
