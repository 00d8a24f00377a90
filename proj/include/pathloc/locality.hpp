#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pathloc/geodb.hpp"
#include "pathloc/model.hpp"

namespace pathloc::locality {

// Country sequence of one measurement: consecutive duplicates collapsed,
// unresolvable hops omitted but counted.
struct GeoPath {
    std::string source;  // measurement ref: source vantage id
    Ipv4 target;
    PathKind kind = PathKind::network;
    std::vector<std::string> countries;
    int unresolved_hops = 0;

    bool operator==(const GeoPath&) const = default;

    std::set<std::string> country_set() const {
        return {countries.begin(), countries.end()};
    }
};

// countries always begins with source_country. A hop contributes one entry
// per responder; hops with no resolvable responder count as unresolved.
GeoPath geolocate_path(const PathMeasurement& m, const geo::GeoDb& db,
                       const std::string& source_country);

// Geolocated legs from both partners to the backend. A country on either
// leg counts as traversed by the application path. Throws MissingLeg when a
// partner has no leg.
std::vector<GeoPath> build_application_path(const ExperimentRecord& exp, const geo::GeoDb& db);

// One experiment after geolocation.
struct ExperimentGeoView {
    std::string app;
    std::string src_id;
    std::string dst_id;
    std::string src_country;
    std::string dst_country;
    GeoPath network;
    std::vector<GeoPath> application;

    bool operator==(const ExperimentGeoView&) const = default;

    std::set<std::string> application_countries() const;
};

ExperimentGeoView geolocate_experiment(const ExperimentRecord& exp, const geo::GeoDb& db);

// region may name a region ("Europe") or a subregion ("South America").
bool stays_within_region(const std::set<std::string>& countries,
                         const std::string& region, const RegionScheme& scheme);

// True iff at least one traversed country belongs to the group. Only
// responding hops ever enter a GeoPath, so silent hops never grant access.
bool accessible_to(const InterestGroup& group, const std::set<std::string>& countries);

// round-half-up(100 * count / total); throws ZeroTotal.
int percent(int64_t count, int64_t total);

struct LocalityRow {
    std::string region;         // region or subregion name
    std::string parent_region;  // empty for region rows
    int n_measurements = 0;     // distinct vantage pairs
    int network_leaving = 0;
    std::map<std::string, int> per_app_leaving_pct;

    bool operator==(const LocalityRow&) const = default;
};

struct JurisdictionRow {
    std::string region;
    std::string parent_region;
    std::string group;
    int n_total = 0;
    int network_accessible = 0;
    std::map<std::string, int> per_app_accessible;  // counts, not percents

    bool operator==(const JurisdictionRow&) const = default;
};

// Traffic-leaving-region statistics over same-region vantage pairs
// (cross-region views are excluded from this table). Views are grouped by
// pair: each pair contributes one network verdict (any experiment's network
// path leaving counts) and one verdict per app. Subregion rows appear when a
// region's pairs span more than one subregion.
std::vector<LocalityRow> aggregate_locality(std::span<const ExperimentGeoView> views,
                                            const RegionScheme& scheme,
                                            const std::vector<std::string>& apps);

// Accessibility per (region, interest group), keyed by the source vantage's
// region; same pair grouping as aggregate_locality.
std::vector<JurisdictionRow> aggregate_jurisdiction(std::span<const ExperimentGeoView> views,
                                                    const RegionScheme& scheme,
                                                    std::span<const InterestGroup> groups,
                                                    const std::vector<std::string>& apps);

}  // namespace pathloc::locality
