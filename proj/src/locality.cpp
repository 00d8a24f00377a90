#include "pathloc/locality.hpp"

#include <algorithm>
#include <map>

#include "pathloc/error.hpp"

namespace pathloc::locality {

namespace {

int region_rank(const std::string& name) {
    if (name == "Europe") return 0;
    if (name == "Oceania") return 1;
    if (name == "Asia") return 2;
    if (name == "Americas") return 3;
    if (name == "Africa") return 4;
    return 5;
}

// Subregion display order within a region; the Americas split leads with
// South America.
int subregion_rank(const std::string& name) {
    if (name == "South America") return 0;
    if (name == "Northern America") return 1;
    return 2;
}

void append_collapsed(std::vector<std::string>& countries, const std::string& code) {
    if (countries.empty() || countries.back() != code) countries.push_back(code);
}

}  // namespace

GeoPath geolocate_path(const PathMeasurement& m, const geo::GeoDb& db,
                       const std::string& source_country) {
    GeoPath path;
    path.source = m.source;
    path.target = m.target;
    path.kind = m.kind;
    path.countries.push_back(source_country);
    for (const Hop& hop : m.hops) {
        bool resolved = false;
        for (const Responder& r : hop.responders) {
            if (auto country = geo::lookup(db, r.address)) {
                append_collapsed(path.countries, *country);
                resolved = true;
            }
        }
        if (!resolved) ++path.unresolved_hops;  // silent or unlocatable hop
    }
    return path;
}

std::vector<GeoPath> build_application_path(const ExperimentRecord& exp, const geo::GeoDb& db) {
    std::set<std::string> partners{exp.src.id, exp.dst.id};
    for (const std::string& partner : partners) {
        bool found = false;
        for (const PathMeasurement& leg : exp.application_legs)
            if (leg.source == partner && !leg.hops.empty()) found = true;
        if (!found)
            throw Error("MissingLeg", "no successful application leg from '" + partner + "' for app '" +
                                          exp.app + "'");
    }
    std::vector<GeoPath> out;
    out.reserve(exp.application_legs.size());
    for (const PathMeasurement& leg : exp.application_legs) {
        const std::string& country = leg.source == exp.src.id ? exp.src.country : exp.dst.country;
        out.push_back(geolocate_path(leg, db, country));
    }
    return out;
}

std::set<std::string> ExperimentGeoView::application_countries() const {
    std::set<std::string> out;
    for (const GeoPath& p : application) out.insert(p.countries.begin(), p.countries.end());
    return out;
}

ExperimentGeoView geolocate_experiment(const ExperimentRecord& exp, const geo::GeoDb& db) {
    if (!exp.network_path)
        throw Error("IncompleteExperiment",
                    "experiment " + exp.app + " " + exp.src.id + "-" + exp.dst.id +
                        " has no network path");
    ExperimentGeoView view;
    view.app = exp.app;
    view.src_id = exp.src.id;
    view.dst_id = exp.dst.id;
    view.src_country = exp.src.country;
    view.dst_country = exp.dst.country;
    view.network = geolocate_path(*exp.network_path, db, exp.src.country);
    view.application = build_application_path(exp, db);
    return view;
}

bool stays_within_region(const std::set<std::string>& countries, const std::string& region,
                         const RegionScheme& scheme) {
    for (const std::string& country : countries) {
        const RegionScheme::Entry* entry = scheme.find(country);
        if (!entry) return false;  // unknown countries never count as inside
        if (std::string(to_string(entry->region)) != region && entry->subregion != region)
            return false;
    }
    return true;
}

bool accessible_to(const InterestGroup& group, const std::set<std::string>& countries) {
    for (const std::string& country : countries)
        if (group.members.count(country)) return true;
    return false;
}

int percent(int64_t count, int64_t total) {
    if (total <= 0) throw Error("ZeroTotal", "percentage of an empty population");
    if (count < 0 || count > total)
        throw schema_error("count " + std::to_string(count) + " outside [0, " +
                           std::to_string(total) + "]");
    return static_cast<int>((200 * count + total) / (2 * total));
}

namespace {

// All experiments for one vantage pair, across apps.
struct PairGroup {
    std::string src_country;
    std::string dst_country;
    std::vector<const ExperimentGeoView*> views;
};

using PairKey = std::pair<std::string, std::string>;

std::map<PairKey, PairGroup> group_by_pair(std::span<const ExperimentGeoView> views) {
    std::map<PairKey, PairGroup> groups;
    for (const ExperimentGeoView& v : views) {
        PairGroup& g = groups[{v.src_id, v.dst_id}];
        g.src_country = v.src_country;
        g.dst_country = v.dst_country;
        g.views.push_back(&v);
    }
    return groups;
}

struct Bucket {
    std::string name;            // region or subregion
    std::string parent;          // empty for region buckets
    std::vector<const PairGroup*> pairs;
};

// Region buckets keyed by the source vantage's region. When
// same_region_only, cross-region pairs are dropped entirely. Subregion
// buckets hold pairs whose two endpoints share the subregion and are only
// emitted for regions spanning more than one subregion.
std::vector<Bucket> make_buckets(const std::map<PairKey, PairGroup>& groups,
                                 const RegionScheme& scheme, bool same_region_only) {
    std::map<std::string, Bucket> regions;
    std::map<std::pair<std::string, std::string>, Bucket> subregions;
    std::map<std::string, std::set<std::string>> spans;

    for (const auto& [key, group] : groups) {
        const RegionScheme::Entry* src = scheme.find(group.src_country);
        const RegionScheme::Entry* dst = scheme.find(group.dst_country);
        if (!src || !dst) continue;
        std::string src_region(to_string(src->region));
        std::string dst_region(to_string(dst->region));
        if (same_region_only && src_region != dst_region) continue;

        Bucket& region_bucket = regions[src_region];
        region_bucket.name = src_region;
        region_bucket.pairs.push_back(&group);

        if (src_region == dst_region) {
            spans[src_region].insert(src->subregion);
            spans[src_region].insert(dst->subregion);
            if (src->subregion == dst->subregion) {
                Bucket& sub = subregions[{src_region, src->subregion}];
                sub.name = src->subregion;
                sub.parent = src_region;
                sub.pairs.push_back(&group);
            }
        }
    }

    std::vector<Bucket> out;
    for (auto& [name, bucket] : regions) out.push_back(std::move(bucket));
    for (auto& [key, bucket] : subregions)
        if (spans[key.first].size() > 1) out.push_back(std::move(bucket));

    std::sort(out.begin(), out.end(), [](const Bucket& a, const Bucket& b) {
        bool a_sub = !a.parent.empty(), b_sub = !b.parent.empty();
        if (a_sub != b_sub) return !a_sub;  // regions before subregions
        const std::string& ra = a_sub ? a.parent : a.name;
        const std::string& rb = b_sub ? b.parent : b.name;
        if (region_rank(ra) != region_rank(rb)) return region_rank(ra) < region_rank(rb);
        if (a_sub && subregion_rank(a.name) != subregion_rank(b.name))
            return subregion_rank(a.name) < subregion_rank(b.name);
        return a.name < b.name;
    });
    return out;
}

}  // namespace

std::vector<LocalityRow> aggregate_locality(std::span<const ExperimentGeoView> views,
                                            const RegionScheme& scheme,
                                            const std::vector<std::string>& apps) {
    auto groups = group_by_pair(views);
    auto buckets = make_buckets(groups, scheme, /*same_region_only=*/true);

    std::vector<LocalityRow> rows;
    rows.reserve(buckets.size());
    for (const Bucket& bucket : buckets) {
        LocalityRow row;
        row.region = bucket.name;
        row.parent_region = bucket.parent;
        row.n_measurements = static_cast<int>(bucket.pairs.size());

        for (const PairGroup* pair : bucket.pairs) {
            bool leaves = false;
            for (const ExperimentGeoView* v : pair->views)
                if (!stays_within_region(v->network.country_set(), bucket.name, scheme))
                    leaves = true;
            if (leaves) ++row.network_leaving;
        }

        for (const std::string& app : apps) {
            int with_app = 0, leaving = 0;
            for (const PairGroup* pair : bucket.pairs) {
                bool present = false, leaves = false;
                for (const ExperimentGeoView* v : pair->views) {
                    if (v->app != app) continue;
                    present = true;
                    if (!stays_within_region(v->application_countries(), bucket.name, scheme))
                        leaves = true;
                }
                if (present) ++with_app;
                if (leaves) ++leaving;
            }
            row.per_app_leaving_pct[app] = with_app == 0 ? 0 : percent(leaving, with_app);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<JurisdictionRow> aggregate_jurisdiction(std::span<const ExperimentGeoView> views,
                                                    const RegionScheme& scheme,
                                                    std::span<const InterestGroup> groups,
                                                    const std::vector<std::string>& apps) {
    auto pair_groups = group_by_pair(views);
    auto buckets = make_buckets(pair_groups, scheme, /*same_region_only=*/false);

    std::vector<JurisdictionRow> rows;
    for (const Bucket& bucket : buckets) {
        for (const InterestGroup& group : groups) {
            JurisdictionRow row;
            row.region = bucket.name;
            row.parent_region = bucket.parent;
            row.group = group.name;
            row.n_total = static_cast<int>(bucket.pairs.size());

            for (const PairGroup* pair : bucket.pairs) {
                bool network = false;
                for (const ExperimentGeoView* v : pair->views)
                    if (accessible_to(group, v->network.country_set())) network = true;
                if (network) ++row.network_accessible;
            }
            for (const std::string& app : apps) {
                int accessible = 0;
                for (const PairGroup* pair : bucket.pairs) {
                    bool hit = false;
                    for (const ExperimentGeoView* v : pair->views)
                        if (v->app == app && accessible_to(group, v->application_countries()))
                            hit = true;
                    if (hit) ++accessible;
                }
                row.per_app_accessible[app] = accessible;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace pathloc::locality
