#include "pathloc/geodb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc::geo {

namespace {

constexpr double kEarthRadiusKm = 6371.0;

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::vector<std::string> csv_fields(const std::string& line, size_t expect, const char* what,
                                    int lineno) {
    auto fields = split(line, ',');
    if (fields.size() != expect)
        throw schema_error(std::string(what) + ": expected " + std::to_string(expect) +
                               " columns, got " + std::to_string(fields.size()),
                           lineno);
    return fields;
}

void require_country(const std::string& code, const RegionScheme& scheme, int lineno) {
    if (!valid_country_code(code))
        throw schema_error("bad country code '" + code + "'", lineno);
    if (!scheme.contains(code))
        throw Error("UnknownCountry", "'" + code + "' is not in the region scheme",
                    lineno);
}

}  // namespace

GeoDb load_geodb(const std::string& ranges_path, const std::string& overrides_path,
                 const std::string& centroids_path, const RegionScheme& scheme) {
    GeoDb db;

    {
        std::istringstream in(read_file(ranges_path));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty() || line[0] == '#') continue;
            auto f = csv_fields(line, 4, "ranges", lineno);
            GeoRange r;
            r.from = static_cast<uint32_t>(parse_int(f[0], 0, 0xffffffffLL, "ip_from", lineno));
            r.to = static_cast<uint32_t>(parse_int(f[1], 0, 0xffffffffLL, "ip_to", lineno));
            r.country = std::string(trim(f[2]));
            if (r.from > r.to)
                throw schema_error("range with ip_from > ip_to", lineno);
            require_country(r.country, scheme, lineno);
            db.ranges.push_back(std::move(r));
        }
    }
    std::stable_sort(db.ranges.begin(), db.ranges.end(),
                     [](const GeoRange& a, const GeoRange& b) { return a.from < b.from; });
    for (size_t i = 1; i < db.ranges.size(); ++i) {
        const GeoRange& prev = db.ranges[i - 1];
        const GeoRange& cur = db.ranges[i];
        if (cur.from <= prev.to)
            throw Error("OverlapError",
                        "ranges [" + std::to_string(prev.from) + ", " + std::to_string(prev.to) +
                            "] (" + prev.country + ") and [" + std::to_string(cur.from) + ", " +
                            std::to_string(cur.to) + "] (" + cur.country + ") intersect");
    }

    {
        std::istringstream in(read_file(overrides_path));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty() || line[0] == '#') continue;
            auto f = csv_fields(line, 2, "overrides", lineno);
            auto [net, len] = parse_cidr(trim(f[0]), lineno);
            std::string country(trim(f[1]));
            require_country(country, scheme, lineno);
            db.overrides.push_back({net, len, std::move(country)});
        }
    }

    {
        std::istringstream in(read_file(centroids_path));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty() || line[0] == '#') continue;
            auto f = csv_fields(line, 3, "centroids", lineno);
            std::string country(trim(f[0]));
            require_country(country, scheme, lineno);
            double lat = parse_double(f[1], "lat", lineno);
            double lon = parse_double(f[2], "lon", lineno);
            if (lat < -90 || lat > 90 || lon < -180 || lon > 180)
                throw schema_error("centroid out of bounds", lineno);
            db.centroids[country] = {lat, lon};
        }
    }

    for (const GeoRange& r : db.ranges)
        if (!db.centroids.count(r.country))
            throw Error("MissingCentroid", "no centroid for range country " + r.country);

    return db;
}

std::optional<std::string> lookup(const GeoDb& db, Ipv4 ip) {
    // manual corrections win; ties broken by the longest prefix
    const CidrOverride* best = nullptr;
    for (const CidrOverride& o : db.overrides)
        if (cidr_contains(o.net, o.prefix_len, ip) && (!best || o.prefix_len > best->prefix_len))
            best = &o;
    if (best) return best->country;

    auto it = std::upper_bound(db.ranges.begin(), db.ranges.end(), ip.value,
                               [](uint32_t v, const GeoRange& r) { return v < r.from; });
    if (it == db.ranges.begin()) return std::nullopt;
    --it;
    if (ip.value >= it->from && ip.value <= it->to) return it->country;
    return std::nullopt;
}

double great_circle_km(LatLon a, LatLon b) {
    double phi1 = to_radians(a.lat);
    double phi2 = to_radians(b.lat);
    double dphi = to_radians(b.lat - a.lat);
    double dlambda = to_radians(b.lon - a.lon);
    double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
               std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

std::vector<PlausibilityFlag> rtt_plausibility(const PathMeasurement& m, const GeoDb& db,
                                               const std::string& source_country,
                                               double speed_km_per_ms) {
    auto src_it = db.centroids.find(source_country);
    if (src_it == db.centroids.end())
        throw Error("MissingCentroid", "no centroid for source country " + source_country);

    std::vector<PlausibilityFlag> flags;
    for (const Hop& hop : m.hops) {
        for (const Responder& r : hop.responders) {
            auto country = lookup(db, r.address);
            if (!country) continue;  // unresolvable responders cannot be judged
            auto c_it = db.centroids.find(*country);
            if (c_it == db.centroids.end())
                throw Error("MissingCentroid", "no centroid for country " + *country);
            double distance = great_circle_km(src_it->second, c_it->second);
            double limit = r.rtt_ms * speed_km_per_ms;
            if (distance > limit)
                flags.push_back({hop.ttl, r.address, *country, r.rtt_ms, distance, limit});
        }
    }
    return flags;
}

}  // namespace pathloc::geo
