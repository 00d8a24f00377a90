#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathloc/model.hpp"

namespace pathloc::geo {

struct LatLon {
    double lat = 0.0;  // degrees
    double lon = 0.0;

    bool operator==(const LatLon&) const = default;
};

struct GeoRange {
    uint32_t from = 0;  // inclusive, host byte order
    uint32_t to = 0;    // inclusive
    std::string country;
};

struct CidrOverride {
    Ipv4 net;
    int prefix_len = 0;
    std::string country;
};

// Country-granularity IP database: sorted non-overlapping ranges, a manual
// override layer applied ahead of the ranges, and per-country centroids.
struct GeoDb {
    std::vector<GeoRange> ranges;        // sorted by from
    std::vector<CidrOverride> overrides;
    std::map<std::string, LatLon> centroids;
};

// Ranges CSV: ip_from,ip_to,country_code,country_name (decimal 32-bit ips).
// Overrides CSV: cidr,country_code. Centroids CSV: country_code,lat,lon.
// Throws OverlapError, UnknownCountry or SchemaError.
GeoDb load_geodb(const std::string& ranges_path,
                 const std::string& overrides_path,
                 const std::string& centroids_path,
                 const RegionScheme& scheme);

// Longest-prefix override first, then binary search over the ranges.
std::optional<std::string> lookup(const GeoDb& db, Ipv4 ip);

double great_circle_km(LatLon a, LatLon b);

// A responder whose database location is unreachable within its RTT at the
// given propagation speed. Advisory only; nothing is auto-corrected.
struct PlausibilityFlag {
    int ttl = 0;
    Ipv4 address;
    std::string country;
    double rtt_ms = 0.0;
    double distance_km = 0.0;
    double limit_km = 0.0;

    bool operator==(const PlausibilityFlag&) const = default;
};

// Speed expresses the one-way distance budget per RTT millisecond; the
// default 100 km/ms is half of light speed in fiber.
std::vector<PlausibilityFlag> rtt_plausibility(const PathMeasurement& m,
                                               const GeoDb& db,
                                               const std::string& source_country,
                                               double speed_km_per_ms = 100.0);

}  // namespace pathloc::geo
