#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pathloc/clock.hpp"
#include "pathloc/net.hpp"

namespace pathloc {

enum class Protocol { tcp, udp };

enum class PathKind { network, leg };

enum class ExperimentStatus { complete, partial, failed };

enum class Region { africa, americas, asia, europe, oceania };

std::string_view to_string(Protocol p);
std::string_view to_string(PathKind k);
std::string_view to_string(ExperimentStatus s);
std::string_view to_string(Region r);
Protocol parse_protocol(std::string_view s, int line = -1);
PathKind parse_path_kind(std::string_view s, int line = -1);
ExperimentStatus parse_status(std::string_view s, int line = -1);
Region parse_region(std::string_view s, int line = -1);

// A measurement origin: a host standing in for a user in its country.
struct VantagePoint {
    std::string id;        // short unique id, e.g. "de"
    std::string country;   // ISO 3166-1 alpha-2, uppercase
    std::string hostname;
    Ipv4 address;

    bool operator==(const VantagePoint&) const = default;
};

// One responding address at a given TTL. rtts holds every probe's RTT in
// probe order; rtt_ms is their minimum and is the value used downstream.
struct Responder {
    Ipv4 address;
    std::string host;  // reverse-DNS label as printed; informational only
    double rtt_ms = 0.0;
    std::vector<double> rtts;

    bool operator==(const Responder&) const = default;
};

Responder make_responder(Ipv4 address, std::string host, std::vector<double> rtts);

struct Hop {
    int ttl = 1;
    std::vector<Responder> responders;  // empty means the hop never answered

    bool operator==(const Hop&) const = default;
};

struct PathMeasurement {
    std::string source;  // VantagePoint id
    Ipv4 target;
    Protocol protocol = Protocol::tcp;
    uint16_t port = 0;
    std::vector<Hop> hops;
    UtcInstant timestamp;
    PathKind kind = PathKind::network;

    bool operator==(const PathMeasurement&) const = default;
};

struct ServiceEndpoint {
    Ipv4 address;
    Protocol protocol = Protocol::tcp;
    uint16_t port = 0;
    std::set<std::string> dns_names;
    std::string app;

    bool operator==(const ServiceEndpoint&) const = default;

    // dns_names intentionally excluded: identity is (address, protocol, port, app)
    auto key() const { return std::tuple(address, protocol, port, app); }
};

// Country -> (region, subregion) assignment.
struct RegionScheme {
    struct Entry {
        Region region = Region::europe;
        std::string subregion;

        bool operator==(const Entry&) const = default;
    };

    std::map<std::string, Entry> entries;

    bool contains(const std::string& country) const { return entries.count(country) > 0; }
    const Entry* find(const std::string& country) const;
};

struct InterestGroup {
    std::string name;
    std::set<std::string> members;

    bool operator==(const InterestGroup&) const = default;
};

// One (app, vantage pair) experiment with its forward-path measurements.
// The pair's vantage points are embedded so records are self-contained.
struct ExperimentRecord {
    std::string app;
    VantagePoint src;
    VantagePoint dst;
    std::optional<PathMeasurement> network_path;
    std::vector<PathMeasurement> application_legs;
    ExperimentStatus status = ExperimentStatus::partial;

    bool operator==(const ExperimentRecord&) const = default;
};

struct ValidationError {
    std::string invariant;  // name of the violated invariant
    std::string field;      // offending field
    std::string detail;

    bool operator==(const ValidationError&) const = default;
};

std::string to_string(const ValidationError& e);

// Pure check of every type invariant reachable from the record. Returns an
// empty list iff the record is valid; order of errors is deterministic.
std::vector<ValidationError> validate_experiment(const ExperimentRecord& rec,
                                                 const RegionScheme& scheme);

bool valid_country_code(std::string_view code);

}  // namespace pathloc
