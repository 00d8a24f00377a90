#include "pathloc/model.hpp"

#include <algorithm>
#include <cmath>

#include "pathloc/error.hpp"

namespace pathloc {

std::string_view to_string(Protocol p) { return p == Protocol::tcp ? "tcp" : "udp"; }

std::string_view to_string(PathKind k) { return k == PathKind::network ? "network" : "leg"; }

std::string_view to_string(ExperimentStatus s) {
    switch (s) {
        case ExperimentStatus::complete: return "complete";
        case ExperimentStatus::partial: return "partial";
        case ExperimentStatus::failed: return "failed";
    }
    return "partial";
}

std::string_view to_string(Region r) {
    switch (r) {
        case Region::africa: return "Africa";
        case Region::americas: return "Americas";
        case Region::asia: return "Asia";
        case Region::europe: return "Europe";
        case Region::oceania: return "Oceania";
    }
    return "Europe";
}

Protocol parse_protocol(std::string_view s, int line) {
    if (s == "tcp" || s == "TCP") return Protocol::tcp;
    if (s == "udp" || s == "UDP") return Protocol::udp;
    throw schema_error("unknown protocol: '" + std::string(s) + "'", line);
}

PathKind parse_path_kind(std::string_view s, int line) {
    if (s == "network") return PathKind::network;
    if (s == "leg") return PathKind::leg;
    throw schema_error("unknown path kind: '" + std::string(s) + "'", line);
}

ExperimentStatus parse_status(std::string_view s, int line) {
    if (s == "complete") return ExperimentStatus::complete;
    if (s == "partial") return ExperimentStatus::partial;
    if (s == "failed") return ExperimentStatus::failed;
    throw schema_error("unknown experiment status: '" + std::string(s) + "'", line);
}

Region parse_region(std::string_view s, int line) {
    if (s == "Africa") return Region::africa;
    if (s == "Americas") return Region::americas;
    if (s == "Asia") return Region::asia;
    if (s == "Europe") return Region::europe;
    if (s == "Oceania") return Region::oceania;
    throw schema_error("unknown region: '" + std::string(s) + "'", line);
}

Responder make_responder(Ipv4 address, std::string host, std::vector<double> rtts) {
    Responder r;
    r.address = address;
    r.host = std::move(host);
    r.rtts = std::move(rtts);
    r.rtt_ms = r.rtts.empty() ? 0.0 : *std::min_element(r.rtts.begin(), r.rtts.end());
    return r;
}

const RegionScheme::Entry* RegionScheme::find(const std::string& country) const {
    auto it = entries.find(country);
    return it == entries.end() ? nullptr : &it->second;
}

bool valid_country_code(std::string_view code) {
    return code.size() == 2 && code[0] >= 'A' && code[0] <= 'Z' && code[1] >= 'A' && code[1] <= 'Z';
}

std::string to_string(const ValidationError& e) {
    return e.invariant + " [" + e.field + "]: " + e.detail;
}

namespace {

void check_vantage(const VantagePoint& vp, const std::string& field, const RegionScheme& scheme,
                   std::vector<ValidationError>& errors) {
    if (vp.id.empty())
        errors.push_back({"vantage-id-nonempty", field + ".id", "vantage point id is empty"});
    if (!valid_country_code(vp.country))
        errors.push_back({"country-code-format", field + ".country",
                          "'" + vp.country + "' is not two uppercase ASCII letters"});
    else if (!scheme.contains(vp.country))
        errors.push_back({"region-scheme-membership", field + ".country",
                          "'" + vp.country + "' has no entry in the region scheme"});
}

void check_measurement(const PathMeasurement& m, const std::string& field, PathKind expected_kind,
                       std::vector<ValidationError>& errors) {
    if (m.kind != expected_kind)
        errors.push_back({"path-kind", field + ".kind",
                          std::string("expected ") + std::string(to_string(expected_kind)) +
                              ", got " + std::string(to_string(m.kind))});
    if (m.port == 0)
        errors.push_back({"port-range", field + ".port", "port must be in 1-65535"});
    int prev_ttl = 0;
    for (size_t h = 0; h < m.hops.size(); ++h) {
        const Hop& hop = m.hops[h];
        std::string hf = field + ".hops[" + std::to_string(h) + "]";
        if (hop.ttl < 1) errors.push_back({"ttl-positive", hf + ".ttl", "ttl must be >= 1"});
        if (hop.ttl <= prev_ttl)
            errors.push_back({"ttl-strictly-increasing", hf + ".ttl",
                              "ttl " + std::to_string(hop.ttl) + " follows " + std::to_string(prev_ttl)});
        prev_ttl = hop.ttl;
        for (size_t r = 0; r < hop.responders.size(); ++r) {
            const Responder& resp = hop.responders[r];
            std::string rf = hf + ".responders[" + std::to_string(r) + "]";
            if (!std::isfinite(resp.rtt_ms) || resp.rtt_ms < 0)
                errors.push_back({"rtt-finite-nonnegative", rf + ".rtt_ms",
                                  "rtt must be finite and >= 0"});
            for (double v : resp.rtts)
                if (!std::isfinite(v) || v < 0) {
                    errors.push_back({"rtt-finite-nonnegative", rf + ".rtts",
                                      "rtt must be finite and >= 0"});
                    break;
                }
            if (resp.rtts.empty())
                errors.push_back({"responder-has-probes", rf + ".rtts", "responder has no probe rtts"});
        }
    }
}

}  // namespace

std::vector<ValidationError> validate_experiment(const ExperimentRecord& rec,
                                                 const RegionScheme& scheme) {
    std::vector<ValidationError> errors;
    if (rec.app.empty()) errors.push_back({"app-nonempty", "app", "application id is empty"});
    check_vantage(rec.src, "src", scheme, errors);
    check_vantage(rec.dst, "dst", scheme, errors);

    if (rec.network_path) {
        check_measurement(*rec.network_path, "network_path", PathKind::network, errors);
        Ipv4 t = rec.network_path->target;
        if (t != rec.src.address && t != rec.dst.address)
            errors.push_back({"network-path-targets-vantage", "network_path.target",
                              to_string(t) + " is not a pair member's address"});
    }
    for (size_t i = 0; i < rec.application_legs.size(); ++i) {
        const PathMeasurement& leg = rec.application_legs[i];
        std::string field = "application_legs[" + std::to_string(i) + "]";
        check_measurement(leg, field, PathKind::leg, errors);
        if (leg.source != rec.src.id && leg.source != rec.dst.id)
            errors.push_back({"leg-source-is-pair-member", field + ".source",
                              "'" + leg.source + "' is not a pair member"});
    }

    if (rec.status == ExperimentStatus::complete) {
        if (!rec.network_path)
            errors.push_back({"complete-has-network-path", "network_path",
                              "complete experiment lacks a network path"});
        else if (rec.network_path->hops.empty())
            errors.push_back({"hops-nonempty", "network_path.hops",
                              "completed measurement has no hops"});
        for (const std::string& member : {rec.src.id, rec.dst.id}) {
            bool found = false;
            for (const PathMeasurement& leg : rec.application_legs)
                if (leg.source == member) {
                    found = true;
                    if (leg.hops.empty())
                        errors.push_back({"hops-nonempty", "application_legs",
                                          "completed leg from '" + member + "' has no hops"});
                }
            if (!found)
                errors.push_back({"complete-has-leg-per-member", "application_legs",
                                  "no application leg from pair member '" + member + "'"});
        }
    }
    return errors;
}

}  // namespace pathloc
