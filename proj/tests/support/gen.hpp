#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pathloc/flows.hpp"
#include "pathloc/model.hpp"

// Seeded random fixtures for the property suites.
namespace testsupport {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline pathloc::Ipv4 gen_ip(Rng& rng) {
    return {std::uniform_int_distribution<uint32_t>()(rng)};
}

// RTT quantized to the traceroute text precision so text round-trips are exact.
inline double gen_rtt(Rng& rng) { return pick(rng, 0, 99999) / 1000.0; }

inline std::string gen_host(Rng& rng) {
    static const char* names[] = {"gw", "core1", "edge2", "r7", "peer", "bb3"};
    return std::string(names[pick(rng, 0, 5)]) + std::to_string(pick(rng, 1, 99)) + ".example.net";
}

inline pathloc::Hop gen_hop(Rng& rng, int ttl) {
    pathloc::Hop hop;
    hop.ttl = ttl;
    int n_resp = pick(rng, 0, 3);
    std::set<uint32_t> used;
    for (int i = 0; i < n_resp; ++i) {
        pathloc::Ipv4 addr = gen_ip(rng);
        if (!used.insert(addr.value).second) continue;  // one responder per address
        std::vector<double> rtts;
        int probes = pick(rng, 1, 3);
        for (int p = 0; p < probes; ++p) rtts.push_back(gen_rtt(rng));
        std::string host = pick(rng, 0, 2) == 0 ? "" : gen_host(rng);
        hop.responders.push_back(pathloc::make_responder(addr, host, rtts));
    }
    return hop;
}

inline pathloc::PathMeasurement gen_measurement(Rng& rng) {
    pathloc::PathMeasurement m;
    m.source = "vp" + std::to_string(pick(rng, 0, 40));
    m.target = gen_ip(rng);
    m.protocol = pick(rng, 0, 1) ? pathloc::Protocol::tcp : pathloc::Protocol::udp;
    m.port = static_cast<uint16_t>(pick(rng, 1, 65535));
    m.kind = pick(rng, 0, 1) ? pathloc::PathKind::network : pathloc::PathKind::leg;
    m.timestamp = {static_cast<int64_t>(pick(rng, 0, 2000000)) * 1000 + pick(rng, 0, 999)};
    int ttl = 0;
    int n_hops = pick(rng, 1, 8);
    for (int h = 0; h < n_hops; ++h) {
        ttl += pick(rng, 1, 2);
        m.hops.push_back(gen_hop(rng, ttl));
    }
    return m;
}

inline pathloc::flows::FlowRecord gen_flow(Rng& rng, int64_t base_ms = 1443600000000) {
    pathloc::flows::FlowRecord f;
    f.src = gen_ip(rng);
    f.dst = gen_ip(rng);
    f.protocol = pick(rng, 0, 1) ? pathloc::Protocol::tcp : pathloc::Protocol::udp;
    f.src_port = static_cast<uint16_t>(pick(rng, 1024, 65535));
    f.dst_port = static_cast<uint16_t>(pick(rng, 1, 65535));
    int64_t start = base_ms + pick(rng, 0, 600000);
    f.first_seen = {start};
    f.last_seen = {start + pick(rng, 0, 30000)};
    f.packets = pick(rng, 1, 5000);
    f.bytes = f.packets * pick(rng, 1, 1400);
    int names = pick(rng, 0, 2);
    for (int i = 0; i < names; ++i) f.dns_names.insert(gen_host(rng));
    return f;
}

}  // namespace testsupport
