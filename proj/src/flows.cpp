#include "pathloc/flows.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc::flows {

namespace {

constexpr std::string_view kFlowHeader =
    "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names";

bool pattern_matches(const std::string& pattern, Ipv4 dst,
                     const std::set<std::string>& names) {
    if (auto addr = try_parse_ipv4(pattern)) return *addr == dst;
    if (!pattern.empty() && pattern[0] == '.') {
        for (const std::string& n : names)
            if (ends_with(n, pattern)) return true;
        return false;
    }
    return names.count(pattern) > 0;
}

bool any_match(const std::vector<ListEntry>& entries, const std::string& app,
               const FlowRecord& flow) {
    for (const ListEntry& e : entries)
        if (e.app == app && pattern_matches(e.pattern, flow.dst, flow.dns_names)) return true;
    return false;
}

}  // namespace

void ClassificationLists::validate() const {
    std::set<ListEntry> white(whitelist.begin(), whitelist.end());
    for (const ListEntry& e : blacklist)
        if (white.count(e))
            throw schema_error("entry '" + e.pattern + "' for app '" + e.app +
                               "' is on both whitelist and blacklist");
}

ClassificationLists load_lists(const std::string& path) {
    ClassificationLists lists;
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || line[0] == '#') continue;
        auto f = split(line, ',');
        if (f.size() != 3)
            throw schema_error("lists: expected app,<white|black>,pattern", lineno);
        std::string app(trim(f[0]));
        std::string side(trim(f[1]));
        std::string pattern(trim(f[2]));
        if (app.empty() || pattern.empty())
            throw schema_error("lists: empty app or pattern", lineno);
        if (side == "white")
            lists.whitelist.push_back({app, pattern});
        else if (side == "black")
            lists.blacklist.push_back({app, pattern});
        else
            throw schema_error("lists: side must be 'white' or 'black', got '" + side + "'", lineno);
    }
    lists.validate();
    return lists;
}

void save_lists(const std::string& path, const ClassificationLists& lists) {
    std::string out;
    for (const ListEntry& e : lists.whitelist) out += e.app + ",white," + e.pattern + "\n";
    for (const ListEntry& e : lists.blacklist) out += e.app + ",black," + e.pattern + "\n";
    write_file(path, out);
}

std::vector<FlowRecord> ingest_flow_log(std::istream& in, const std::string& name) {
    std::vector<FlowRecord> out;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!have_header) {
            if (trim(line) != kFlowHeader)
                throw schema_error(name + ": missing flow-log header", lineno);
            have_header = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 10)
            throw schema_error(name + ": expected 10 columns, got " + std::to_string(f.size()),
                               lineno);
        FlowRecord r;
        r.src = parse_ipv4(f[0], lineno);
        r.dst = parse_ipv4(f[1], lineno);
        r.protocol = parse_protocol(trim(f[2]), lineno);
        r.src_port = static_cast<uint16_t>(parse_int(f[3], 1, 65535, "src_port", lineno));
        r.dst_port = static_cast<uint16_t>(parse_int(f[4], 1, 65535, "dst_port", lineno));
        r.first_seen = parse_rfc3339(f[5], lineno);
        r.last_seen = parse_rfc3339(f[6], lineno);
        r.packets = parse_int(f[7], 1, INT64_MAX, "packets", lineno);
        r.bytes = parse_int(f[8], 1, INT64_MAX, "bytes", lineno);
        if (r.last_seen < r.first_seen)
            throw schema_error(name + ": last_seen precedes first_seen", lineno);
        if (r.bytes < r.packets)
            throw schema_error(name + ": bytes < packets", lineno);
        std::string_view names = trim(f[9]);
        if (!names.empty())
            for (const std::string& n : split(names, '|'))
                if (!n.empty()) r.dns_names.insert(n);
        out.push_back(std::move(r));
    }
    if (!have_header) throw empty_file(name + ": empty flow log");
    return out;
}

std::vector<FlowRecord> ingest_flow_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open flow log: " + path);
    return ingest_flow_log(in, path);
}

std::string render_flow_log(std::span<const FlowRecord> flv) {
    std::string out{kFlowHeader};
    out += '\n';
    for (const FlowRecord& r : flv) {
        out += to_string(r.src) + ',' + to_string(r.dst) + ',' + std::string(to_string(r.protocol)) +
               ',' + std::to_string(r.src_port) + ',' + std::to_string(r.dst_port) + ',' +
               format_rfc3339(r.first_seen) + ',' + format_rfc3339(r.last_seen) + ',' +
               std::to_string(r.packets) + ',' + std::to_string(r.bytes) + ',';
        out += join({r.dns_names.begin(), r.dns_names.end()}, "|");
        out += '\n';
    }
    return out;
}

Partition classify_flows(std::span<const FlowRecord> flv, const ClassificationLists& lists,
                         const std::string& app) {
    lists.validate();
    Partition p;
    for (const FlowRecord& flow : flv) {
        if (any_match(lists.whitelist, app, flow))
            p.messaging.push_back(flow);
        else if (any_match(lists.blacklist, app, flow))
            p.background.push_back(flow);
        else if (is_rfc1918(flow.dst))
            p.background.push_back(flow);  // testbed-internal traffic
        else
            p.unknown.push_back(flow);
    }
    return p;
}

ClassificationLists classification_loop(std::span<const FlowRecord> flv,
                                        ClassificationLists lists, const std::string& app,
                                        const DecideFn& decide, int max_iterations) {
    std::set<Ipv4> asked;
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        Partition p = classify_flows(flv, lists, app);
        if (p.unknown.empty()) return lists;

        // distinct unknown endpoints, in first-seen order
        std::vector<UnknownEndpoint> pending;
        std::set<Ipv4> seen;
        for (const FlowRecord& flow : p.unknown) {
            if (seen.count(flow.dst)) {
                for (UnknownEndpoint& e : pending)
                    if (e.address == flow.dst)
                        e.dns_names.insert(flow.dns_names.begin(), flow.dns_names.end());
                continue;
            }
            seen.insert(flow.dst);
            pending.push_back({flow.dst, flow.dns_names});
        }
        for (const UnknownEndpoint& e : pending) {
            if (asked.count(e.address))
                throw Error("NonTermination",
                            "endpoint " + to_string(e.address) + " re-presented after a decision");
            asked.insert(e.address);
            if (decide(e) == Decision::whitelist)
                lists.whitelist.push_back({app, to_string(e.address)});
            else
                lists.blacklist.push_back({app, to_string(e.address)});
        }
    }
    throw Error("NonTermination", "classification did not converge after " +
                                      std::to_string(max_iterations) + " iterations");
}

std::vector<BaselineCandidate> baseline_background(
    const std::vector<std::pair<std::string, std::vector<FlowRecord>>>& captures) {
    std::map<Ipv4, BaselineCandidate> by_dst;
    for (const auto& [label, flv] : captures) {
        for (const FlowRecord& flow : flv) {
            BaselineCandidate& c = by_dst[flow.dst];
            c.dst = flow.dst;
            c.observations += 1;
            c.per_capture[label] += 1;
            c.dns_names.insert(flow.dns_names.begin(), flow.dns_names.end());
        }
    }
    std::vector<BaselineCandidate> out;
    out.reserve(by_dst.size());
    for (auto& [dst, c] : by_dst) out.push_back(std::move(c));
    return out;
}

void MessageSchedule::validate() const {
    for (size_t i = 1; i < send_instants.size(); ++i)
        if (!(send_instants[i - 1].first < send_instants[i].first))
            throw schema_error("send instants must be strictly increasing");
    if (!send_instants.empty() && experiment_end < send_instants.back().first)
        throw schema_error("experiment end precedes last send instant");
}

Correlation correlate_messages(std::span<const FlowRecord> flv, const MessageSchedule& schedule,
                               double window_s) {
    if (!(window_s > 0)) throw schema_error("correlation window must be positive");
    schedule.validate();
    int64_t window_ms = static_cast<int64_t>(window_s * 1000.0);
    Correlation c;
    for (const FlowRecord& flow : flv) {
        bool hit = false;
        for (const auto& [when, sender] : schedule.send_instants) {
            if (flow.first_seen.ms <= when.ms + window_ms && flow.last_seen.ms >= when.ms - window_ms) {
                hit = true;
                break;
            }
        }
        (hit ? c.timer_correlated : c.uncorrelated).push_back(flow);
    }
    return c;
}

std::vector<ServiceEndpoint> extract_endpoints(std::span<const FlowRecord> messaging,
                                               const std::string& app) {
    std::map<std::tuple<Ipv4, Protocol, uint16_t>, ServiceEndpoint> by_key;
    for (const FlowRecord& flow : messaging) {
        auto key = std::tuple(flow.dst, flow.protocol, flow.dst_port);
        ServiceEndpoint& e = by_key[key];
        e.address = flow.dst;
        e.protocol = flow.protocol;
        e.port = flow.dst_port;
        e.app = app;
        e.dns_names.insert(flow.dns_names.begin(), flow.dns_names.end());
    }
    std::vector<ServiceEndpoint> out;
    out.reserve(by_key.size());
    for (auto& [key, e] : by_key) out.push_back(std::move(e));
    return out;
}

std::vector<std::pair<std::string, Ipv4>> FlowResolutionSource::bindings() const {
    std::vector<std::pair<std::string, Ipv4>> out;
    for (const FlowRecord& flow : flows_)
        for (const std::string& name : flow.dns_names) out.emplace_back(name, flow.dst);
    return out;
}

NameMap resolution_snapshot(const ResolutionSource& source) {
    NameMap map;
    for (const auto& [name, addr] : source.bindings()) map[name].insert(addr);
    return map;
}

std::vector<std::string> split_horizon_names(const std::map<std::string, NameMap>& by_vantage) {
    std::set<std::string> all_names;
    for (const auto& [vantage, map] : by_vantage)
        for (const auto& [name, addrs] : map) all_names.insert(name);

    std::vector<std::string> out;
    for (const std::string& name : all_names) {
        const std::set<Ipv4>* first = nullptr;
        bool differs = false;
        for (const auto& [vantage, map] : by_vantage) {
            auto it = map.find(name);
            if (it == map.end()) continue;  // unseen from this vantage; not a conflict
            if (!first)
                first = &it->second;
            else if (*first != it->second)
                differs = true;
        }
        if (differs) out.push_back(name);
    }
    return out;
}

}  // namespace pathloc::flows
