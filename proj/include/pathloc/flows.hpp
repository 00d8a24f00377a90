#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pathloc/model.hpp"

namespace pathloc::flows {

// One observed network flow from a capture-derived flow log.
struct FlowRecord {
    Ipv4 src;
    Ipv4 dst;
    Protocol protocol = Protocol::tcp;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    UtcInstant first_seen;
    UtcInstant last_seen;
    int64_t packets = 0;
    int64_t bytes = 0;
    std::set<std::string> dns_names;  // names observed resolving to dst

    bool operator==(const FlowRecord&) const = default;
};

// List entry patterns: exact address ("84.21.0.5"), exact dns name, or a
// dns suffix starting with '.' (".whatsapp.net").
struct ListEntry {
    std::string app;
    std::string pattern;

    bool operator==(const ListEntry&) const = default;
    auto operator<=>(const ListEntry&) const = default;
};

struct ClassificationLists {
    std::vector<ListEntry> whitelist;
    std::vector<ListEntry> blacklist;

    // Throws SchemaError when a (app, pattern) sits on both lists.
    void validate() const;
    bool operator==(const ClassificationLists&) const = default;
};

// Lists file: one entry per line, "<app>,<white|black>,<addr|name|.suffix>".
ClassificationLists load_lists(const std::string& path);
void save_lists(const std::string& path, const ClassificationLists& lists);

// Flow-log CSV with the required header
// src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names
// (proto tcp|udp, RFC 3339 UTC timestamps, '|'-separated dns names).
std::vector<FlowRecord> ingest_flow_log(const std::string& path);
std::vector<FlowRecord> ingest_flow_log(std::istream& in, const std::string& name);
std::string render_flow_log(std::span<const FlowRecord> flv);

struct Partition {
    std::vector<FlowRecord> messaging;
    std::vector<FlowRecord> background;
    std::vector<FlowRecord> unknown;
};

// whitelist match -> messaging, blacklist match -> background, RFC 1918
// destinations -> background (testbed-internal), everything else unknown.
Partition classify_flows(std::span<const FlowRecord> flv,
                         const ClassificationLists& lists,
                         const std::string& app);

// Endpoint as presented to the manual classifier callback.
struct UnknownEndpoint {
    Ipv4 address;
    std::set<std::string> dns_names;
};

enum class Decision { whitelist, blacklist };

using DecideFn = std::function<Decision(const UnknownEndpoint&)>;

// Reclassifies until no unknown endpoints remain, asking decide exactly once
// per distinct unknown destination address. Throws NonTermination after
// max_iterations passes.
ClassificationLists classification_loop(std::span<const FlowRecord> flv,
                                        ClassificationLists lists,
                                        const std::string& app,
                                        const DecideFn& decide,
                                        int max_iterations = 100);

// Candidate blacklist entry distilled from app-less captures.
struct BaselineCandidate {
    Ipv4 dst;
    int64_t observations = 0;
    std::map<std::string, int64_t> per_capture;  // capture label -> count
    std::set<std::string> dns_names;

    bool operator==(const BaselineCandidate&) const = default;
};

// captures: (label, flows recorded with no app under test running).
std::vector<BaselineCandidate> baseline_background(
    const std::vector<std::pair<std::string, std::vector<FlowRecord>>>& captures);

struct MessageSchedule {
    std::vector<std::pair<UtcInstant, std::string>> send_instants;  // (when, sender id)
    UtcInstant experiment_end;

    void validate() const;  // strictly increasing instants, end >= last send
};

struct Correlation {
    std::vector<FlowRecord> timer_correlated;
    std::vector<FlowRecord> uncorrelated;
};

// A flow correlates when [first_seen, last_seen] intersects
// [t - window_s, t + window_s] for some send instant t.
Correlation correlate_messages(std::span<const FlowRecord> flv,
                               const MessageSchedule& schedule,
                               double window_s);

// One endpoint per distinct (dst, protocol, dst_port); dns names unioned.
std::vector<ServiceEndpoint> extract_endpoints(std::span<const FlowRecord> messaging,
                                               const std::string& app);

// Source of observed (name, address) bindings. The default implementation
// reads them off flow records; nonstandard resolution channels (e.g. a
// DNS-over-HTTP cache) plug in behind the same interface.
class ResolutionSource {
public:
    virtual ~ResolutionSource() = default;
    virtual std::vector<std::pair<std::string, Ipv4>> bindings() const = 0;
};

class FlowResolutionSource : public ResolutionSource {
public:
    explicit FlowResolutionSource(std::vector<FlowRecord> flv) : flows_(std::move(flv)) {}
    std::vector<std::pair<std::string, Ipv4>> bindings() const override;

private:
    std::vector<FlowRecord> flows_;
};

using NameMap = std::map<std::string, std::set<Ipv4>>;

// Snapshot of name resolution as seen from one vantage.
NameMap resolution_snapshot(const ResolutionSource& source);

// Names that resolve to different address sets across vantages
// (split-horizon detection). Input: vantage id -> snapshot.
std::vector<std::string> split_horizon_names(const std::map<std::string, NameMap>& by_vantage);

}  // namespace pathloc::flows
