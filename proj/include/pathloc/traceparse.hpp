#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "pathloc/model.hpp"

namespace pathloc::trace {

struct ProbeSpec {
    Ipv4 target;
    Protocol protocol = Protocol::tcp;
    uint16_t port = 0;
    int max_ttl = 30;
    int probes_per_hop = 3;
    int timeout_ms = 3000;

    void validate() const;  // throws SchemaError on out-of-range fields
};

struct ParseMeta {
    std::string source_id;
    PathKind kind = PathKind::network;
    UtcInstant timestamp;
    Protocol protocol = Protocol::tcp;
    uint16_t port = 0;
};

// Parses the complete stdout of one classic traceroute invocation.
// Grammar: header "traceroute to <host> (<ip>), <N> hops max...", hop lines
// "<ttl>  <responder probes...>" where a responder is "<host> (<ip>)" or a
// bare ip, each probe is "<rtt> ms" or "*". Unclassifiable lines are
// rejected, never skipped.
// Throws EmptyOutput, MalformedHeader, MalformedHopLine.
PathMeasurement parse_traceroute(std::string_view text, const ParseMeta& meta);

// Canonical text form of a measurement; parse_traceroute inverts it.
std::string render_traceroute(const PathMeasurement& m);

// Uniform port in [49152, 65535]. rand32 supplies raw 32-bit draws so tests
// can pin the sequence.
uint16_t random_high_port(const std::function<uint32_t()>& rand32);
uint16_t random_high_port();  // seeded from std::random_device

// Abstraction over subprocess execution so probing is testable without raw
// sockets or a live network.
struct CommandResult {
    int exit_code = 0;
    std::string out;
    std::string err;
    bool timed_out = false;
};

class CommandRunner {
public:
    virtual ~CommandRunner() = default;
    virtual CommandResult run(const std::vector<std::string>& argv, int timeout_ms) = 0;
};

// fork/exec wrapper around the system traceroute binary.
class SystemRunner : public CommandRunner {
public:
    CommandResult run(const std::vector<std::string>& argv, int timeout_ms) override;
};

std::vector<std::string> probe_argv(const ProbeSpec& spec);

// Runs one forward-path probe and parses the result. Whole-probe budget is
// max_ttl * timeout_ms. Throws PrivilegeError, Timeout,
// TargetUnreachableBeforeTTL1 or the parser's errors.
PathMeasurement run_probe(const ProbeSpec& spec, const VantagePoint& source,
                          CommandRunner& runner, UtcInstant timestamp);

struct ProbeOutcome {
    ProbeSpec spec;
    std::optional<PathMeasurement> measurement;  // empty on failure
    std::string error;                           // error code + message on failure
};

// Probes several targets with up to `parallelism` in flight. Results come
// back ordered by (source, target) no matter which probe finishes first;
// per-target failures are captured, never thrown.
std::vector<ProbeOutcome> run_probes(std::vector<ProbeSpec> specs, const VantagePoint& source,
                                     CommandRunner& runner, UtcInstant timestamp,
                                     int parallelism);

}  // namespace pathloc::trace
