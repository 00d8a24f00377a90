#include "pathloc/traceparse.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <thread>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc::trace {

void ProbeSpec::validate() const {
    if (port < 1) throw schema_error("probe port must be in 1-65535");
    if (max_ttl < 1 || max_ttl > 64) throw schema_error("max_ttl must be in 1-64");
    if (probes_per_hop < 1 || probes_per_hop > 5)
        throw schema_error("probes_per_hop must be in 1-5");
    if (timeout_ms < 1) throw schema_error("timeout_ms must be positive");
}

namespace {

std::vector<std::string> whitespace_tokens(std::string_view line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

bool is_number(std::string_view tok) {
    bool digit = false, dot = false;
    for (char c : tok) {
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if (c == '.' && !dot) dot = true;
        else return false;
    }
    return digit;
}

bool paren_address(std::string_view tok, Ipv4& out) {
    if (tok.size() < 3 || tok.front() != '(' || tok.back() != ')') return false;
    auto v = try_parse_ipv4(tok.substr(1, tok.size() - 2));
    if (!v) return false;
    out = *v;
    return true;
}

// "1", "12": the leading hop counter
bool is_ttl_token(std::string_view tok, int& ttl) {
    if (tok.empty() || tok.size() > 2) return false;
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    ttl = std::stoi(std::string(tok));
    return true;
}

Responder* responder_for(Hop& hop, Ipv4 address, const std::string& host) {
    for (Responder& r : hop.responders)
        if (r.address == address) return &r;
    hop.responders.push_back({address, host, 0.0, {}});
    return &hop.responders.back();
}

void finish_responders(Hop& hop, int lineno) {
    for (Responder& r : hop.responders) {
        if (r.rtts.empty())
            throw Error("MalformedHopLine", "responder " + to_string(r.address) + " has no rtt",
                        lineno);
        r.rtt_ms = *std::min_element(r.rtts.begin(), r.rtts.end());
    }
}

}  // namespace

PathMeasurement parse_traceroute(std::string_view text, const ParseMeta& meta) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;

    PathMeasurement m;
    m.source = meta.source_id;
    m.kind = meta.kind;
    m.timestamp = meta.timestamp;
    m.protocol = meta.protocol;
    m.port = meta.port;

    bool have_header = false;
    bool any_content = false;
    int last_ttl = 0;

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        any_content = true;

        if (!have_header) {
            if (!starts_with(sv, "traceroute to "))
                throw Error("MalformedHeader", "first line is not a 'traceroute to' header", lineno);
            size_t open = sv.find('(');
            size_t close = sv.find(')', open == std::string_view::npos ? 0 : open);
            if (open == std::string_view::npos || close == std::string_view::npos)
                throw Error("MalformedHeader", "header lacks '(<ip>)' target", lineno);
            m.target = parse_ipv4(sv.substr(open + 1, close - open - 1), lineno);
            have_header = true;
            continue;
        }

        auto tokens = whitespace_tokens(sv);
        int ttl = 0;
        if (tokens.empty() || !is_ttl_token(tokens[0], ttl))
            throw Error("MalformedHopLine", "line does not start with a hop counter: '" +
                            std::string(sv) + "'", lineno);
        if (ttl <= last_ttl)
            throw Error("MalformedHopLine", "hop counter " + std::to_string(ttl) +
                            " does not increase past " + std::to_string(last_ttl), lineno);
        last_ttl = ttl;

        Hop hop;
        hop.ttl = ttl;
        Responder* current = nullptr;
        size_t i = 1;
        while (i < tokens.size()) {
            const std::string& tok = tokens[i];
            Ipv4 addr;
            if (tok == "*") {
                current = nullptr;  // unanswered probe
                ++i;
            } else if (is_number(tok) && i + 1 < tokens.size() && tokens[i + 1] == "ms") {
                if (!current)
                    throw Error("MalformedHopLine", "rtt with no responder on hop line", lineno);
                current->rtts.push_back(parse_double(tok, "rtt", lineno));
                i += 2;
            } else if (i + 1 < tokens.size() && paren_address(tokens[i + 1], addr)) {
                current = responder_for(hop, addr, tok);
                i += 2;
            } else if (auto bare = try_parse_ipv4(tok)) {
                current = responder_for(hop, *bare, "");
                ++i;
            } else if (tok.size() > 1 && tok[0] == '!') {
                ++i;  // reachability annotation (!H, !N, !P, ...), not modeled
            } else {
                throw Error("MalformedHopLine",
                            "unrecognized token '" + tok + "' in hop line", lineno);
            }
        }
        finish_responders(hop, lineno);
        m.hops.push_back(std::move(hop));
    }

    if (!any_content) throw Error("EmptyOutput", "traceroute produced no output");
    if (!have_header) throw Error("MalformedHeader", "no 'traceroute to' header found");
    return m;
}

std::string render_traceroute(const PathMeasurement& m) {
    std::string out;
    std::string target = to_string(m.target);
    int max_ttl = m.hops.empty() ? 30 : m.hops.back().ttl;
    out += "traceroute to " + target + " (" + target + "), " + std::to_string(max_ttl) +
           " hops max, 60 byte packets\n";
    char buf[64];
    for (const Hop& hop : m.hops) {
        std::snprintf(buf, sizeof buf, "%2d ", hop.ttl);
        out += buf;
        if (hop.responders.empty()) {
            out += " * * *";
        } else {
            for (const Responder& r : hop.responders) {
                if (r.host.empty())
                    out += " " + to_string(r.address);
                else
                    out += " " + r.host + " (" + to_string(r.address) + ")";
                for (double v : r.rtts) {
                    std::snprintf(buf, sizeof buf, "  %.3f ms", v);
                    out += buf;
                }
            }
        }
        out += '\n';
    }
    return out;
}

uint16_t random_high_port(const std::function<uint32_t()>& rand32) {
    // 16384 divides 2^32, so the modulus keeps the draw uniform
    return static_cast<uint16_t>(49152u + rand32() % 16384u);
}

uint16_t random_high_port() {
    static thread_local std::mt19937 rng{std::random_device{}()};
    return random_high_port([] { return rng(); });
}

std::vector<std::string> probe_argv(const ProbeSpec& spec) {
    std::vector<std::string> argv{"traceroute"};
    argv.push_back(spec.protocol == Protocol::tcp ? "-T" : "-U");
    argv.push_back("-p");
    argv.push_back(std::to_string(spec.port));
    argv.push_back("-m");
    argv.push_back(std::to_string(spec.max_ttl));
    argv.push_back("-q");
    argv.push_back(std::to_string(spec.probes_per_hop));
    argv.push_back("-w");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", spec.timeout_ms / 1000.0);
    argv.push_back(buf);
    argv.push_back(to_string(spec.target));
    return argv;
}

CommandResult SystemRunner::run(const std::vector<std::string>& argv, int timeout_ms) {
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw Error("ProbeError", "pipe() failed");

    pid_t pid = fork();
    if (pid < 0) throw Error("ProbeError", "fork() failed");
    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        std::vector<char*> cargv;
        for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    CommandResult result;
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    std::string* sinks[2] = {&result.out, &result.err};
    bool open[2] = {true, true};
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);

    while (open[0] || open[1]) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0) {
            kill(pid, SIGKILL);
            result.timed_out = true;
            break;
        }
        fds[0].events = open[0] ? POLLIN : 0;
        fds[1].events = open[1] ? POLLIN : 0;
        int rc = poll(fds, 2, static_cast<int>(std::min<int64_t>(remaining, 200)));
        if (rc < 0) break;
        for (int k = 0; k < 2; ++k) {
            if (!open[k]) continue;
            if (fds[k].revents & (POLLIN | POLLHUP)) {
                char buf[4096];
                ssize_t n = read(fds[k].fd, buf, sizeof buf);
                if (n > 0)
                    sinks[k]->append(buf, static_cast<size_t>(n));
                else
                    open[k] = false;
            }
        }
    }

    close(out_pipe[0]);
    close(err_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

PathMeasurement run_probe(const ProbeSpec& spec, const VantagePoint& source,
                          CommandRunner& runner, UtcInstant timestamp) {
    spec.validate();
    int budget_ms = spec.max_ttl * spec.timeout_ms;
    CommandResult res = runner.run(probe_argv(spec), budget_ms);
    if (res.timed_out)
        throw Error("Timeout", "probe exceeded budget of " + std::to_string(budget_ms) + " ms");
    if (res.exit_code != 0) {
        std::string err = to_lower(res.err);
        if (err.find("operation not permitted") != std::string::npos ||
            err.find("permission denied") != std::string::npos ||
            err.find("raw socket") != std::string::npos)
            throw Error("PrivilegeError", "traceroute needs elevated privileges: " + res.err);
        if (err.find("network is unreachable") != std::string::npos ||
            err.find("no route to host") != std::string::npos)
            throw Error("TargetUnreachableBeforeTTL1", res.err);
        throw Error("ProbeError", "traceroute exited " + std::to_string(res.exit_code) + ": " + res.err);
    }
    ParseMeta meta{source.id, PathKind::network, timestamp, spec.protocol, spec.port};
    PathMeasurement m = parse_traceroute(res.out, meta);
    return m;
}

std::vector<ProbeOutcome> run_probes(std::vector<ProbeSpec> specs, const VantagePoint& source,
                                     CommandRunner& runner, UtcInstant timestamp,
                                     int parallelism) {
    if (parallelism < 1) throw schema_error("parallelism must be >= 1");
    std::sort(specs.begin(), specs.end(), [](const ProbeSpec& a, const ProbeSpec& b) {
        return std::tuple(a.target, a.protocol, a.port) < std::tuple(b.target, b.protocol, b.port);
    });
    std::vector<ProbeOutcome> outcomes(specs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            ProbeOutcome& out = outcomes[i];
            out.spec = specs[i];
            try {
                out.measurement = run_probe(specs[i], source, runner, timestamp);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };
    size_t n_workers = std::min(static_cast<size_t>(parallelism), specs.size());
    std::vector<std::thread> pool;
    for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return outcomes;
}

}  // namespace pathloc::trace
