#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathloc/campaign.hpp"
#include "pathloc/error.hpp"
#include "pathloc/flows.hpp"
#include "pathloc/geodb.hpp"
#include "pathloc/locality.hpp"
#include "pathloc/model.hpp"
#include "pathloc/report.hpp"
#include "pathloc/strings.hpp"
#include "pathloc/traceparse.hpp"

namespace {

using namespace pathloc;

// exit codes: 0 ok, 1 runtime failure, 2 input schema error, 3 partial campaign
constexpr int kExitError = 1;
constexpr int kExitSchema = 2;
constexpr int kExitPartialCampaign = 3;

bool is_schema_code(const std::string& code) {
    static const std::set<std::string> codes{
        "SchemaError",   "VersionMismatch", "EmptyFile",      "EmptyOutput",
        "MalformedHeader", "MalformedHopLine", "OverlapError", "UnknownCountry",
        "MissingCentroid", "ZeroTotal",     "TooFewPoints",   "NonTermination"};
    return codes.count(code) > 0;
}

void print_error(const std::string& code, const std::string& message) {
    nlohmann::ordered_json j{{"error", code}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

std::string data_dir() {
    const char* env = std::getenv("PATHLOC_DATA_DIR");
    return env && *env ? env : "data";
}

std::string data_default(const std::string& name) {
    return (std::filesystem::path(data_dir()) / name).string();
}

UtcInstant now_utc() {
    using namespace std::chrono;
    return {duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()};
}

struct GeoInputs {
    std::string ranges;
    std::string overrides;
    std::string centroids;
    std::string scheme;
};

geo::GeoDb load_db(const GeoInputs& in, RegionScheme& scheme_out) {
    scheme_out = report::load_region_scheme(in.scheme);
    return geo::load_geodb(in.ranges, in.overrides, in.centroids, scheme_out);
}

int cmd_probe(const std::string& target, const std::string& proto, const std::string& port,
              int max_ttl, int probes, int timeout_ms, const std::string& source_id,
              const std::string& kind, const std::string& out) {
    trace::ProbeSpec spec;
    spec.target = parse_ipv4(target);
    spec.protocol = parse_protocol(proto);
    spec.port = port == "random-high"
                    ? trace::random_high_port()
                    : static_cast<uint16_t>(parse_int(port, 1, 65535, "port"));
    spec.max_ttl = max_ttl;
    spec.probes_per_hop = probes;
    spec.timeout_ms = timeout_ms;

    trace::SystemRunner runner;
    VantagePoint source{source_id, "", "", {}};
    PathMeasurement m = trace::run_probe(spec, source, runner, now_utc());
    m.kind = parse_path_kind(kind);
    report::save_measurements(out, {&m, 1});
    std::cerr << "wrote 1 measurement (" << m.hops.size() << " hops) to " << out << "\n";
    return 0;
}

int cmd_parse(const std::vector<std::string>& files, const std::string& source_id,
              const std::string& kind, const std::string& timestamp, const std::string& proto,
              uint16_t port, const std::string& out) {
    trace::ParseMeta meta;
    meta.source_id = source_id;
    meta.kind = parse_path_kind(kind);
    meta.timestamp = timestamp.empty() ? now_utc() : parse_rfc3339(timestamp);
    meta.protocol = parse_protocol(proto);
    meta.port = port;

    std::vector<PathMeasurement> measurements;
    for (const std::string& file : files) {
        std::string text = read_file(file);
        if (trim(text).empty()) throw Error("EmptyOutput", file + " is empty");
        measurements.push_back(trace::parse_traceroute(text, meta));
    }
    report::save_measurements(out, measurements);
    std::cerr << "parsed " << measurements.size() << " measurement(s) to " << out << "\n";
    return 0;
}

int cmd_classify(const std::string& flows_path, const std::string& lists_path,
                 const std::string& app, bool interactive, const std::string& out_dir,
                 const std::string& out_lists, const std::string& correlate_t0,
                 const std::string& correlate_offsets, double window_s,
                 const std::string& out_partition) {
    auto records = flows::ingest_flow_log(flows_path);
    auto lists = flows::load_lists(lists_path);

    if (interactive) {
        lists = flows::classification_loop(records, lists, app, [](const flows::UnknownEndpoint& e) {
            std::cerr << "endpoint " << to_string(e.address);
            if (!e.dns_names.empty())
                std::cerr << " (" << join({e.dns_names.begin(), e.dns_names.end()}, ", ") << ")";
            std::cerr << " [w=whitelist/b=blacklist]? " << std::flush;
            std::string answer;
            while (std::getline(std::cin, answer)) {
                auto t = trim(answer);
                if (t == "w" || t == "white" || t == "whitelist") return flows::Decision::whitelist;
                if (t == "b" || t == "black" || t == "blacklist") return flows::Decision::blacklist;
                std::cerr << "please answer w or b: " << std::flush;
            }
            throw Error("NonTermination", "stdin closed during interactive classification");
        });
    }

    flows::Partition p = flows::classify_flows(records, lists, app);
    std::filesystem::create_directories(out_dir);
    auto dir = std::filesystem::path(out_dir);
    write_file((dir / "messaging.csv").string(), flows::render_flow_log(p.messaging));
    write_file((dir / "background.csv").string(), flows::render_flow_log(p.background));
    write_file((dir / "unknown.csv").string(), flows::render_flow_log(p.unknown));
    if (!out_lists.empty()) flows::save_lists(out_lists, lists);
    if (!out_partition.empty()) report::save_flow_partition(out_partition, p);

    std::cerr << "messaging " << p.messaging.size() << ", background " << p.background.size()
              << ", unknown " << p.unknown.size() << "\n";

    // optional message-timer correlation of the messaging partition
    if (!correlate_t0.empty()) {
        flows::MessageSchedule schedule;
        UtcInstant t0 = parse_rfc3339(correlate_t0);
        int i = 0;
        for (const std::string& offset : split(correlate_offsets, ','))
            schedule.send_instants.emplace_back(
                t0.plus_seconds(parse_double(trim(offset), "send offset")),
                i++ % 2 == 0 ? "a" : "b");
        if (schedule.send_instants.empty())
            throw schema_error("--correlate-offsets must list at least one send offset");
        schedule.experiment_end = schedule.send_instants.back().first.plus_seconds(620);
        auto correlation = flows::correlate_messages(p.messaging, schedule, window_s);
        write_file((dir / "messaging_correlated.csv").string(),
                   flows::render_flow_log(correlation.timer_correlated));
        write_file((dir / "messaging_uncorrelated.csv").string(),
                   flows::render_flow_log(correlation.uncorrelated));
        std::cerr << "correlated " << correlation.timer_correlated.size() << " of "
                  << p.messaging.size() << " messaging flow(s) within " << window_s << " s\n";
    }
    return 0;
}

int cmd_geolocate(const GeoInputs& geo_in, const std::vector<std::string>& inputs,
                  const std::string& out, const std::string& flags_out,
                  const std::string& source_country, double speed) {
    RegionScheme scheme;
    geo::GeoDb db = load_db(geo_in, scheme);

    std::vector<locality::ExperimentGeoView> views;
    std::vector<locality::GeoPath> paths;
    std::string flags_csv = "app,source,target,kind,ttl,ip,country,rtt_ms,distance_km,limit_km\n";
    size_t n_flags = 0;
    size_t unresolved = 0;

    auto flag_measurement = [&](const PathMeasurement& m, const std::string& country,
                                const std::string& app) {
        for (const geo::PlausibilityFlag& f : geo::rtt_plausibility(m, db, country, speed)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1f,%.1f,%.1f", f.rtt_ms, f.distance_km, f.limit_km);
            flags_csv += app + "," + m.source + "," + to_string(m.target) + "," +
                         std::string(to_string(m.kind)) + "," + std::to_string(f.ttl) + "," +
                         to_string(f.address) + "," + f.country + "," + buf + "\n";
            ++n_flags;
        }
    };

    for (const std::string& input : inputs) {
        report::FileKind kind = report::peek_kind(input);
        if (kind == report::FileKind::experiments) {
            for (const ExperimentRecord& rec : report::load_experiments(input)) {
                if (rec.status != ExperimentStatus::complete) {
                    std::cerr << "skipping " << std::string(to_string(rec.status)) << " experiment "
                              << rec.app << " " << rec.src.id << "-" << rec.dst.id << "\n";
                    continue;
                }
                locality::ExperimentGeoView view = locality::geolocate_experiment(rec, db);
                unresolved += static_cast<size_t>(view.network.unresolved_hops);
                for (const locality::GeoPath& p : view.application)
                    unresolved += static_cast<size_t>(p.unresolved_hops);
                flag_measurement(*rec.network_path, rec.src.country, rec.app);
                for (const PathMeasurement& leg : rec.application_legs)
                    flag_measurement(leg, leg.source == rec.src.id ? rec.src.country : rec.dst.country,
                                     rec.app);
                views.push_back(std::move(view));
            }
        } else if (kind == report::FileKind::measurements) {
            if (source_country.empty())
                throw schema_error("--source-country is required for measurement inputs");
            for (const PathMeasurement& m : report::load_measurements(input)) {
                locality::GeoPath p = locality::geolocate_path(m, db, source_country);
                unresolved += static_cast<size_t>(p.unresolved_hops);
                flag_measurement(m, source_country, "");
                paths.push_back(std::move(p));
            }
        } else {
            throw schema_error(input + ": expected experiments or measurements input");
        }
    }

    if (!views.empty() && !paths.empty())
        throw schema_error("cannot mix experiment and measurement inputs in one run");
    if (!views.empty())
        report::save_views(out, views);
    else
        report::save_geopaths(out, paths);
    if (!flags_out.empty()) write_file(flags_out, flags_csv);

    std::cerr << "geolocated " << (views.empty() ? paths.size() : views.size()) << " item(s), "
              << unresolved << " unresolved hop(s), " << n_flags << " plausibility flag(s)\n";
    return 0;
}

int cmd_analyze(const std::string& scheme_path, const std::string& groups_path,
                const std::vector<std::string>& inputs, const std::string& out_locality,
                const std::string& out_jurisdiction) {
    RegionScheme scheme = report::load_region_scheme(scheme_path);
    auto groups = report::load_interest_groups(groups_path, scheme);

    std::vector<locality::ExperimentGeoView> views;
    for (const std::string& input : inputs) {
        auto batch = report::load_views(input);
        views.insert(views.end(), batch.begin(), batch.end());
    }
    std::set<std::string> app_set;
    for (const auto& v : views) app_set.insert(v.app);
    std::vector<std::string> apps{app_set.begin(), app_set.end()};

    auto locality_rows = locality::aggregate_locality(views, scheme, apps);
    auto jurisdiction_rows = locality::aggregate_jurisdiction(views, scheme, groups, apps);
    report::save_locality_rows(out_locality, locality_rows);
    report::save_jurisdiction_rows(out_jurisdiction, jurisdiction_rows);
    std::cerr << "analyzed " << views.size() << " views into " << locality_rows.size()
              << " locality rows, " << jurisdiction_rows.size() << " jurisdiction rows\n";
    return 0;
}

int cmd_report(const std::string& input, const std::string& format, const std::string& out,
               bool keep_zero_groups) {
    report::Format fmt = report::parse_format(format);
    report::FileKind kind = report::peek_kind(input);
    std::string document;
    if (kind == report::FileKind::locality_rows) {
        auto rows = report::load_locality_rows(input);
        document = report::emit_locality(rows, fmt);
    } else if (kind == report::FileKind::jurisdiction_rows) {
        auto rows = report::load_jurisdiction_rows(input);
        document = report::emit_jurisdiction(rows, fmt, !keep_zero_groups);
    } else {
        throw schema_error(input + ": expected locality_rows or jurisdiction_rows input");
    }
    if (out.empty() || out == "-")
        std::cout << document;
    else
        write_file(out, document);
    return 0;
}

int cmd_campaign_run(const std::string& config_path, const std::string& out_dir, bool resume) {
    campaign::CampaignConfig config = campaign::load_campaign_config(config_path);
    if (config.executor != "replay")
        throw Error("ExecutorError",
                    "only the replay executor is available in this build; live probing runs "
                    "through 'pathloc probe'");
    campaign::ReplayExecutor executor(config.fixture_files);
    campaign::CampaignResult result = campaign::run_campaign(config, executor, out_dir, resume);
    std::cerr << "campaign: " << result.records.size() << " records, " << result.failed_slots
              << " failed, " << result.retried_slots << " retried, " << result.skipped_slots
              << " skipped (journal)\n";
    if (result.failed_slots > 0) {
        print_error("PartialCampaign",
                    std::to_string(result.failed_slots) + " slot(s) failed; see failures.log");
        return kExitPartialCampaign;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathloc: forward-path measurement and messaging traffic locality analysis"};
    app.require_subcommand(1);

    // probe
    auto* probe = app.add_subcommand("probe", "run one forward-path probe via traceroute");
    std::string probe_target, probe_proto = "tcp", probe_port = "random-high";
    std::string probe_source = "local", probe_kind = "network", probe_out = "measurements.jsonl";
    int probe_ttl = 30, probe_q = 3, probe_timeout = 3000;
    probe->add_option("--target", probe_target, "target IPv4 address")->required();
    probe->add_option("--proto", probe_proto, "tcp|udp")->check(CLI::IsMember({"tcp", "udp"}));
    probe->add_option("--port", probe_port, "port number or 'random-high'");
    probe->add_option("--max-ttl", probe_ttl, "maximum TTL (1-64)");
    probe->add_option("--probes", probe_q, "probes per hop (1-5)");
    probe->add_option("--timeout-ms", probe_timeout, "per-hop timeout in ms");
    probe->add_option("--source-id", probe_source, "vantage id recorded as measurement source");
    probe->add_option("--kind", probe_kind, "network|leg")->check(CLI::IsMember({"network", "leg"}));
    probe->add_option("--out", probe_out, "output measurements file");

    // parse
    auto* parse = app.add_subcommand("parse", "parse traceroute text files into measurements");
    std::vector<std::string> parse_files;
    std::string parse_source, parse_kind = "network", parse_ts, parse_proto = "tcp";
    std::string parse_out = "measurements.jsonl";
    uint16_t parse_port = 0;
    parse->add_option("files", parse_files, "traceroute output files")->required()->expected(-1);
    parse->add_option("--source-id", parse_source, "vantage id of the probing host")->required();
    parse->add_option("--kind", parse_kind, "network|leg")->check(CLI::IsMember({"network", "leg"}));
    parse->add_option("--timestamp", parse_ts, "RFC 3339 measurement time (default: now)");
    parse->add_option("--proto", parse_proto, "tcp|udp")->check(CLI::IsMember({"tcp", "udp"}));
    parse->add_option("--port", parse_port, "probed port");
    parse->add_option("--out", parse_out, "output measurements file");

    // classify
    auto* classify = app.add_subcommand("classify", "split a flow log into messaging/background/unknown");
    std::string cls_flows, cls_lists, cls_app, cls_out_dir = ".", cls_out_lists;
    std::string cls_t0, cls_offsets = "0,5,10,15", cls_out_partition;
    double cls_window = 2.0;
    bool cls_interactive = false;
    classify->add_option("--flows", cls_flows, "flow-log CSV")->required();
    classify->add_option("--lists", cls_lists, "classification lists file")->required();
    classify->add_option("--app", cls_app, "application under test")->required();
    classify->add_flag("--interactive", cls_interactive, "prompt for unknown endpoints");
    classify->add_option("--out-dir", cls_out_dir, "directory for partition CSVs");
    classify->add_option("--out-lists", cls_out_lists, "write augmented lists here");
    classify->add_option("--out-partition", cls_out_partition,
                         "also write the partition as one tagged jsonl file");
    classify->add_option("--correlate-t0", cls_t0,
                         "first send instant (RFC 3339); enables timer correlation");
    classify->add_option("--correlate-offsets", cls_offsets,
                         "comma-separated send offsets in seconds");
    classify->add_option("--window", cls_window, "correlation window around each send (s)");

    // geolocate
    auto* geol = app.add_subcommand("geolocate", "map measurements or experiments to country paths");
    GeoInputs geo_in{data_default("fixtures/campaign28/ranges.csv"), data_default("overrides.csv"),
                     data_default("centroids.csv"), data_default("regions.csv")};
    std::vector<std::string> geo_inputs;
    std::string geo_out = "views.jsonl", geo_flags_out, geo_source_country;
    double geo_speed = 100.0;
    geol->add_option("--db", geo_in.ranges, "ranges CSV (ip_from,ip_to,country,name)");
    geol->add_option("--overrides", geo_in.overrides, "override CSV (cidr,country)");
    geol->add_option("--centroids", geo_in.centroids, "centroid CSV (country,lat,lon)");
    geol->add_option("--scheme", geo_in.scheme, "region scheme CSV");
    geol->add_option("inputs", geo_inputs, "experiments or measurements files")->required()->expected(-1);
    geol->add_option("--out", geo_out, "output views/geopaths file");
    geol->add_option("--flags-out", geo_flags_out, "write RTT plausibility flags CSV");
    geol->add_option("--source-country", geo_source_country,
                     "source country for raw measurement inputs");
    geol->add_option("--speed", geo_speed, "plausibility speed in km per RTT ms");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "aggregate views into locality and jurisdiction rows");
    std::string an_scheme = data_default("regions.csv"), an_groups = data_default("groups.csv");
    std::vector<std::string> an_inputs;
    std::string an_out_loc = "locality_rows.jsonl", an_out_jur = "jurisdiction_rows.jsonl";
    analyze->add_option("--scheme", an_scheme, "region scheme CSV");
    analyze->add_option("--groups", an_groups, "interest groups CSV");
    analyze->add_option("inputs", an_inputs, "views files")->required()->expected(-1);
    analyze->add_option("--out-locality", an_out_loc, "locality rows output");
    analyze->add_option("--out-jurisdiction", an_out_jur, "jurisdiction rows output");

    // report
    auto* rep = app.add_subcommand("report", "render row files as CSV or markdown tables");
    std::string rep_input, rep_format = "csv", rep_out;
    bool rep_keep_zero = false;
    rep->add_option("input", rep_input, "locality or jurisdiction rows file")->required();
    rep->add_option("--format", rep_format, "csv|markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));
    rep->add_option("--out", rep_out, "output file (default: stdout)");
    rep->add_flag("--keep-zero-groups", rep_keep_zero, "emit groups with zero accessibility");

    // campaign
    auto* camp = app.add_subcommand("campaign", "measurement campaign orchestration");
    auto* camp_run = camp->add_subcommand("run", "run a campaign from a config file");
    std::string camp_config, camp_out = "campaign-out";
    bool camp_resume = false;
    camp_run->add_option("--config", camp_config, "campaign config JSON")->required();
    camp_run->add_option("--out-dir", camp_out, "output directory (journal, records)");
    camp_run->add_flag("--resume", camp_resume, "skip slots already terminal in the journal");
    camp->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (probe->parsed())
            return cmd_probe(probe_target, probe_proto, probe_port, probe_ttl, probe_q,
                             probe_timeout, probe_source, probe_kind, probe_out);
        if (parse->parsed())
            return cmd_parse(parse_files, parse_source, parse_kind, parse_ts, parse_proto,
                             parse_port, parse_out);
        if (classify->parsed())
            return cmd_classify(cls_flows, cls_lists, cls_app, cls_interactive, cls_out_dir,
                                cls_out_lists, cls_t0, cls_offsets, cls_window, cls_out_partition);
        if (geol->parsed())
            return cmd_geolocate(geo_in, geo_inputs, geo_out, geo_flags_out, geo_source_country,
                                 geo_speed);
        if (analyze->parsed())
            return cmd_analyze(an_scheme, an_groups, an_inputs, an_out_loc, an_out_jur);
        if (rep->parsed())
            return cmd_report(rep_input, rep_format, rep_out, rep_keep_zero);
        if (camp->parsed() && camp_run->parsed())
            return cmd_campaign_run(camp_config, camp_out, camp_resume);
    } catch (const Error& e) {
        print_error(e.code(), e.what());
        return is_schema_code(e.code()) ? kExitSchema : kExitError;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return kExitError;
    }
    return 0;
}
