#include "pathloc/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pathloc/error.hpp"
#include "pathloc/strings.hpp"

namespace pathloc::report {

using json = nlohmann::ordered_json;

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "markdown" || s == "md") return Format::markdown;
    throw schema_error("unknown report format: '" + std::string(s) + "'");
}

namespace {

constexpr int kFormatVersion = 1;

std::string region_cell(const std::string& region, const std::string& parent) {
    return parent.empty() ? region : region + " (" + parent + ")";
}

std::vector<std::string> sorted_apps_locality(std::span<const locality::LocalityRow> rows) {
    std::set<std::string> apps;
    for (const auto& row : rows)
        for (const auto& [app, pct] : row.per_app_leaving_pct) apps.insert(app);
    return {apps.begin(), apps.end()};
}

std::vector<std::string> sorted_apps_jurisdiction(std::span<const locality::JurisdictionRow> rows) {
    std::set<std::string> apps;
    for (const auto& row : rows)
        for (const auto& [app, n] : row.per_app_accessible) apps.insert(app);
    return {apps.begin(), apps.end()};
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& cells, Format format) {
    std::string out;
    if (format == Format::csv) {
        out += join(header, ",") + "\n";
        for (const auto& row : cells) out += join(row, ",") + "\n";
        return out;
    }
    out += "| " + join(header, " | ") + " |\n";
    out += "|";
    for (size_t i = 0; i < header.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& row : cells) out += "| " + join(row, " | ") + " |\n";
    return out;
}

}  // namespace

std::string emit_locality(std::span<const locality::LocalityRow> rows, Format format) {
    if (rows.empty()) throw schema_error("no locality rows to emit");
    auto apps = sorted_apps_locality(rows);

    std::vector<std::string> header{"region", "n_measurements", "network_leaving_n",
                                    "network_leaving_pct"};
    for (const auto& app : apps) header.push_back(app + "_pct");

    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        std::vector<std::string> line;
        std::string cell = region_cell(row.region, row.parent_region);
        if (format == Format::markdown && !row.parent_region.empty()) cell = "  " + cell;
        line.push_back(cell);
        line.push_back(std::to_string(row.n_measurements));
        line.push_back(std::to_string(row.network_leaving));
        line.push_back(std::to_string(
            row.n_measurements == 0 ? 0 : locality::percent(row.network_leaving, row.n_measurements)));
        for (const auto& app : apps) {
            auto it = row.per_app_leaving_pct.find(app);
            line.push_back(std::to_string(it == row.per_app_leaving_pct.end() ? 0 : it->second));
        }
        cells.push_back(std::move(line));
    }
    return render_table(header, cells, format);
}

std::string emit_jurisdiction(std::span<const locality::JurisdictionRow> rows, Format format,
                              bool suppress_all_zero_groups) {
    if (rows.empty()) throw schema_error("no jurisdiction rows to emit");
    auto apps = sorted_apps_jurisdiction(rows);

    std::set<std::string> live_groups;
    for (const auto& row : rows) {
        bool any = row.network_accessible > 0;
        for (const auto& [app, n] : row.per_app_accessible) any = any || n > 0;
        if (any) live_groups.insert(row.group);
    }

    std::vector<std::string> header{"region", "group", "n_total", "network_n", "network_pct"};
    for (const auto& app : apps) {
        header.push_back(app + "_n");
        header.push_back(app + "_pct");
    }

    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        if (suppress_all_zero_groups && !live_groups.count(row.group)) continue;
        std::vector<std::string> line;
        std::string cell = region_cell(row.region, row.parent_region);
        if (format == Format::markdown && !row.parent_region.empty()) cell = "  " + cell;
        line.push_back(cell);
        line.push_back(row.group);
        line.push_back(std::to_string(row.n_total));
        line.push_back(std::to_string(row.network_accessible));
        line.push_back(std::to_string(
            row.n_total == 0 ? 0 : locality::percent(row.network_accessible, row.n_total)));
        for (const auto& app : apps) {
            auto it = row.per_app_accessible.find(app);
            int n = it == row.per_app_accessible.end() ? 0 : it->second;
            line.push_back(std::to_string(n));
            line.push_back(std::to_string(row.n_total == 0 ? 0 : locality::percent(n, row.n_total)));
        }
        cells.push_back(std::move(line));
    }
    if (cells.empty()) throw schema_error("all jurisdiction groups suppressed; nothing to emit");
    return render_table(header, cells, format);
}

// ---------------------------------------------------------------------------
// persistence

std::string_view to_string(FileKind k) {
    switch (k) {
        case FileKind::measurements: return "measurements";
        case FileKind::experiments: return "experiments";
        case FileKind::views: return "views";
        case FileKind::geopaths: return "geopaths";
        case FileKind::locality_rows: return "locality_rows";
        case FileKind::jurisdiction_rows: return "jurisdiction_rows";
        case FileKind::flow_partition: return "flow_partition";
    }
    return "measurements";
}

namespace {

FileKind parse_kind(std::string_view s, int line) {
    for (FileKind k : {FileKind::measurements, FileKind::experiments, FileKind::views,
                       FileKind::geopaths, FileKind::locality_rows, FileKind::jurisdiction_rows,
                       FileKind::flow_partition})
        if (to_string(k) == s) return k;
    throw schema_error("unknown file kind '" + std::string(s) + "'", line);
}

std::string header_line(FileKind kind) {
    return "#pathloc v=" + std::to_string(kFormatVersion) + " kind=" + std::string(to_string(kind));
}

FileKind parse_header(const std::string& line, const std::string& path) {
    auto tokens = split(std::string(trim(line)), ' ');
    if (tokens.size() != 3 || tokens[0] != "#pathloc" || !starts_with(tokens[1], "v=") ||
        !starts_with(tokens[2], "kind="))
        throw schema_error(path + ": missing '#pathloc v=<n> kind=<kind>' header", 1);
    int version = static_cast<int>(parse_int(tokens[1].substr(2), 0, 1000000, "version", 1));
    if (version != kFormatVersion)
        throw version_mismatch(path + ": file version " + std::to_string(version) +
                               ", supported version " + std::to_string(kFormatVersion));
    return parse_kind(tokens[2].substr(5), 1);
}

json vantage_to_json(const VantagePoint& vp) {
    return json{{"id", vp.id},
                {"country", vp.country},
                {"hostname", vp.hostname},
                {"addr", to_string(vp.address)}};
}

VantagePoint vantage_from_json(const json& j, int line) {
    VantagePoint vp;
    vp.id = j.at("id").get<std::string>();
    vp.country = j.at("country").get<std::string>();
    vp.hostname = j.at("hostname").get<std::string>();
    vp.address = parse_ipv4(j.at("addr").get<std::string>(), line);
    return vp;
}

json measurement_to_json(const PathMeasurement& m) {
    json hops = json::array();
    for (const Hop& hop : m.hops) {
        json resp = json::array();
        for (const Responder& r : hop.responders) {
            json o{{"ip", to_string(r.address)}};
            if (!r.host.empty()) o["host"] = r.host;
            o["rtts"] = r.rtts;
            resp.push_back(std::move(o));
        }
        hops.push_back(json{{"ttl", hop.ttl}, {"resp", std::move(resp)}});
    }
    return json{{"source", m.source},
                {"kind", std::string(to_string(m.kind))},
                {"proto", std::string(to_string(m.protocol))},
                {"port", m.port},
                {"target", to_string(m.target)},
                {"ts", format_rfc3339(m.timestamp)},
                {"hops", std::move(hops)}};
}

PathMeasurement measurement_from_json(const json& j, int line) {
    PathMeasurement m;
    m.source = j.at("source").get<std::string>();
    m.kind = parse_path_kind(j.at("kind").get<std::string>(), line);
    m.protocol = parse_protocol(j.at("proto").get<std::string>(), line);
    m.port = static_cast<uint16_t>(j.at("port").get<int>());
    m.target = parse_ipv4(j.at("target").get<std::string>(), line);
    m.timestamp = parse_rfc3339(j.at("ts").get<std::string>(), line);
    for (const json& hj : j.at("hops")) {
        Hop hop;
        hop.ttl = hj.at("ttl").get<int>();
        for (const json& rj : hj.at("resp")) {
            std::string host = rj.contains("host") ? rj.at("host").get<std::string>() : "";
            hop.responders.push_back(make_responder(
                parse_ipv4(rj.at("ip").get<std::string>(), line), host,
                rj.at("rtts").get<std::vector<double>>()));
        }
        m.hops.push_back(std::move(hop));
    }
    return m;
}

json experiment_to_json(const ExperimentRecord& rec) {
    json j{{"app", rec.app},
           {"src", vantage_to_json(rec.src)},
           {"dst", vantage_to_json(rec.dst)},
           {"status", std::string(to_string(rec.status))}};
    j["network"] = rec.network_path ? measurement_to_json(*rec.network_path) : json(nullptr);
    json legs = json::array();
    for (const PathMeasurement& leg : rec.application_legs) legs.push_back(measurement_to_json(leg));
    j["legs"] = std::move(legs);
    return j;
}

ExperimentRecord experiment_from_json(const json& j, int line) {
    ExperimentRecord rec;
    rec.app = j.at("app").get<std::string>();
    rec.src = vantage_from_json(j.at("src"), line);
    rec.dst = vantage_from_json(j.at("dst"), line);
    rec.status = parse_status(j.at("status").get<std::string>(), line);
    if (!j.at("network").is_null()) rec.network_path = measurement_from_json(j.at("network"), line);
    for (const json& lj : j.at("legs")) rec.application_legs.push_back(measurement_from_json(lj, line));
    return rec;
}

json geopath_to_json(const locality::GeoPath& p) {
    return json{{"source", p.source},
                {"target", to_string(p.target)},
                {"kind", std::string(to_string(p.kind))},
                {"countries", p.countries},
                {"unresolved", p.unresolved_hops}};
}

locality::GeoPath geopath_from_json(const json& j, int line) {
    locality::GeoPath p;
    p.source = j.at("source").get<std::string>();
    p.target = parse_ipv4(j.at("target").get<std::string>(), line);
    p.kind = parse_path_kind(j.at("kind").get<std::string>(), line);
    p.countries = j.at("countries").get<std::vector<std::string>>();
    p.unresolved_hops = j.at("unresolved").get<int>();
    return p;
}

json view_to_json(const locality::ExperimentGeoView& v) {
    json legs = json::array();
    for (const locality::GeoPath& p : v.application) legs.push_back(geopath_to_json(p));
    return json{{"app", v.app},
                {"src_id", v.src_id},
                {"dst_id", v.dst_id},
                {"src_country", v.src_country},
                {"dst_country", v.dst_country},
                {"network", geopath_to_json(v.network)},
                {"application", std::move(legs)}};
}

locality::ExperimentGeoView view_from_json(const json& j, int line) {
    locality::ExperimentGeoView v;
    v.app = j.at("app").get<std::string>();
    v.src_id = j.at("src_id").get<std::string>();
    v.dst_id = j.at("dst_id").get<std::string>();
    v.src_country = j.at("src_country").get<std::string>();
    v.dst_country = j.at("dst_country").get<std::string>();
    v.network = geopath_from_json(j.at("network"), line);
    for (const json& lj : j.at("application")) v.application.push_back(geopath_from_json(lj, line));
    return v;
}

json locality_row_to_json(const locality::LocalityRow& r) {
    return json{{"region", r.region},
                {"parent", r.parent_region},
                {"n", r.n_measurements},
                {"network_leaving", r.network_leaving},
                {"apps", r.per_app_leaving_pct}};
}

locality::LocalityRow locality_row_from_json(const json& j) {
    locality::LocalityRow r;
    r.region = j.at("region").get<std::string>();
    r.parent_region = j.at("parent").get<std::string>();
    r.n_measurements = j.at("n").get<int>();
    r.network_leaving = j.at("network_leaving").get<int>();
    r.per_app_leaving_pct = j.at("apps").get<std::map<std::string, int>>();
    return r;
}

json jurisdiction_row_to_json(const locality::JurisdictionRow& r) {
    return json{{"region", r.region},     {"parent", r.parent_region},
                {"group", r.group},       {"n", r.n_total},
                {"network", r.network_accessible}, {"apps", r.per_app_accessible}};
}

locality::JurisdictionRow jurisdiction_row_from_json(const json& j) {
    locality::JurisdictionRow r;
    r.region = j.at("region").get<std::string>();
    r.parent_region = j.at("parent").get<std::string>();
    r.group = j.at("group").get<std::string>();
    r.n_total = j.at("n").get<int>();
    r.network_accessible = j.at("network").get<int>();
    r.per_app_accessible = j.at("apps").get<std::map<std::string, int>>();
    return r;
}

template <typename T, typename ToJson>
void save_jsonl(const std::string& path, FileKind kind, std::span<const T> items, ToJson to_json_fn) {
    std::string out = header_line(kind) + "\n";
    for (const T& item : items) out += to_json_fn(item).dump() + "\n";
    write_file(path, out);
}

template <typename FromJson>
auto load_jsonl(const std::string& path, FileKind kind, FromJson from_json_fn) {
    using T = decltype(from_json_fn(json{}, 0));
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    std::vector<T> out;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!have_header) {
            FileKind actual = parse_header(line, path);
            if (actual != kind)
                throw schema_error(path + ": file holds " + std::string(to_string(actual)) +
                                       ", expected " + std::string(to_string(kind)),
                                   lineno);
            have_header = true;
            continue;
        }
        try {
            out.push_back(from_json_fn(json::parse(line), lineno));
        } catch (const json::exception& e) {
            throw schema_error(path + ": " + e.what(), lineno);
        }
    }
    if (!have_header) throw empty_file(path + ": no header line");
    return out;
}

}  // namespace

FileKind peek_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw empty_file(path + ": no header line");
    return parse_header(line, path);
}

void save_measurements(const std::string& path, std::span<const PathMeasurement> ms) {
    save_jsonl(path, FileKind::measurements, ms, measurement_to_json);
}

std::vector<PathMeasurement> load_measurements(const std::string& path) {
    return load_jsonl(path, FileKind::measurements, measurement_from_json);
}

void save_experiments(const std::string& path, std::span<const ExperimentRecord> recs) {
    save_jsonl(path, FileKind::experiments, recs, experiment_to_json);
}

std::vector<ExperimentRecord> load_experiments(const std::string& path) {
    return load_jsonl(path, FileKind::experiments, experiment_from_json);
}

void save_views(const std::string& path, std::span<const locality::ExperimentGeoView> views) {
    save_jsonl(path, FileKind::views, views, view_to_json);
}

std::vector<locality::ExperimentGeoView> load_views(const std::string& path) {
    return load_jsonl(path, FileKind::views, view_from_json);
}

void save_geopaths(const std::string& path, std::span<const locality::GeoPath> paths) {
    save_jsonl(path, FileKind::geopaths, paths, geopath_to_json);
}

std::vector<locality::GeoPath> load_geopaths(const std::string& path) {
    return load_jsonl(path, FileKind::geopaths, geopath_from_json);
}

void save_locality_rows(const std::string& path, std::span<const locality::LocalityRow> rows) {
    save_jsonl(path, FileKind::locality_rows, rows,
               [](const locality::LocalityRow& r) { return locality_row_to_json(r); });
}

std::vector<locality::LocalityRow> load_locality_rows(const std::string& path) {
    return load_jsonl(path, FileKind::locality_rows,
                      [](const json& j, int) { return locality_row_from_json(j); });
}

void save_jurisdiction_rows(const std::string& path,
                            std::span<const locality::JurisdictionRow> rows) {
    save_jsonl(path, FileKind::jurisdiction_rows, rows,
               [](const locality::JurisdictionRow& r) { return jurisdiction_row_to_json(r); });
}

std::vector<locality::JurisdictionRow> load_jurisdiction_rows(const std::string& path) {
    return load_jsonl(path, FileKind::jurisdiction_rows,
                      [](const json& j, int) { return jurisdiction_row_from_json(j); });
}

namespace {

json flow_to_json(const flows::FlowRecord& f, std::string_view cls) {
    return json{{"class", std::string(cls)},
                {"src", to_string(f.src)},
                {"dst", to_string(f.dst)},
                {"proto", std::string(to_string(f.protocol))},
                {"src_port", f.src_port},
                {"dst_port", f.dst_port},
                {"first_seen", format_rfc3339(f.first_seen)},
                {"last_seen", format_rfc3339(f.last_seen)},
                {"packets", f.packets},
                {"bytes", f.bytes},
                {"dns_names", f.dns_names}};
}

std::pair<flows::FlowRecord, std::string> flow_from_json(const json& j, int line) {
    flows::FlowRecord f;
    f.src = parse_ipv4(j.at("src").get<std::string>(), line);
    f.dst = parse_ipv4(j.at("dst").get<std::string>(), line);
    f.protocol = parse_protocol(j.at("proto").get<std::string>(), line);
    f.src_port = static_cast<uint16_t>(j.at("src_port").get<int>());
    f.dst_port = static_cast<uint16_t>(j.at("dst_port").get<int>());
    f.first_seen = parse_rfc3339(j.at("first_seen").get<std::string>(), line);
    f.last_seen = parse_rfc3339(j.at("last_seen").get<std::string>(), line);
    f.packets = j.at("packets").get<int64_t>();
    f.bytes = j.at("bytes").get<int64_t>();
    f.dns_names = j.at("dns_names").get<std::set<std::string>>();
    return {f, j.at("class").get<std::string>()};
}

}  // namespace

void save_flow_partition(const std::string& path, const flows::Partition& partition) {
    std::string out = header_line(FileKind::flow_partition) + "\n";
    for (const auto& f : partition.messaging) out += flow_to_json(f, "messaging").dump() + "\n";
    for (const auto& f : partition.background) out += flow_to_json(f, "background").dump() + "\n";
    for (const auto& f : partition.unknown) out += flow_to_json(f, "unknown").dump() + "\n";
    write_file(path, out);
}

flows::Partition load_flow_partition(const std::string& path) {
    struct Tagged {
        flows::FlowRecord flow;
        std::string cls;
    };
    auto tagged = load_jsonl(path, FileKind::flow_partition, [](const json& j, int line) {
        auto [flow, cls] = flow_from_json(j, line);
        return Tagged{std::move(flow), std::move(cls)};
    });
    flows::Partition p;
    for (auto& [flow, cls] : tagged) {
        if (cls == "messaging")
            p.messaging.push_back(std::move(flow));
        else if (cls == "background")
            p.background.push_back(std::move(flow));
        else if (cls == "unknown")
            p.unknown.push_back(std::move(flow));
        else
            throw schema_error(path + ": unknown flow class '" + cls + "'");
    }
    return p;
}

std::string experiment_to_line(const ExperimentRecord& rec) {
    return experiment_to_json(rec).dump();
}

ExperimentRecord experiment_from_line(const std::string& line, int lineno) {
    try {
        return experiment_from_json(json::parse(line), lineno);
    } catch (const json::exception& e) {
        throw schema_error(std::string("experiment record: ") + e.what(), lineno);
    }
}

RegionScheme load_region_scheme(const std::string& path) {
    RegionScheme scheme;
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        if (!have_header) {
            if (trim(line) != "country,region,subregion")
                throw schema_error(path + ": missing 'country,region,subregion' header", lineno);
            have_header = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 3) throw schema_error(path + ": expected 3 columns", lineno);
        std::string country(trim(f[0]));
        if (!valid_country_code(country))
            throw schema_error(path + ": bad country code '" + country + "'", lineno);
        RegionScheme::Entry entry;
        entry.region = parse_region(trim(f[1]), lineno);
        entry.subregion = std::string(trim(f[2]));
        if (entry.subregion.empty()) throw schema_error(path + ": empty subregion", lineno);
        scheme.entries[country] = std::move(entry);
    }
    if (!have_header) throw empty_file(path + ": empty region scheme");
    return scheme;
}

std::vector<InterestGroup> load_interest_groups(const std::string& path,
                                                const RegionScheme& scheme) {
    std::vector<InterestGroup> groups;
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        if (!have_header) {
            if (trim(line) != "group,country")
                throw schema_error(path + ": missing 'group,country' header", lineno);
            have_header = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 2) throw schema_error(path + ": expected 2 columns", lineno);
        std::string name(trim(f[0]));
        std::string country(trim(f[1]));
        if (name.empty()) throw schema_error(path + ": empty group name", lineno);
        if (!scheme.contains(country))
            throw Error("UnknownCountry",
                        path + ": group member '" + country + "' missing from region scheme", lineno);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const InterestGroup& g) { return g.name == name; });
        if (it == groups.end()) {
            groups.push_back({name, {country}});
        } else {
            it->members.insert(country);
        }
    }
    if (!have_header) throw empty_file(path + ": empty groups file");
    for (const InterestGroup& g : groups)
        if (g.members.empty()) throw schema_error(path + ": group '" + g.name + "' has no members");
    return groups;
}

}  // namespace pathloc::report
