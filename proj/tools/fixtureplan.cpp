#include "fixtureplan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "pathloc/geodb.hpp"
#include "pathloc/strings.hpp"
#include "pathloc/traceparse.hpp"

namespace fixtureplan {

using namespace pathloc;

namespace {

// Region scheme rows: the 28 node countries plus every interest-group member.
const SchemeRow kScheme[] = {
    // node countries, Europe
    {"PL", "Europe", "Eastern Europe", 52.1, 19.4, "Poland"},
    {"CZ", "Europe", "Eastern Europe", 49.8, 15.5, "Czech Republic"},
    {"HU", "Europe", "Eastern Europe", 47.2, 19.4, "Hungary"},
    {"GB", "Europe", "Northern Europe", 54.0, -2.9, "United Kingdom"},
    {"NO", "Europe", "Northern Europe", 64.6, 11.5, "Norway"},
    {"SE", "Europe", "Northern Europe", 62.8, 16.7, "Sweden"},
    {"DK", "Europe", "Northern Europe", 56.0, 10.0, "Denmark"},
    {"IE", "Europe", "Northern Europe", 53.4, -8.0, "Ireland"},
    {"ES", "Europe", "Southern Europe", 40.2, -3.6, "Spain"},
    {"IT", "Europe", "Southern Europe", 42.8, 12.8, "Italy"},
    {"GR", "Europe", "Southern Europe", 39.1, 22.9, "Greece"},
    {"PT", "Europe", "Southern Europe", 39.6, -8.0, "Portugal"},
    {"DE", "Europe", "Western Europe", 51.2, 10.4, "Germany"},
    {"FR", "Europe", "Western Europe", 46.2, 2.2, "France"},
    {"CH", "Europe", "Western Europe", 46.8, 8.2, "Switzerland"},
    // node countries, Asia
    {"IL", "Asia", "Western Asia", 31.4, 35.0, "Israel"},
    {"SG", "Asia", "South-Eastern Asia", 1.35, 103.8, "Singapore"},
    {"TH", "Asia", "South-Eastern Asia", 15.1, 101.0, "Thailand"},
    {"CN", "Asia", "Eastern Asia", 35.9, 104.2, "China"},
    {"JP", "Asia", "Eastern Asia", 36.5, 138.0, "Japan"},
    {"KR", "Asia", "Eastern Asia", 36.4, 127.9, "South Korea"},
    {"HK", "Asia", "Eastern Asia", 22.3, 114.2, "Hong Kong"},
    // node countries, Oceania
    {"AU", "Oceania", "Australia and New Zealand", -25.7, 134.5, "Australia"},
    {"NZ", "Oceania", "Australia and New Zealand", -41.8, 172.8, "New Zealand"},
    // node countries, Americas
    {"US", "Americas", "Northern America", 39.8, -98.6, "United States"},
    {"CA", "Americas", "Northern America", 56.1, -106.3, "Canada"},
    {"AR", "Americas", "South America", -35.4, -65.2, "Argentina"},
    {"BR", "Americas", "South America", -10.8, -53.1, "Brazil"},
    // EU members without nodes
    {"AT", "Europe", "Western Europe", 47.6, 14.1, "Austria"},
    {"BE", "Europe", "Western Europe", 50.6, 4.6, "Belgium"},
    {"BG", "Europe", "Eastern Europe", 42.7, 25.5, "Bulgaria"},
    {"HR", "Europe", "Southern Europe", 45.1, 15.2, "Croatia"},
    {"CY", "Asia", "Western Asia", 35.1, 33.4, "Cyprus"},
    {"EE", "Europe", "Northern Europe", 58.7, 25.0, "Estonia"},
    {"FI", "Europe", "Northern Europe", 64.5, 26.0, "Finland"},
    {"LV", "Europe", "Northern Europe", 56.9, 24.9, "Latvia"},
    {"LT", "Europe", "Northern Europe", 55.3, 23.9, "Lithuania"},
    {"LU", "Europe", "Western Europe", 49.8, 6.1, "Luxembourg"},
    {"MT", "Europe", "Southern Europe", 35.9, 14.4, "Malta"},
    {"NL", "Europe", "Western Europe", 52.2, 5.3, "Netherlands"},
    {"RO", "Europe", "Eastern Europe", 45.9, 25.0, "Romania"},
    {"SK", "Europe", "Eastern Europe", 48.7, 19.5, "Slovakia"},
    {"SI", "Europe", "Southern Europe", 46.1, 14.8, "Slovenia"},
    // Arab League
    {"DZ", "Africa", "Northern Africa", 28.0, 2.6, "Algeria"},
    {"BH", "Asia", "Western Asia", 26.0, 50.5, "Bahrain"},
    {"KM", "Africa", "Eastern Africa", -11.9, 43.9, "Comoros"},
    {"DJ", "Africa", "Eastern Africa", 11.7, 42.6, "Djibouti"},
    {"EG", "Africa", "Northern Africa", 26.5, 29.8, "Egypt"},
    {"IQ", "Asia", "Western Asia", 33.0, 43.8, "Iraq"},
    {"JO", "Asia", "Western Asia", 31.2, 36.8, "Jordan"},
    {"KW", "Asia", "Western Asia", 29.3, 47.6, "Kuwait"},
    {"LB", "Asia", "Western Asia", 33.9, 35.9, "Lebanon"},
    {"LY", "Africa", "Northern Africa", 27.0, 18.0, "Libya"},
    {"MR", "Africa", "Western Africa", 20.3, -10.3, "Mauritania"},
    {"MA", "Africa", "Northern Africa", 31.9, -6.3, "Morocco"},
    {"OM", "Asia", "Western Asia", 20.6, 56.1, "Oman"},
    {"PS", "Asia", "Western Asia", 31.9, 35.2, "Palestine"},
    {"QA", "Asia", "Western Asia", 25.3, 51.2, "Qatar"},
    {"SA", "Asia", "Western Asia", 24.0, 45.0, "Saudi Arabia"},
    {"SO", "Africa", "Eastern Africa", 6.0, 46.0, "Somalia"},
    {"SD", "Africa", "Northern Africa", 15.6, 30.0, "Sudan"},
    // single-country groups
    {"RU", "Europe", "Eastern Europe", 61.5, 99.0, "Russia"},
};

const EndpointInfo kEndpoints[] = {
    {"textsecure", "US", "textsecure-service.whispersystems.org", Protocol::tcp, 443},
    {"threema", "CH", "ds.threema.ch", Protocol::tcp, 443},
    {"wechat", "CN", "short.weixin.qq.com", Protocol::tcp, 8080},
    {"whatsapp", "US", "e1.whatsapp.net", Protocol::tcp, 5222},
};

const char* kAppOrder[] = {"textsecure", "threema", "wechat", "whatsapp"};

const std::vector<std::string>& all_node_ccs() {
    static const std::vector<std::string> nodes{
        "PL", "CZ", "HU", "GB", "NO", "SE", "DK", "IE", "ES", "IT", "GR", "PT", "DE", "FR",
        "CH", "IL", "SG", "TH", "CN", "JP", "KR", "HK", "AU", "NZ", "US", "CA", "AR", "BR"};
    return nodes;
}

int node_index(const std::string& cc) {
    const auto& nodes = all_node_ccs();
    auto it = std::find(nodes.begin(), nodes.end(), cc);
    if (it == nodes.end()) throw std::runtime_error("not a node country: " + cc);
    return static_cast<int>(it - nodes.begin());
}

uint32_t base_octet(const std::string& cc) { return 60u + static_cast<uint32_t>(node_index(cc)); }

std::string node_id(const std::string& cc) { return to_lower(cc); }

Ipv4 vantage_address(const std::string& cc) { return {base_octet(cc) << 24 | 0x0000000au}; }
Ipv4 gateway_address(const std::string& cc) { return {base_octet(cc) << 24 | 0x00010001u}; }
Ipv4 transit_address(const std::string& cc) { return {base_octet(cc) << 24 | 0x00010101u}; }
Ipv4 alt_transit_address(const std::string& cc) { return {base_octet(cc) << 24 | 0x00010201u}; }

using IdPair = std::pair<std::string, std::string>;  // lowercase ids, src <= dst

IdPair make_pair_ids(const std::string& cc_a, const std::string& cc_b) {
    std::string a = node_id(cc_a), b = node_id(cc_b);
    return a <= b ? IdPair{a, b} : IdPair{b, a};
}

// Europe network paths detouring over London, 71 pairs: the first eligible
// pairs in lexicographic order. (ch,no) takes the Frankfurt route instead.
const std::set<IdPair>& europe_gb_transit() {
    static const std::set<IdPair> pairs = [] {
        std::vector<std::string> ids;
        for (int i = 0; i < 15; ++i)
            if (all_node_ccs()[i] != "GB") ids.push_back(node_id(all_node_ccs()[i]));
        std::sort(ids.begin(), ids.end());
        std::set<IdPair> out;
        for (size_t i = 0; i < ids.size() && out.size() < 71; ++i)
            for (size_t k = i + 1; k < ids.size() && out.size() < 71; ++k) {
                if (ids[i] == "ch" && ids[k] == "no") continue;
                out.insert({ids[i], ids[k]});
            }
        return out;
    }();
    return pairs;
}

// Europe pairs whose Threema leg from the first member detours over London,
// 53 pairs in lexicographic order.
const std::set<IdPair>& europe_threema_gb() {
    static const std::set<IdPair> pairs = [] {
        std::vector<std::string> ids;
        for (int i = 0; i < 15; ++i)
            if (all_node_ccs()[i] != "GB") ids.push_back(node_id(all_node_ccs()[i]));
        std::sort(ids.begin(), ids.end());
        std::set<IdPair> out;
        for (size_t i = 0; i < ids.size() && out.size() < 53; ++i)
            for (size_t k = i + 1; k < ids.size() && out.size() < 53; ++k)
                out.insert({ids[i], ids[k]});
        return out;
    }();
    return pairs;
}

bool in_europe(const std::string& cc) { return std::string(scheme_row(cc).region) == "Europe"; }
bool in_asia(const std::string& cc) { return std::string(scheme_row(cc).region) == "Asia"; }
bool in_oceania(const std::string& cc) { return std::string(scheme_row(cc).region) == "Oceania"; }

std::vector<std::string> dedupe(std::vector<std::string> route) {
    std::vector<std::string> out;
    for (std::string& cc : route)
        if (out.empty() || out.back() != cc) out.push_back(std::move(cc));
    return out;
}

// Country sequence of the direct path between two vantage points. Identical
// for every app's experiment on the pair.
std::vector<std::string> network_route(const std::string& src_cc, const std::string& dst_cc) {
    if (src_cc == dst_cc) return {src_cc};
    IdPair pair = make_pair_ids(src_cc, dst_cc);
    if (in_europe(src_cc) && in_europe(dst_cc)) {
        if (src_cc == "GB" || dst_cc == "GB") return {src_cc, dst_cc};
        if (pair == IdPair{"ch", "no"}) return {src_cc, "DE", dst_cc};
        if (europe_gb_transit().count(pair)) return {src_cc, "GB", dst_cc};
        return {src_cc, dst_cc};
    }
    if (in_asia(src_cc) && in_asia(dst_cc)) {
        if (src_cc == "IL" || dst_cc == "IL") return {src_cc, "GB", "US", dst_cc};
        static const std::set<IdPair> via_cn{{"jp", "th"}, {"kr", "sg"}, {"kr", "th"}};
        if (via_cn.count(pair)) return {src_cc, "CN", dst_cc};
        return {src_cc, dst_cc};
    }
    if (in_oceania(src_cc) && in_oceania(dst_cc)) return {src_cc, dst_cc};
    // Americas: southern cone transits through the U.S.
    static const std::set<IdPair> via_us{{"ar", "br"}, {"ar", "ca"}, {"br", "ca"}};
    if (via_us.count(pair)) return {src_cc, "US", dst_cc};
    return {src_cc, dst_cc};
}

// Country sequence of one application leg from X to the app backend,
// including the backend country as final element. pair identifies the
// experiment, since routes to the same backend shift between measurements.
std::vector<std::string> leg_route(const std::string& app, const std::string& x,
                                   const IdPair& pair) {
    if (app == "textsecure" || app == "whatsapp") {
        if (in_europe(x)) {
            if (app == "whatsapp") return dedupe({x, "GB", "US"});
            if (x == "CH") return {"CH", "US"};
            if (x == "NO") return {"NO", "SE", "US"};
            return dedupe({x, "US"});
        }
        if (in_asia(x)) {
            if (x == "IL") return {"IL", "GB", "US"};
            return {x, "US"};
        }
        if (in_oceania(x)) return {x, "US"};
        return dedupe({x, "US"});  // Americas
    }
    if (app == "threema") {
        if (in_europe(x)) {
            if (europe_threema_gb().count(pair) && node_id(x) == pair.first)
                return dedupe({x, "GB", "CH"});
            if (x == "CH") return {"CH"};
            return dedupe({x, "DE", "CH"});
        }
        if (in_asia(x)) {
            static const std::set<IdPair> transpacific{
                {"cn", "jp"}, {"cn", "kr"}, {"hk", "jp"}, {"hk", "kr"}};
            static const std::set<IdPair> mediterranean{{"sg", "th"}};
            if (x == "IL") return {"IL", "GB", "CH"};
            if ((x == "CN" || x == "HK") && transpacific.count(pair)) return {x, "US", "CH"};
            if (x == "SG" && mediterranean.count(pair)) return {"SG", "FR", "CH"};
            if (x == "CN") return {"CN", "DE", "CH"};
            if (x == "HK" || x == "TH") return {x, "FR", "CH"};
            return {x, "US", "CH"};  // JP, KR, SG
        }
        if (in_oceania(x)) return {x, "FR", "CH"};
        // Americas: transatlantic routes out of Miami
        if (x == "US") return {"US", "FR", "CH"};
        if (x == "BR") return {"BR", "US", "ES", "CH"};
        return {x, "US", "CH"};  // CA, AR
    }
    if (app == "wechat") {
        if (in_europe(x)) {
            if (x == "CH") return {"CH", "DE", "HK", "CN"};
            if (x == "NO") return {"NO", "SE", "US", "CN"};
            return dedupe({x, "US", "CN"});
        }
        if (in_asia(x)) {
            static const std::set<IdPair> direct{{"jp", "sg"}, {"kr", "sg"}, {"jp", "th"}, {"kr", "th"}};
            if (x == "IL") return {"IL", "GB", "US", "CN"};
            if ((x == "SG" || x == "TH") && !direct.count(pair)) return {x, "US", "CN"};
            return dedupe({x, "CN"});
        }
        if (in_oceania(x)) return {x, "CN"};
        return dedupe({x, "US", "CN"});  // Americas
    }
    throw std::runtime_error("unknown app: " + app);
}

double quantize(double v) { return std::round(v * 1000.0) / 1000.0; }

double hop_rtt(const std::string& src_cc, const std::string& hop_cc) {
    const SchemeRow& a = scheme_row(src_cc);
    const SchemeRow& b = scheme_row(hop_cc);
    double km = geo::great_circle_km({a.lat, a.lon}, {b.lat, b.lon});
    return quantize(std::max(0.8, km / 100.0 + 2.0));
}

UtcInstant slot_timestamp(int slot) {
    static const UtcInstant base = parse_rfc3339("2015-09-30T08:00:00Z");
    return base.plus_seconds(600.0 * slot);
}

uint16_t network_port(int i_src, int i_dst, int app_idx) {
    return static_cast<uint16_t>(49152 + (i_src * 131 + i_dst * 17 + app_idx * 7) % 16384);
}

struct HopSpec {
    Ipv4 address;
    std::string host;
    std::string cc;
    bool silent = false;
    bool twin = false;  // add a second responder in the same country
};

PathMeasurement build_measurement(const std::string& src_cc, const std::vector<HopSpec>& specs,
                                  Ipv4 target, Protocol proto, uint16_t port, PathKind kind,
                                  UtcInstant ts) {
    PathMeasurement m;
    m.source = node_id(src_cc);
    m.target = target;
    m.protocol = proto;
    m.port = port;
    m.kind = kind;
    m.timestamp = ts;
    int ttl = 0;
    for (const HopSpec& spec : specs) {
        Hop hop;
        hop.ttl = ++ttl;
        if (!spec.silent) {
            double r = hop_rtt(src_cc, spec.cc);
            hop.responders.push_back(make_responder(
                spec.address, spec.host, {quantize(r + 0.12), r, quantize(r + 0.31)}));
            if (spec.twin)
                hop.responders.push_back(
                    make_responder(alt_transit_address(spec.cc), "", {quantize(r + 0.3)}));
        }
        m.hops.push_back(std::move(hop));
    }
    return m;
}

// route -> hop list: source gateway, transit per intermediate country, final
// target. Texture rules add a silent hop or a second responder on some
// cross-country paths.
std::vector<HopSpec> hops_for_route(const std::vector<std::string>& route, Ipv4 final_address,
                                    const std::string& final_host, bool add_silent, bool add_twin) {
    std::vector<HopSpec> specs;
    specs.push_back({gateway_address(route.front()), "gw." + node_id(route.front()) + ".example.net",
                     route.front(), false, false});
    for (size_t i = 1; i + 1 < route.size(); ++i)
        specs.push_back({transit_address(route[i]), "", route[i], false, add_twin && i == 1});
    if (add_silent) specs.push_back({{}, "", "", true, false});
    if (route.size() > 1)
        specs.push_back({final_address, final_host, route.back(), false, false});
    else
        specs[0] = {final_address, final_host, route.front(), false, false};  // in-country path
    return specs;
}

const EndpointInfo& endpoint_for(const std::string& app) {
    for (const EndpointInfo& e : kEndpoints)
        if (app == e.app) return e;
    throw std::runtime_error("unknown app: " + app);
}

ExperimentRecord build_experiment(const std::string& app, int app_idx, const std::string& src_cc,
                                  const std::string& dst_cc, int slot) {
    VantagePoint src = vantage_for(src_cc);
    VantagePoint dst = vantage_for(dst_cc);
    int i_src = node_index(src_cc), i_dst = node_index(dst_cc);
    bool cross = src_cc != dst_cc;
    bool add_silent = cross && (i_src + i_dst) % 5 == 2;
    bool add_twin = cross && (3 * i_src + i_dst) % 7 == 3;
    UtcInstant t0 = slot_timestamp(slot);

    ExperimentRecord rec;
    rec.app = app;
    rec.src = src;
    rec.dst = dst;
    rec.status = ExperimentStatus::complete;

    auto net_route = network_route(src_cc, dst_cc);
    rec.network_path = build_measurement(
        src_cc, hops_for_route(net_route, dst.address, dst.hostname, add_silent, add_twin),
        dst.address, Protocol::tcp, network_port(i_src, i_dst, app_idx), PathKind::network, t0);

    const EndpointInfo& endpoint = endpoint_for(app);
    Ipv4 server = endpoint_address(endpoint);
    IdPair pair = make_pair_ids(src_cc, dst_cc);
    std::vector<std::string> members{src_cc};
    if (cross) members.push_back(dst_cc);
    int leg_no = 0;
    for (const std::string& member : members) {
        auto route = leg_route(app, member, pair);
        PathMeasurement leg = build_measurement(
            member, hops_for_route(route, server, endpoint.dns, false, false), server,
            endpoint.protocol, endpoint.port, PathKind::leg, t0.plus_seconds(60.0 * ++leg_no));
        rec.application_legs.push_back(std::move(leg));
    }
    return rec;
}

int region_slot_base(const std::string& region_key) {
    int base = 0;
    for (const std::string& key : region_keys()) {
        if (key == region_key) return base;
        int n = static_cast<int>(region_node_ccs(key).size());
        base += 4 * (n * (n - 1) / 2 + n);
    }
    throw std::runtime_error("unknown region key: " + region_key);
}

}  // namespace

std::span<const SchemeRow> scheme_rows() { return kScheme; }

const SchemeRow& scheme_row(const std::string& cc) {
    for (const SchemeRow& r : scheme_rows())
        if (cc == r.cc) return r;
    throw std::runtime_error("no scheme row for " + cc);
}

const std::vector<std::string>& node_ccs() { return all_node_ccs(); }

VantagePoint vantage_for(const std::string& cc) {
    return {node_id(cc), cc, node_id(cc) + ".node.example.net", vantage_address(cc)};
}

std::span<const EndpointInfo> endpoints() { return kEndpoints; }

Ipv4 endpoint_address(const EndpointInfo& e) {
    // servers live in 20.0.x of their country's block, one slot per app
    uint32_t app_slot = 0;
    for (const EndpointInfo& k : kEndpoints) {
        if (std::string_view(k.app) == e.app) break;
        ++app_slot;
    }
    return {base_octet(e.cc) << 24 | (20u + app_slot) << 16 | 0x0005u};
}

const std::vector<std::string>& region_keys() {
    static const std::vector<std::string> keys{"europe", "asia", "oceania", "americas"};
    return keys;
}

const std::vector<std::string>& region_node_ccs(const std::string& region_key) {
    static const std::map<std::string, std::vector<std::string>> by_key = [] {
        std::map<std::string, std::vector<std::string>> out;
        for (const std::string& cc : all_node_ccs()) {
            std::string region = to_lower(scheme_row(cc).region);
            out[region].push_back(cc);
        }
        return out;
    }();
    auto it = by_key.find(region_key);
    if (it == by_key.end()) throw std::runtime_error("unknown region key: " + region_key);
    return it->second;
}

std::vector<ExperimentRecord> build_experiments(const std::string& region_key) {
    const auto& ccs = region_node_ccs(region_key);
    std::vector<std::string> ids;
    std::map<std::string, std::string> cc_by_id;
    for (const std::string& cc : ccs) {
        ids.push_back(node_id(cc));
        cc_by_id[node_id(cc)] = cc;
    }
    std::sort(ids.begin(), ids.end());

    std::vector<ExperimentRecord> out;
    int slot = region_slot_base(region_key);
    for (int app_idx = 0; app_idx < 4; ++app_idx) {
        for (size_t i = 0; i < ids.size(); ++i)
            for (size_t k = i; k < ids.size(); ++k)
                out.push_back(build_experiment(kAppOrder[app_idx], app_idx, cc_by_id[ids[i]],
                                               cc_by_id[ids[k]], slot++));
    }
    return out;
}

std::string regions_csv() {
    std::string out = "country,region,subregion\n";
    for (const SchemeRow& r : scheme_rows())
        out += std::string(r.cc) + "," + r.region + "," + r.subregion + "\n";
    return out;
}

std::string groups_csv() {
    std::string out = "group,country\n";
    for (const char* cc : {"GB", "US", "NZ", "CA", "AU"}) out += std::string("5 Eyes,") + cc + "\n";
    for (const char* cc :
         {"AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR", "DE", "GR", "HU", "IE",
          "IT", "LV", "LT", "LU", "MT", "NL", "PL", "PT", "RO", "SK", "SI", "ES", "SE", "GB"})
        out += std::string("EU,") + cc + "\n";
    for (const char* cc : {"DZ", "BH", "KM", "DJ", "EG", "IQ", "JO", "KW", "LB", "LY", "MR", "MA",
                           "OM", "PS", "QA", "SA", "SO", "SD"})
        out += std::string("Arab League,") + cc + "\n";
    out += "Russia,RU\n";
    out += "China,CN\n";
    return out;
}

std::string centroids_csv() {
    std::string out = "# country centroid coordinates (degrees)\n";
    char buf[96];
    for (const SchemeRow& r : scheme_rows()) {
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f\n", r.cc, r.lat, r.lon);
        out += buf;
    }
    return out;
}

std::string overrides_csv() {
    return "# manual geolocation corrections: cidr,country_code\n"
           "# reviewed per deployment; ships empty\n";
}

std::string ranges_csv() {
    std::string out;
    for (const std::string& cc : all_node_ccs()) {
        uint32_t from = base_octet(cc) << 24;
        uint32_t to = from | 0x00ffffffu;
        out += std::to_string(from) + "," + std::to_string(to) + "," + cc + "," +
               scheme_row(cc).name + "\n";
    }
    return out;
}

std::string vantage_csv() {
    std::string out = "id,country,hostname,addr\n";
    for (const std::string& cc : all_node_ccs()) {
        VantagePoint vp = vantage_for(cc);
        out += vp.id + "," + vp.country + "," + vp.hostname + "," + to_string(vp.address) + "\n";
    }
    return out;
}

std::string campaign_json(const std::string& region_key, const std::string& fixture_file) {
    std::string vantages;
    for (const std::string& cc : region_node_ccs(region_key)) {
        VantagePoint vp = vantage_for(cc);
        if (!vantages.empty()) vantages += ",\n";
        vantages += "    {\"id\": \"" + vp.id + "\", \"country\": \"" + vp.country +
                    "\", \"hostname\": \"" + vp.hostname + "\", \"addr\": \"" +
                    to_string(vp.address) + "\"}";
    }
    std::string apps;
    for (const char* app : kAppOrder) {
        if (!apps.empty()) apps += ",\n";
        apps += std::string("    {\"name\": \"") + app +
                "\", \"message_texts\": [\"ping\", \"pong\", \"ping\", \"pong\"], "
                "\"n_messages\": 4, \"timer_offsets_s\": [0, 5, 10, 15], "
                "\"end_window_s\": [30, 620], \"port_blacklist\": [53, 123], "
                "\"host_blacklist\": [\"pool.ntp.org\", \"connectivitycheck.gstatic.com\"], "
                "\"correlation_window_s\": 2.0}";
    }
    return "{\n  \"apps\": [\n" + apps + "\n  ],\n  \"vantage_points\": [\n" + vantages +
           "\n  ],\n  \"pairing\": \"unordered_pairs_with_self\",\n  \"parallelism\": 2,\n"
           "  \"retries\": 1,\n  \"chunk_size\": 10,\n  \"seed\": 20150930,\n"
           "  \"executor\": \"replay\",\n  \"fixtures\": [\"" +
           fixture_file + "\"]\n}\n";
}

std::string flows_whatsapp_csv() {
    return
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "192.168.77.23,84.21.0.5,tcp,44123,5222,2015-09-30T12:00:00.200Z,2015-09-30T12:00:04.800Z,42,13000,e1.whatsapp.net\n"
        "192.168.77.23,84.21.0.5,tcp,44124,5222,2015-09-30T12:00:05.100Z,2015-09-30T12:00:06.400Z,12,3400,e1.whatsapp.net\n"
        "192.168.77.23,84.21.0.5,tcp,44125,5222,2015-09-30T12:00:14.700Z,2015-09-30T12:00:16Z,18,5600,e1.whatsapp.net\n"
        "192.168.77.23,91.189.94.4,udp,43210,123,2015-09-30T12:00:02Z,2015-09-30T12:00:02.100Z,2,180,pool.ntp.org\n"
        "192.168.77.23,10.11.0.1,udp,53999,53,2015-09-30T12:00:00.100Z,2015-09-30T12:00:00.150Z,2,240,\n"
        "192.168.77.23,84.22.0.9,tcp,44126,443,2015-09-30T12:01:40Z,2015-09-30T12:01:41Z,10,2900,metrics.example-analytics.com\n";
}

std::string flows_background_csv() {
    return
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "192.168.77.23,91.189.94.4,udp,40001,123,2015-09-30T07:10:00Z,2015-09-30T07:10:00.200Z,2,180,pool.ntp.org\n"
        "192.168.77.23,84.23.0.7,tcp,40002,443,2015-09-30T07:10:04Z,2015-09-30T07:10:05Z,14,4100,connectivitycheck.gstatic.com\n"
        "192.168.77.23,84.24.0.11,tcp,40003,443,2015-09-30T07:11:00Z,2015-09-30T07:11:20Z,60,48000,play.example-store.net\n";
}

std::string flows_lists_csv() {
    return
        "whatsapp,white,e1.whatsapp.net\n"
        "whatsapp,white,84.21.0.5\n"
        "whatsapp,black,pool.ntp.org\n"
        "whatsapp,black,.gstatic.com\n";
}

std::string flows_dns_cn_csv() {
    return
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "192.168.88.10,78.20.0.5,tcp,41000,8080,2015-09-30T13:00:00Z,2015-09-30T13:00:09Z,30,9100,short.weixin.qq.com\n"
        "192.168.88.10,84.20.0.5,tcp,41001,443,2015-09-30T13:00:11Z,2015-09-30T13:00:14Z,20,6000,textsecure-service.whispersystems.org\n";
}

std::string flows_dns_de_csv() {
    return
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "192.168.77.23,78.21.0.5,tcp,42000,8080,2015-09-30T13:05:00Z,2015-09-30T13:05:08Z,28,8700,short.weixin.qq.com\n"
        "192.168.77.23,84.20.0.5,tcp,42001,443,2015-09-30T13:05:11Z,2015-09-30T13:05:13Z,22,6400,textsecure-service.whispersystems.org\n";
}

std::vector<std::pair<std::string, std::string>> trace_samples() {
    std::vector<std::pair<std::string, std::string>> out;
    auto render = [](const std::string& src_cc, const std::string& dst_cc, int app_idx) {
        ExperimentRecord rec = build_experiment(kAppOrder[app_idx], app_idx, src_cc, dst_cc, 0);
        return trace::render_traceroute(*rec.network_path);
    };
    out.emplace_back("pl_to_es.txt", render("PL", "ES", 3));
    out.emplace_back("il_to_jp.txt", render("IL", "JP", 0));
    out.emplace_back("ar_to_br.txt", render("AR", "BR", 1));
    return out;
}

}  // namespace fixtureplan
