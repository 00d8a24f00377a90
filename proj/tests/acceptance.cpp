// Acceptance suite: ten end-to-end criteria over the bundled campaign28
// dataset and the property suites. One [PASS]/[FAIL] line per criterion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <thread>

#include "pathloc/campaign.hpp"
#include "pathloc/error.hpp"
#include "pathloc/flows.hpp"
#include "pathloc/geodb.hpp"
#include "pathloc/locality.hpp"
#include "pathloc/report.hpp"
#include "pathloc/strings.hpp"
#include "pathloc/traceparse.hpp"

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/subprocess.hpp"
#include "support/temp_dir.hpp"

using namespace pathloc;
using testsupport::data_path;
using testsupport::run_cli;

namespace {

struct Criterion {
    int number;
    std::string name;
    bool ok = true;
    bool reported = false;

    Criterion(int n, std::string label) : number(n), name(std::move(label)) {}
    ~Criterion() { finish(); }
    void expect(bool condition) { ok = ok && condition; }
    void finish() {
        if (reported) return;
        reported = true;
        std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", number, name.c_str());
        std::fflush(stdout);
    }
};

#define ACC_CHECK(crit, cond)   \
    do {                        \
        bool acc_ok_ = (cond);  \
        CHECK(acc_ok_);         \
        (crit).expect(acc_ok_); \
    } while (0)

std::map<std::string, std::vector<std::string>> csv_by_key(const std::string& text, int key_cols) {
    std::map<std::string, std::vector<std::string>> rows;
    bool header = true;
    for (const std::string& line : split(text, '\n')) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto cells = split(line, ',');
        std::string key = cells[0];
        for (int i = 1; i < key_cols; ++i) key += "|" + cells[static_cast<size_t>(i)];
        rows[key] = cells;
    }
    return rows;
}

std::vector<std::string> fixture_inputs() {
    std::vector<std::string> inputs;
    for (const char* region : {"europe", "asia", "oceania", "americas"})
        inputs.push_back(
            data_path("fixtures/campaign28/experiments_" + std::string(region) + ".jsonl"));
    return inputs;
}

int count_journal_lines(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        return 0;
    }
    int n = 0;
    for (const std::string& line : split(text, '\n'))
        if (!trim(line).empty()) ++n;
    return n;
}

}  // namespace

TEST_CASE("criteria 1 and 2: table reproduction through analyze and report") {
    Criterion c1(1, "per-region traffic-leaving percentages match the reference table");
    Criterion c2(2, "Europe jurisdiction accessibility matches the reference table");

    testsupport::TempDir tmp("acc_tables");
    auto start = std::chrono::steady_clock::now();

    std::vector<std::string> geolocate_args{"geolocate"};
    for (const auto& f : fixture_inputs()) geolocate_args.push_back(f);
    for (const auto& extra : std::vector<std::string>{
             "--db", data_path("fixtures/campaign28/ranges.csv"), "--overrides",
             data_path("overrides.csv"), "--centroids", data_path("centroids.csv"), "--scheme",
             data_path("regions.csv"), "--out", tmp.file("views.jsonl"), "--flags-out",
             tmp.file("flags.csv")})
        geolocate_args.push_back(extra);
    auto geo_res = run_cli(geolocate_args);
    REQUIRE(geo_res.exit_code == 0);

    auto an_res = run_cli({"analyze", tmp.file("views.jsonl"), "--scheme", data_path("regions.csv"),
                           "--groups", data_path("groups.csv"), "--out-locality",
                           tmp.file("loc.jsonl"), "--out-jurisdiction", tmp.file("jur.jsonl")});
    REQUIRE(an_res.exit_code == 0);

    auto loc_res = run_cli({"report", tmp.file("loc.jsonl"), "--format", "csv"});
    auto jur_res = run_cli({"report", tmp.file("jur.jsonl"), "--format", "csv"});
    REQUIRE(loc_res.exit_code == 0);
    REQUIRE(jur_res.exit_code == 0);

    double elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ACC_CHECK(c1, elapsed_s < 5.0);

    // region, n_measurements, leaving_n, leaving_pct
    auto loc = csv_by_key(loc_res.out, 1);
    const std::vector<std::array<std::string, 4>> expected_locality{
        {"Europe", "120", "0", "0"},
        {"Oceania", "3", "0", "0"},
        {"Asia", "28", "6", "21"},
        {"Americas", "10", "0", "0"},
        {"South America (Americas)", "3", "1", "33"},
        {"Northern America (Americas)", "3", "0", "0"},
    };
    for (const auto& want : expected_locality) {
        REQUIRE(loc.count(want[0]) == 1);
        const auto& row = loc[want[0]];
        ACC_CHECK(c1, row[1] == want[1]);
        ACC_CHECK(c1, row[2] == want[2]);
        ACC_CHECK(c1, row[3] == want[3]);
    }

    // columns: region, group, n_total, network_n, network_pct,
    //          textsecure_n, textsecure_pct, threema_n, threema_pct,
    //          wechat_n, wechat_pct, whatsapp_n, whatsapp_pct
    auto jur = csv_by_key(jur_res.out, 2);
    REQUIRE(jur.count("Europe|5 Eyes") == 1);
    REQUIRE(jur.count("Europe|EU") == 1);
    REQUIRE(jur.count("Europe|China") == 1);
    const auto& eyes = jur["Europe|5 Eyes"];
    const auto& eu = jur["Europe|EU"];
    const auto& china = jur["Europe|China"];
    ACC_CHECK(c2, eyes[2] == "120");
    ACC_CHECK(c2, eyes[3] == "86");   // network 86/120
    ACC_CHECK(c2, eyes[4] == "72");   // -> 72%
    ACC_CHECK(c2, eu[3] == "118");    // EU network 118/120
    ACC_CHECK(c2, eu[4] == "98");     // -> 98%
    ACC_CHECK(c2, eyes[7] == "68");   // Threema 5 Eyes 68/120
    ACC_CHECK(c2, eyes[8] == "57");   // -> 57%
    ACC_CHECK(c2, eyes[9] == "119");  // WeChat 5 Eyes 119/120
    ACC_CHECK(c2, eyes[10] == "99");  // -> 99%
    ACC_CHECK(c2, china[9] == "120"); // WeChat China 120/120
    ACC_CHECK(c2, china[10] == "100");
    // suppressed all-zero groups stay out of the report
    ACC_CHECK(c2, jur_res.out.find("Russia") == std::string::npos);
    ACC_CHECK(c2, jur_res.out.find("Arab League") == std::string::npos);

    c1.finish();
    c2.finish();
}

TEST_CASE("criterion 3: pair-count identities") {
    Criterion c(3, "29 nodes give 406 unordered pairs; 4 apps give 1624 slots");
    std::vector<VantagePoint> points;
    for (int i = 0; i < 29; ++i)
        points.push_back({"n" + std::to_string(100 + i), "DE", "", {static_cast<uint32_t>(i)}});
    auto pairs = campaign::generate_pairs(points, campaign::Pairing::unordered_pairs);
    ACC_CHECK(c, pairs.size() == 406);
    ACC_CHECK(c, pairs.size() * 4 == 1624);
}

TEST_CASE("criterion 4: geolocation lookup equals the linear-scan oracle") {
    Criterion c(4, "lookup matches a linear-scan oracle on 10^4 addresses");
    testsupport::TempDir tmp("acc_geo");
    testsupport::Rng rng(404);
    RegionScheme scheme;
    const char* codes[] = {"US", "DE", "CH", "JP", "AU"};
    scheme.entries["US"] = {Region::americas, "Northern America"};
    scheme.entries["DE"] = {Region::europe, "Western Europe"};
    scheme.entries["CH"] = {Region::europe, "Western Europe"};
    scheme.entries["JP"] = {Region::asia, "Eastern Asia"};
    scheme.entries["AU"] = {Region::oceania, "Australia and New Zealand"};

    std::string ranges;
    uint64_t cursor = 0;
    int n_ranges = 0;
    while (n_ranges < 1000) {
        uint64_t from = cursor + 1 + rng() % 800000;
        uint64_t to = from + rng() % 2500000;
        if (to > 0xfffffff0ull) break;
        ranges += std::to_string(from) + "," + std::to_string(to) + "," +
                  codes[n_ranges % 5] + ",x\n";
        cursor = to;
        ++n_ranges;
    }
    ACC_CHECK(c, n_ranges == 1000);
    write_file(tmp.file("ranges.csv"), ranges);
    write_file(tmp.file("overrides.csv"), "10.0.0.0/8,CH\n172.16.0.0/12,DE\n");
    write_file(tmp.file("centroids.csv"),
               "US,39.8,-98.6\nDE,51.2,10.4\nCH,46.8,8.2\nJP,36.5,138.0\nAU,-25.7,134.5\n");
    geo::GeoDb db = geo::load_geodb(tmp.file("ranges.csv"), tmp.file("overrides.csv"),
                                    tmp.file("centroids.csv"), scheme);

    auto start = std::chrono::steady_clock::now();
    int agree = 0;
    for (int i = 0; i < 10000; ++i) {
        Ipv4 ip = testsupport::gen_ip(rng);
        if (geo::lookup(db, ip) == testsupport::oracle_lookup(db, ip)) ++agree;
    }
    double elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ACC_CHECK(c, agree == 10000);
    ACC_CHECK(c, elapsed_s < 2.0);
}

TEST_CASE("criterion 5: accessibility properties over random paths") {
    Criterion c(5, "group monotonicity, empty set, and source-country access");
    testsupport::Rng rng(505);
    const std::vector<std::string> codes{"DE", "FR", "ES", "GB", "PL", "CH", "NO", "US",
                                         "CA", "AR", "BR", "IL", "CN", "AU", "NZ", "JP"};
    int violations = 0;
    for (int round = 0; round < 1000; ++round) {
        // random path, source first
        std::string src = codes[static_cast<size_t>(testsupport::pick(rng, 0, 15))];
        locality::GeoPath path;
        path.countries.push_back(src);
        int hops = testsupport::pick(rng, 0, 6);
        for (int i = 0; i < hops; ++i)
            path.countries.push_back(codes[static_cast<size_t>(testsupport::pick(rng, 0, 15))]);
        auto countries = path.country_set();

        std::set<std::string> small, big;
        for (const std::string& cc : codes) {
            int dice = testsupport::pick(rng, 0, 3);
            if (dice == 0) small.insert(cc);
            if (dice <= 1) big.insert(cc);
        }
        big.insert(small.begin(), small.end());
        if (!small.empty() && !big.empty()) {
            bool small_access = locality::accessible_to({"small", small}, countries);
            bool big_access = locality::accessible_to({"big", big}, countries);
            if (small_access && !big_access) ++violations;
        }
        if (locality::accessible_to({"any", {"DE", "US", "CN"}}, {})) ++violations;
        if (!locality::accessible_to({"own", {src}}, countries)) ++violations;
    }
    ACC_CHECK(c, violations == 0);
}

TEST_CASE("criterion 6: classification partition and fixed-point properties") {
    Criterion c(6, "partition covers input exactly once; loop fixed point is stable");
    testsupport::Rng rng(606);
    int violations = 0;
    for (int round = 0; round < 1000; ++round) {
        std::vector<flows::FlowRecord> records;
        int n = testsupport::pick(rng, 0, 25);
        for (int i = 0; i < n; ++i) records.push_back(testsupport::gen_flow(rng));

        flows::ClassificationLists lists;
        for (int i = 0; i < testsupport::pick(rng, 0, 4) && !records.empty(); ++i) {
            const auto& f = records[static_cast<size_t>(testsupport::pick(rng, 0, n - 1))];
            flows::ListEntry e{"app", to_string(f.dst)};
            auto& side = testsupport::pick(rng, 0, 1) ? lists.whitelist : lists.blacklist;
            side.push_back(e);
        }
        auto& bl = lists.blacklist;
        bl.erase(std::remove_if(bl.begin(), bl.end(),
                                [&](const flows::ListEntry& e) {
                                    return std::count(lists.whitelist.begin(),
                                                      lists.whitelist.end(), e) > 0;
                                }),
                 bl.end());

        flows::Partition p = flows::classify_flows(records, lists, "app");
        if (p.messaging.size() + p.background.size() + p.unknown.size() != records.size())
            ++violations;

        int decide_calls = 0;
        auto final_lists = flows::classification_loop(
            records, lists, "app", [&](const flows::UnknownEndpoint&) {
                ++decide_calls;
                return testsupport::pick(rng, 0, 1) ? flows::Decision::whitelist
                                                    : flows::Decision::blacklist;
            });
        flows::Partition resolved = flows::classify_flows(records, final_lists, "app");
        if (!resolved.unknown.empty()) ++violations;

        int second_calls = 0;
        flows::classification_loop(records, final_lists, "app",
                                   [&second_calls](const flows::UnknownEndpoint&) {
                                       ++second_calls;
                                       return flows::Decision::blacklist;
                                   });
        if (second_calls != 0) ++violations;  // fixed point must not re-ask
    }
    ACC_CHECK(c, violations == 0);
}

TEST_CASE("criterion 7: correlation equals brute-force interval intersection") {
    Criterion c(7, "timer correlation matches the oracle on 10^3 random fixtures");
    testsupport::Rng rng(707);
    int agree = 0;
    for (int round = 0; round < 1000; ++round) {
        flows::MessageSchedule schedule;
        int64_t t = 1443600000000 + testsupport::pick(rng, 0, 5000);
        int sends = testsupport::pick(rng, 1, 8);
        for (int i = 0; i < sends; ++i) {
            schedule.send_instants.emplace_back(UtcInstant{t}, i % 2 ? "b" : "a");
            t += 1 + testsupport::pick(rng, 0, 15000);
        }
        schedule.experiment_end = {t + 30000};
        double window = (1 + testsupport::pick(rng, 0, 7999)) / 1000.0;

        std::vector<flows::FlowRecord> records;
        int n = testsupport::pick(rng, 1, 10);
        for (int i = 0; i < n; ++i) records.push_back(testsupport::gen_flow(rng));

        auto got = flows::correlate_messages(records, schedule, window);
        std::vector<flows::FlowRecord> want_correlated, want_not;
        for (const auto& f : records)
            (testsupport::oracle_correlated(f, schedule, window) ? want_correlated : want_not)
                .push_back(f);
        if (got.timer_correlated == want_correlated && got.uncorrelated == want_not) ++agree;
    }
    ACC_CHECK(c, agree == 1000);
}

TEST_CASE("criterion 8: text and persistence round-trips") {
    Criterion c(8, "traceroute parse/render and save/load round-trips hold");
    testsupport::TempDir tmp("acc_rt");
    testsupport::Rng rng(808);
    int text_ok = 0, persist_ok = 0;
    std::vector<PathMeasurement> batch;
    for (int i = 0; i < 1000; ++i) {
        PathMeasurement m = testsupport::gen_measurement(rng);
        trace::ParseMeta meta{m.source, m.kind, m.timestamp, m.protocol, m.port};
        if (trace::parse_traceroute(trace::render_traceroute(m), meta) == m) ++text_ok;
        batch.push_back(std::move(m));
    }
    report::save_measurements(tmp.file("batch.jsonl"), batch);
    auto loaded = report::load_measurements(tmp.file("batch.jsonl"));
    if (loaded.size() == batch.size())
        for (size_t i = 0; i < batch.size(); ++i)
            if (loaded[i] == batch[i]) ++persist_ok;
    ACC_CHECK(c, text_ok == 1000);
    ACC_CHECK(c, persist_ok == 1000);
}

TEST_CASE("criterion 9: rtt plausibility flags") {
    Criterion c(9, "no false flags in-country; the far-hop fixture flags exactly once");
    testsupport::TempDir tmp("acc_rtt");
    RegionScheme scheme;
    scheme.entries["DE"] = {Region::europe, "Western Europe"};
    scheme.entries["JP"] = {Region::asia, "Eastern Asia"};
    write_file(tmp.file("ranges.csv"), "1000,1999,DE,Germany\n3000,3999,JP,Japan\n");
    write_file(tmp.file("overrides.csv"), "");
    write_file(tmp.file("centroids.csv"), "DE,51.2,10.4\nJP,36.5,138.0\n");
    geo::GeoDb db = geo::load_geodb(tmp.file("ranges.csv"), tmp.file("overrides.csv"),
                                    tmp.file("centroids.csv"), scheme);

    // same-country hops never flag, whatever the rtt
    testsupport::Rng rng(909);
    int false_flags = 0;
    for (int i = 0; i < 1000; ++i) {
        PathMeasurement m;
        m.source = "de";
        m.port = 443;
        double rtt = testsupport::pick(rng, 0, 400000) / 1000.0;
        m.hops.push_back({1, {make_responder({1000u + static_cast<uint32_t>(i % 1000)}, "", {rtt})}});
        false_flags += static_cast<int>(geo::rtt_plausibility(m, db, "DE").size());
    }
    ACC_CHECK(c, false_flags == 0);

    // DE -> JP is near 9000 km; at 5 ms the budget is 500 km
    double distance = testsupport::oracle_distance_km({51.2, 10.4}, {36.5, 138.0});
    ACC_CHECK(c, distance > 5.0 * 100.0);
    PathMeasurement m;
    m.source = "de";
    m.port = 443;
    m.hops.push_back({1, {make_responder({1500}, "", {1.0})}});  // DE hop
    m.hops.push_back({2, {make_responder({3500}, "", {5.0})}});  // JP hop at 5 ms
    auto flags = geo::rtt_plausibility(m, db, "DE");
    ACC_CHECK(c, flags.size() == 1);
    if (flags.size() == 1) {
        ACC_CHECK(c, flags[0].country == "JP");
        ACC_CHECK(c, std::abs(flags[0].distance_km - distance) < 1.0);
        ACC_CHECK(c, flags[0].limit_km == 500.0);
    }
}

TEST_CASE("criterion 10: campaign replay with kill and resume") {
    Criterion c(10, "replay completes all slots; kill+resume reproduces the record set");
    testsupport::TempDir tmp("acc_campaign");

    // all four region campaigns complete every slot
    const std::map<std::string, size_t> expected{
        {"europe", 480}, {"asia", 112}, {"oceania", 12}, {"americas", 40}};
    for (const auto& [region, slots] : expected) {
        std::string out_dir = tmp.file("run_" + region);
        auto res = run_cli({"campaign", "run", "--config",
                            data_path("fixtures/campaign28/campaign_" + region + ".json"),
                            "--out-dir", out_dir});
        ACC_CHECK(c, res.exit_code == 0);
        auto records = report::load_experiments(out_dir + "/records.jsonl");
        ACC_CHECK(c, records.size() == slots);
        for (const auto& rec : records) c.expect(rec.status == ExperimentStatus::complete);
    }

    // throttled europe campaign, killed mid-flight
    std::string config_text = read_file(data_path("fixtures/campaign28/campaign_europe.json"));
    std::string fixture_abs = data_path("fixtures/campaign28/experiments_europe.jsonl");
    size_t pos = config_text.find("\"fixtures\": [\"experiments_europe.jsonl\"]");
    REQUIRE(pos != std::string::npos);
    config_text.replace(pos, std::string("\"fixtures\": [\"experiments_europe.jsonl\"]").size(),
                        "\"throttle_ms\": 20, \"fixtures\": [\"" + fixture_abs + "\"]");
    write_file(tmp.file("campaign_throttled.json"), config_text);

    std::string killed_dir = tmp.file("killed");
    pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        execl(PATHLOC_BIN, PATHLOC_BIN, "campaign", "run", "--config",
              tmp.file("campaign_throttled.json").c_str(), "--out-dir", killed_dir.c_str(),
              static_cast<char*>(nullptr));
        _exit(127);
    }
    std::string journal = killed_dir + "/journal.csv";
    for (int i = 0; i < 1000 && count_journal_lines(journal) < 40; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    int after_kill = count_journal_lines(journal);
    ACC_CHECK(c, after_kill >= 40);
    ACC_CHECK(c, after_kill < 480);

    auto resume = run_cli({"campaign", "run", "--config", tmp.file("campaign_throttled.json"),
                           "--out-dir", killed_dir, "--resume"},
                          120000);
    ACC_CHECK(c, resume.exit_code == 0);
    // resumed slots were skipped, not re-run
    ACC_CHECK(c, resume.err.find("skipped") != std::string::npos);

    ACC_CHECK(c, read_file(killed_dir + "/records.jsonl") ==
                     read_file(tmp.file("run_europe") + "/records.jsonl"));
}
