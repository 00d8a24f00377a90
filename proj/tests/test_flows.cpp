#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "pathloc/error.hpp"
#include "pathloc/flows.hpp"

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace pathloc;
using namespace pathloc::flows;

namespace {

const char* kLog =
    "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
    "192.168.1.2,84.21.0.5,tcp,40000,5222,2015-09-30T12:00:00Z,2015-09-30T12:00:05Z,10,2000,e1.whatsapp.net\n"
    "192.168.1.2,91.189.94.4,udp,40001,123,2015-09-30T12:00:01Z,2015-09-30T12:00:01.200Z,2,180,pool.ntp.org\n"
    "192.168.1.2,84.99.0.1,tcp,40002,443,2015-09-30T12:00:02Z,2015-09-30T12:00:04Z,4,900,\n";

std::vector<FlowRecord> parse_log(const std::string& text) {
    std::istringstream in(text);
    return ingest_flow_log(in, "inline");
}

ClassificationLists demo_lists() {
    ClassificationLists lists;
    lists.whitelist.push_back({"whatsapp", "e1.whatsapp.net"});
    lists.whitelist.push_back({"whatsapp", "84.21.0.5"});
    lists.blacklist.push_back({"whatsapp", "pool.ntp.org"});
    return lists;
}

FlowRecord flow_at(double first_s, double last_s, Ipv4 dst = {0x01010101}) {
    FlowRecord f;
    f.src = {0xc0a80102};
    f.dst = dst;
    f.protocol = Protocol::tcp;
    f.src_port = 40000;
    f.dst_port = 443;
    f.first_seen = {static_cast<int64_t>(first_s * 1000)};
    f.last_seen = {static_cast<int64_t>(last_s * 1000)};
    f.packets = 1;
    f.bytes = 64;
    return f;
}

MessageSchedule schedule_at(std::initializer_list<double> sends_s, double end_s) {
    MessageSchedule s;
    int i = 0;
    for (double t : sends_s)
        s.send_instants.emplace_back(UtcInstant{static_cast<int64_t>(t * 1000)},
                                     i++ % 2 == 0 ? "a" : "b");
    s.experiment_end = {static_cast<int64_t>(end_s * 1000)};
    return s;
}

}  // namespace

TEST_SUITE("flows") {

TEST_CASE("three valid lines ingest into three records") {
    auto records = parse_log(kLog);
    REQUIRE(records.size() == 3);
    CHECK(records[0].dns_names == std::set<std::string>{"e1.whatsapp.net"});
    CHECK(records[1].protocol == Protocol::udp);
    CHECK(records[2].dns_names.empty());
    CHECK(records[0].packets == 10);
}

TEST_CASE("reversed timestamps are a schema error with the line number") {
    std::string bad =
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "1.2.3.4,5.6.7.8,tcp,1,2,2015-09-30T12:00:05Z,2015-09-30T12:00:00Z,1,10,\n";
    try {
        parse_log(bad);
        FAIL("expected SchemaError");
    } catch (const Error& e) {
        CHECK(e.code() == "SchemaError");
        CHECK(e.line() == 2);
    }
}

TEST_CASE("flow log rejections") {
    CHECK_THROWS_WITH_AS(parse_log(""), doctest::Contains("EmptyFile"), Error);
    CHECK_THROWS_AS(parse_log("src,dst\n1.2.3.4\n"), Error);
    std::string short_row =
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "1.2.3.4,5.6.7.8,tcp,1,2\n";
    CHECK_THROWS_AS(parse_log(short_row), Error);
    std::string bytes_lt_packets =
        "src,dst,proto,src_port,dst_port,first_seen,last_seen,packets,bytes,dns_names\n"
        "1.2.3.4,5.6.7.8,tcp,1,2,2015-09-30T12:00:00Z,2015-09-30T12:00:01Z,10,5,\n";
    CHECK_THROWS_AS(parse_log(bytes_lt_packets), Error);
}

TEST_CASE("flow log round-trips through its renderer") {
    auto records = parse_log(kLog);
    auto again = parse_log(render_flow_log(records));
    CHECK(again == records);
}

TEST_CASE("classification puts flows where the lists say") {
    auto records = parse_log(kLog);
    Partition p = classify_flows(records, demo_lists(), "whatsapp");
    REQUIRE(p.messaging.size() == 1);
    CHECK(p.messaging[0].dst == parse_ipv4("84.21.0.5"));
    REQUIRE(p.background.size() == 1);  // the NTP flow
    CHECK(p.background[0].dst_port == 123);
    REQUIRE(p.unknown.size() == 1);
    CHECK(p.unknown[0].dst == parse_ipv4("84.99.0.1"));
}

TEST_CASE("rfc1918 destinations sink to background") {
    FlowRecord f = flow_at(0, 1, parse_ipv4("10.11.0.1"));
    Partition p = classify_flows({&f, 1}, demo_lists(), "whatsapp");
    CHECK(p.background.size() == 1);
}

TEST_CASE("suffix patterns match dns names") {
    ClassificationLists lists;
    lists.blacklist.push_back({"app", ".gstatic.com"});
    FlowRecord f = flow_at(0, 1, parse_ipv4("84.5.6.7"));
    f.dns_names = {"connectivitycheck.gstatic.com"};
    Partition p = classify_flows({&f, 1}, lists, "app");
    CHECK(p.background.size() == 1);
    // entries for other apps never match
    Partition q = classify_flows({&f, 1}, lists, "otherapp");
    CHECK(q.unknown.size() == 1);
}

TEST_CASE("whitelist and blacklist may not share an entry") {
    ClassificationLists lists;
    lists.whitelist.push_back({"app", "84.21.0.5"});
    lists.blacklist.push_back({"app", "84.21.0.5"});
    CHECK_THROWS_AS(lists.validate(), Error);
    // same pattern under different apps is fine
    ClassificationLists ok;
    ok.whitelist.push_back({"app1", "84.21.0.5"});
    ok.blacklist.push_back({"app2", "84.21.0.5"});
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("lists file round-trip") {
    testsupport::TempDir tmp("lists");
    save_lists(tmp.file("lists.csv"), demo_lists());
    CHECK(load_lists(tmp.file("lists.csv")) == demo_lists());
}

TEST_CASE("partition property: every flow lands in exactly one class") {
    testsupport::Rng rng(99);
    for (int round = 0; round < 100; ++round) {
        std::vector<FlowRecord> records;
        int n = testsupport::pick(rng, 0, 40);
        for (int i = 0; i < n; ++i) records.push_back(testsupport::gen_flow(rng));
        ClassificationLists lists;
        for (int i = 0; i < 5 && !records.empty(); ++i) {
            const FlowRecord& f = records[testsupport::pick(rng, 0, n - 1)];
            ListEntry e{"app", to_string(f.dst)};
            if (testsupport::pick(rng, 0, 1))
                lists.whitelist.push_back(e);
            else
                lists.blacklist.push_back(e);
        }
        // drop blacklist duplicates of whitelist entries
        auto& bl = lists.blacklist;
        bl.erase(std::remove_if(bl.begin(), bl.end(),
                                [&](const ListEntry& e) {
                                    return std::count(lists.whitelist.begin(),
                                                      lists.whitelist.end(), e) > 0;
                                }),
                 bl.end());
        Partition p = classify_flows(records, lists, "app");
        CHECK(p.messaging.size() + p.background.size() + p.unknown.size() == records.size());
        std::vector<FlowRecord> all;
        for (const auto* bucket : {&p.messaging, &p.background, &p.unknown})
            all.insert(all.end(), bucket->begin(), bucket->end());
        auto key = [](const FlowRecord& f) {
            return std::tuple(f.src, f.dst, f.src_port, f.dst_port, f.first_seen.ms);
        };
        std::sort(all.begin(), all.end(),
                  [&](const FlowRecord& a, const FlowRecord& b) { return key(a) < key(b); });
        std::vector<FlowRecord> input(records.begin(), records.end());
        std::sort(input.begin(), input.end(),
                  [&](const FlowRecord& a, const FlowRecord& b) { return key(a) < key(b); });
        CHECK(all == input);
    }
}

TEST_CASE("classification loop: fixed point means decide is never called") {
    auto records = parse_log(kLog);
    ClassificationLists lists = demo_lists();
    lists.blacklist.push_back({"whatsapp", "84.99.0.1"});  // resolve the unknown
    int calls = 0;
    auto final_lists = classification_loop(records, lists, "whatsapp",
                                           [&calls](const UnknownEndpoint&) {
                                               ++calls;
                                               return Decision::blacklist;
                                           });
    CHECK(calls == 0);
    CHECK(final_lists == lists);
}

TEST_CASE("classification loop asks once per distinct endpoint") {
    std::vector<FlowRecord> records;
    for (int i = 0; i < 3; ++i) {
        for (uint32_t d = 0; d < 5; ++d) records.push_back(flow_at(i, i + 1, {0x54000000u + d}));
    }
    int calls = 0;
    auto lists = classification_loop(records, {}, "app", [&calls](const UnknownEndpoint&) {
        ++calls;
        return Decision::blacklist;
    });
    CHECK(calls == 5);
    CHECK(lists.blacklist.size() == 5);
    Partition p = classify_flows(records, lists, "app");
    CHECK(p.unknown.empty());
    CHECK(p.background.size() == records.size());
}

TEST_CASE("alternating decisions resolve in one pass") {
    std::vector<FlowRecord> records;
    for (uint32_t d = 0; d < 6; ++d) records.push_back(flow_at(d, d + 1, {0x55000000u + d}));
    int calls = 0;
    auto lists = classification_loop(records, {}, "app", [&calls](const UnknownEndpoint&) {
        return calls++ % 2 == 0 ? Decision::whitelist : Decision::blacklist;
    });
    CHECK(calls == 6);
    CHECK(lists.whitelist.size() == 3);
    CHECK(lists.blacklist.size() == 3);
    Partition p = classify_flows(records, lists, "app");
    CHECK(p.unknown.empty());
    CHECK(p.messaging.size() == 3);
    CHECK(p.background.size() == 3);
}

TEST_CASE("classification loop gives up after the iteration bound") {
    std::vector<FlowRecord> records{flow_at(0, 1, {0x56000001})};
    CHECK_THROWS_WITH_AS(
        classification_loop(records, {}, "app",
                            [](const UnknownEndpoint&) { return Decision::blacklist; }, 0),
        doctest::Contains("NonTermination"), Error);
}

TEST_CASE("baseline candidates carry per-capture counts") {
    CHECK(baseline_background({}).empty());
    CHECK(baseline_background({{"eu", {}}}).empty());

    std::vector<FlowRecord> eu;
    for (uint32_t d = 0; d < 4; ++d) eu.push_back(flow_at(d, d + 1, {0x60000000u + d}));
    auto candidates = baseline_background({{"eu", eu}});
    CHECK(candidates.size() == 4);

    std::vector<FlowRecord> us{flow_at(0, 1, {0x60000000u}), flow_at(2, 3, {0x61000000u})};
    candidates = baseline_background({{"eu", eu}, {"us", us}});
    REQUIRE(candidates.size() == 5);  // union of 4 + 1 new
    for (const auto& c : candidates) {
        if (c.dst == Ipv4{0x60000000u}) {
            CHECK(c.observations == 2);
            CHECK(c.per_capture.at("eu") == 1);
            CHECK(c.per_capture.at("us") == 1);
        }
    }
}

TEST_CASE("message correlation follows the send windows") {
    MessageSchedule sched = schedule_at({0, 5, 10, 15}, 300);
    // flow at 5.3 s with a 2 s window around the 5 s send
    auto c = correlate_messages(std::vector<FlowRecord>{flow_at(5.3, 5.4)}, sched, 2.0);
    CHECK(c.timer_correlated.size() == 1);
    // flow two minutes after the last send
    c = correlate_messages(std::vector<FlowRecord>{flow_at(120, 121)}, sched, 2.0);
    CHECK(c.uncorrelated.size() == 1);
    // flow spanning 3.5-4.5 s, window 1 s: correlated via the t=5 send
    c = correlate_messages(std::vector<FlowRecord>{flow_at(3.5, 4.5)},
                           schedule_at({0, 5}, 300), 1.0);
    CHECK(c.timer_correlated.size() == 1);
    CHECK_THROWS_AS(correlate_messages({}, sched, 0.0), Error);
}

TEST_CASE("correlation agrees with the brute-force oracle") {
    testsupport::Rng rng(1443);
    for (int round = 0; round < 1000; ++round) {
        MessageSchedule sched;
        int64_t t = 1443600000000 + testsupport::pick(rng, 0, 10000);
        int sends = testsupport::pick(rng, 1, 6);
        for (int i = 0; i < sends; ++i) {
            sched.send_instants.emplace_back(UtcInstant{t}, i % 2 ? "b" : "a");
            t += testsupport::pick(rng, 1, 20000);
        }
        sched.experiment_end = {t + 600000};
        double window = testsupport::pick(rng, 1, 8000) / 1000.0;
        FlowRecord f = testsupport::gen_flow(rng);
        auto c = correlate_messages({&f, 1}, sched, window);
        bool expect = testsupport::oracle_correlated(f, sched, window);
        CHECK(c.timer_correlated.size() == (expect ? 1u : 0u));
    }
}

TEST_CASE("schedule invariants are enforced") {
    MessageSchedule bad = schedule_at({5, 5}, 300);
    CHECK_THROWS_AS(bad.validate(), Error);
    MessageSchedule early_end = schedule_at({0, 5}, 3);
    CHECK_THROWS_AS(early_end.validate(), Error);
}

TEST_CASE("endpoint extraction dedupes on (dst, proto, port)") {
    std::vector<FlowRecord> records;
    for (int i = 0; i < 10; ++i) {
        FlowRecord f = flow_at(i, i + 1, parse_ipv4("84.21.0.5"));
        f.dst_port = 443;
        records.push_back(f);
    }
    auto endpoints = extract_endpoints(records, "whatsapp");
    REQUIRE(endpoints.size() == 1);
    CHECK(endpoints[0].app == "whatsapp");
    CHECK(endpoints[0].port == 443);

    FlowRecord other = flow_at(0, 1, parse_ipv4("84.21.0.5"));
    other.dst_port = 5222;
    records.push_back(other);
    CHECK(extract_endpoints(records, "whatsapp").size() == 2);

    records.clear();
    FlowRecord a = flow_at(0, 1, parse_ipv4("84.21.0.5"));
    a.dns_names = {"e1.whatsapp.net"};
    FlowRecord b = flow_at(2, 3, parse_ipv4("84.21.0.5"));
    b.dns_names = {"e2.whatsapp.net"};
    a.dst_port = b.dst_port = 443;
    records = {a, b};
    auto merged = extract_endpoints(records, "whatsapp");
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].dns_names == std::set<std::string>{"e1.whatsapp.net", "e2.whatsapp.net"});
}

TEST_CASE("endpoint count never exceeds distinct key count") {
    testsupport::Rng rng(5);
    for (int round = 0; round < 50; ++round) {
        std::vector<FlowRecord> records;
        std::set<std::tuple<Ipv4, Protocol, uint16_t>> keys;
        int n = testsupport::pick(rng, 0, 30);
        for (int i = 0; i < n; ++i) {
            FlowRecord f = testsupport::gen_flow(rng);
            records.push_back(f);
            keys.insert({f.dst, f.protocol, f.dst_port});
        }
        CHECK(extract_endpoints(records, "app").size() == keys.size());
    }
}

TEST_CASE("resolution snapshots expose split-horizon names") {
    FlowRecord cn = flow_at(0, 1, parse_ipv4("78.20.0.5"));
    cn.dns_names = {"short.weixin.qq.com"};
    FlowRecord de = flow_at(0, 1, parse_ipv4("78.21.0.5"));
    de.dns_names = {"short.weixin.qq.com"};
    FlowRecord same_cn = flow_at(2, 3, parse_ipv4("84.20.0.5"));
    same_cn.dns_names = {"textsecure-service.whispersystems.org"};
    FlowRecord same_de = same_cn;

    NameMap from_cn = resolution_snapshot(FlowResolutionSource({cn, same_cn}));
    NameMap from_de = resolution_snapshot(FlowResolutionSource({de, same_de}));
    auto diff = split_horizon_names({{"cn", from_cn}, {"de", from_de}});
    REQUIRE(diff.size() == 1);
    CHECK(diff[0] == "short.weixin.qq.com");

    // identical bindings: no differences
    CHECK(split_horizon_names({{"cn", from_cn}, {"cn2", from_cn}}).empty());
    // empty input: empty map
    CHECK(resolution_snapshot(FlowResolutionSource({})).empty());
}

}  // TEST_SUITE
