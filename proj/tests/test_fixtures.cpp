#include <doctest.h>

#include "fixtureplan.hpp"
#include "pathloc/flows.hpp"
#include "pathloc/model.hpp"
#include "pathloc/report.hpp"
#include "pathloc/strings.hpp"

#include "support/subprocess.hpp"
#include "support/temp_dir.hpp"

using namespace pathloc;
using testsupport::data_path;

// The committed dataset must stay in sync with its generator.
TEST_SUITE("fixtures") {

TEST_CASE("committed data files match the generator output") {
    CHECK(read_file(data_path("regions.csv")) == fixtureplan::regions_csv());
    CHECK(read_file(data_path("groups.csv")) == fixtureplan::groups_csv());
    CHECK(read_file(data_path("centroids.csv")) == fixtureplan::centroids_csv());
    CHECK(read_file(data_path("fixtures/campaign28/ranges.csv")) == fixtureplan::ranges_csv());
    CHECK(read_file(data_path("fixtures/campaign28/vantage_points.csv")) ==
          fixtureplan::vantage_csv());
}

TEST_CASE("committed experiment files match the generator output") {
    testsupport::TempDir tmp("fixgen");
    for (const std::string& region : fixtureplan::region_keys()) {
        auto records = fixtureplan::build_experiments(region);
        std::string regenerated = tmp.file("experiments_" + region + ".jsonl");
        report::save_experiments(regenerated, records);
        CHECK(read_file(regenerated) ==
              read_file(data_path("fixtures/campaign28/experiments_" + region + ".jsonl")));
    }
}

TEST_CASE("fixture sizes follow the pairing formulas") {
    CHECK(fixtureplan::node_ccs().size() == 28);
    CHECK(fixtureplan::build_experiments("europe").size() == 480);    // 4 * (C(15,2)+15)
    CHECK(fixtureplan::build_experiments("asia").size() == 112);      // 4 * (C(7,2)+7)
    CHECK(fixtureplan::build_experiments("oceania").size() == 12);    // 4 * (C(2,2)+2)
    CHECK(fixtureplan::build_experiments("americas").size() == 40);   // 4 * (C(4,2)+4)
}

TEST_CASE("the bundled dns captures reveal the split-horizon name") {
    auto cn = flows::ingest_flow_log(data_path("fixtures/flows/dns_cn.csv"));
    auto de = flows::ingest_flow_log(data_path("fixtures/flows/dns_de.csv"));
    auto diff = flows::split_horizon_names(
        {{"cn", flows::resolution_snapshot(flows::FlowResolutionSource(cn))},
         {"de", flows::resolution_snapshot(flows::FlowResolutionSource(de))}});
    REQUIRE(diff.size() == 1);
    CHECK(diff[0] == "short.weixin.qq.com");
}

TEST_CASE("every fixture record passes validation") {
    RegionScheme scheme = report::load_region_scheme(data_path("regions.csv"));
    for (const std::string& region : fixtureplan::region_keys()) {
        auto records =
            report::load_experiments(data_path("fixtures/campaign28/experiments_" + region + ".jsonl"));
        for (const auto& rec : records) {
            auto errors = validate_experiment(rec, scheme);
            if (!errors.empty()) {
                CAPTURE(rec.app);
                CAPTURE(rec.src.id);
                CAPTURE(rec.dst.id);
                FAIL_CHECK(to_string(errors[0]));
            }
        }
    }
}

}  // TEST_SUITE
