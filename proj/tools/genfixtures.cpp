// Regenerates the bundled data files and the campaign28 replay dataset.
// Output is deterministic; the test suite checks the committed files match.

#include <filesystem>
#include <iostream>

#include "fixtureplan.hpp"
#include "pathloc/report.hpp"
#include "pathloc/strings.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    fs::path root = argc > 1 ? argv[1] : "data";
    fs::path campaign_dir = root / "fixtures" / "campaign28";
    fs::path flows_dir = root / "fixtures" / "flows";
    fs::path traces_dir = root / "fixtures" / "traces";
    fs::create_directories(campaign_dir);
    fs::create_directories(flows_dir);
    fs::create_directories(traces_dir);

    using pathloc::write_file;

    write_file((root / "regions.csv").string(), fixtureplan::regions_csv());
    write_file((root / "groups.csv").string(), fixtureplan::groups_csv());
    write_file((root / "centroids.csv").string(), fixtureplan::centroids_csv());
    write_file((root / "overrides.csv").string(), fixtureplan::overrides_csv());

    write_file((campaign_dir / "ranges.csv").string(), fixtureplan::ranges_csv());
    write_file((campaign_dir / "vantage_points.csv").string(), fixtureplan::vantage_csv());

    size_t total = 0;
    for (const std::string& region : fixtureplan::region_keys()) {
        auto records = fixtureplan::build_experiments(region);
        total += records.size();
        std::string fixture_file = "experiments_" + region + ".jsonl";
        pathloc::report::save_experiments((campaign_dir / fixture_file).string(), records);
        write_file((campaign_dir / ("campaign_" + region + ".json")).string(),
                   fixtureplan::campaign_json(region, fixture_file));
    }

    write_file((flows_dir / "whatsapp_de.csv").string(), fixtureplan::flows_whatsapp_csv());
    write_file((flows_dir / "background_de.csv").string(), fixtureplan::flows_background_csv());
    write_file((flows_dir / "lists.csv").string(), fixtureplan::flows_lists_csv());
    write_file((flows_dir / "dns_cn.csv").string(), fixtureplan::flows_dns_cn_csv());
    write_file((flows_dir / "dns_de.csv").string(), fixtureplan::flows_dns_de_csv());

    for (const auto& [name, text] : fixtureplan::trace_samples())
        write_file((traces_dir / name).string(), text);

    std::cerr << "wrote " << total << " experiment records under " << campaign_dir << "\n";
    return 0;
}
