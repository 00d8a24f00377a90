#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pathloc/flows.hpp"
#include "pathloc/model.hpp"

namespace pathloc::campaign {

struct AppConfig {
    std::string name;
    std::vector<std::string> message_texts;
    int n_messages = 0;
    std::vector<double> timer_offsets_s;        // send offsets, one per message
    std::pair<double, double> end_window_s{30.0, 620.0};
    std::vector<uint16_t> port_blacklist;
    std::vector<std::string> host_blacklist;
    double correlation_window_s = 2.0;

    void validate() const;  // n_messages == timers length, window min <= max
};

enum class Pairing { unordered_pairs, unordered_pairs_with_self, ordered_pairs };

Pairing parse_pairing(std::string_view s, int line = -1);
std::string_view to_string(Pairing p);

struct CampaignConfig {
    std::vector<AppConfig> apps;
    std::vector<VantagePoint> vantage_points;
    Pairing pairing = Pairing::unordered_pairs;
    int parallelism = 1;
    int retries = 0;
    int chunk_size = 10;
    uint64_t seed = 0;
    int throttle_ms = 0;           // per-experiment pacing delay
    std::string executor = "replay";
    std::vector<std::string> fixture_files;  // replay inputs, relative to config dir

    void validate() const;
};

// JSON config file; relative fixture paths resolve against the config's
// directory.
CampaignConfig load_campaign_config(const std::string& path);

// UnorderedPairs: C(n,2); WithSelf: C(n,2)+n; OrderedPairs: n(n-1).
// Deterministic lexicographic order by vantage id. Throws TooFewPoints.
std::vector<std::pair<VantagePoint, VantagePoint>> generate_pairs(
    std::span<const VantagePoint> points, Pairing pairing);

// Send instants at the configured offsets, alternating sender starting with
// the first pair member; experiment end drawn uniformly from end_window_s.
flows::MessageSchedule build_schedule(const AppConfig& app,
                                      const std::pair<std::string, std::string>& pair_ids,
                                      UtcInstant start,
                                      const std::function<uint32_t()>& rand32);

class Executor {
public:
    virtual ~Executor() = default;
    virtual ExperimentRecord run_experiment(const std::string& app,
                                            const VantagePoint& src,
                                            const VantagePoint& dst,
                                            const flows::MessageSchedule& schedule) = 0;
};

// Replays experiments from record files on disk, keyed by (app, src, dst).
// Throws ExecutorError for slots absent from the fixtures.
class ReplayExecutor : public Executor {
public:
    explicit ReplayExecutor(const std::vector<std::string>& record_files);

    ExperimentRecord run_experiment(const std::string& app, const VantagePoint& src,
                                    const VantagePoint& dst,
                                    const flows::MessageSchedule& schedule) override;

    size_t size() const { return index_.size(); }

private:
    std::map<std::tuple<std::string, std::string, std::string>, ExperimentRecord> index_;
};

struct CampaignResult {
    std::vector<ExperimentRecord> records;  // sorted by (app, src, dst)
    int failed_slots = 0;
    int retried_slots = 0;
    int skipped_slots = 0;  // already terminal in the journal (resume)
    std::vector<std::string> failure_log;
};

// Dispatches apps x pairs in chunks with up to `parallelism` experiments in
// flight, retrying failures up to `retries` times. Journal lines
// "app,src_id,dst_id,status,attempts,timestamp" and per-experiment records
// are appended as slots finish, so a killed campaign resumes from where it
// stopped; terminal slots (complete or failed) are never re-run. The final
// record set is written to out_dir/records.jsonl sorted by (app, src, dst)
// and is identical for interrupted-and-resumed and uninterrupted runs.
CampaignResult run_campaign(const CampaignConfig& config, Executor& executor,
                            const std::filesystem::path& out_dir, bool resume);

}  // namespace pathloc::campaign
