#include "pathloc/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pathloc/error.hpp"
#include "pathloc/report.hpp"
#include "pathloc/strings.hpp"

namespace pathloc::campaign {

using json = nlohmann::json;

void AppConfig::validate() const {
    if (name.empty()) throw schema_error("app name is empty");
    if (n_messages != static_cast<int>(timer_offsets_s.size()))
        throw schema_error("app '" + name + "': n_messages (" + std::to_string(n_messages) +
                           ") != number of timer offsets (" + std::to_string(timer_offsets_s.size()) +
                           ")");
    for (size_t i = 1; i < timer_offsets_s.size(); ++i)
        if (!(timer_offsets_s[i - 1] < timer_offsets_s[i]))
            throw schema_error("app '" + name + "': timer offsets must be strictly increasing");
    if (end_window_s.first > end_window_s.second)
        throw schema_error("app '" + name + "': end window min > max");
}

void CampaignConfig::validate() const {
    if (apps.empty()) throw schema_error("campaign has no apps");
    std::set<std::string> app_names;
    for (const AppConfig& app : apps) {
        app.validate();
        if (!app_names.insert(app.name).second)
            throw schema_error("duplicate app '" + app.name + "'");
    }
    std::set<std::string> ids;
    for (const VantagePoint& vp : vantage_points) {
        if (vp.id.empty()) throw schema_error("vantage point with empty id");
        if (!ids.insert(vp.id).second)
            throw schema_error("duplicate vantage point id '" + vp.id + "'");
        if (!valid_country_code(vp.country))
            throw schema_error("vantage '" + vp.id + "': bad country code '" + vp.country + "'");
    }
    if (parallelism < 1) throw schema_error("parallelism must be >= 1");
    if (retries < 0) throw schema_error("retries must be >= 0");
    if (chunk_size < 1) throw schema_error("chunk_size must be >= 1");
    if (throttle_ms < 0) throw schema_error("throttle_ms must be >= 0");
    if (executor != "replay" && executor != "live")
        throw schema_error("unknown executor '" + executor + "'");
}

Pairing parse_pairing(std::string_view s, int line) {
    if (s == "unordered_pairs") return Pairing::unordered_pairs;
    if (s == "unordered_pairs_with_self") return Pairing::unordered_pairs_with_self;
    if (s == "ordered_pairs") return Pairing::ordered_pairs;
    throw schema_error("unknown pairing '" + std::string(s) + "'", line);
}

std::string_view to_string(Pairing p) {
    switch (p) {
        case Pairing::unordered_pairs: return "unordered_pairs";
        case Pairing::unordered_pairs_with_self: return "unordered_pairs_with_self";
        case Pairing::ordered_pairs: return "ordered_pairs";
    }
    return "unordered_pairs";
}

CampaignConfig load_campaign_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw schema_error(path + ": " + e.what());
    }
    try {
        CampaignConfig config;
        for (const json& aj : j.at("apps")) {
            AppConfig app;
            app.name = aj.at("name").get<std::string>();
            app.message_texts = aj.value("message_texts", std::vector<std::string>{});
            app.timer_offsets_s = aj.at("timer_offsets_s").get<std::vector<double>>();
            app.n_messages = aj.value("n_messages", static_cast<int>(app.timer_offsets_s.size()));
            if (aj.contains("end_window_s")) {
                auto w = aj.at("end_window_s").get<std::vector<double>>();
                if (w.size() != 2) throw schema_error(path + ": end_window_s needs [min, max]");
                app.end_window_s = {w[0], w[1]};
            }
            app.port_blacklist = aj.value("port_blacklist", std::vector<uint16_t>{});
            app.host_blacklist = aj.value("host_blacklist", std::vector<std::string>{});
            app.correlation_window_s = aj.value("correlation_window_s", 2.0);
            config.apps.push_back(std::move(app));
        }
        for (const json& vj : j.at("vantage_points")) {
            VantagePoint vp;
            vp.id = vj.at("id").get<std::string>();
            vp.country = vj.at("country").get<std::string>();
            vp.hostname = vj.value("hostname", "");
            vp.address = parse_ipv4(vj.at("addr").get<std::string>());
            config.vantage_points.push_back(std::move(vp));
        }
        config.pairing = parse_pairing(j.value("pairing", "unordered_pairs"));
        config.parallelism = j.value("parallelism", 1);
        config.retries = j.value("retries", 0);
        config.chunk_size = j.value("chunk_size", 10);
        config.seed = j.value("seed", 0ull);
        config.throttle_ms = j.value("throttle_ms", 0);
        config.executor = j.value("executor", "replay");
        auto dir = std::filesystem::path(path).parent_path();
        for (const std::string& f : j.value("fixtures", std::vector<std::string>{})) {
            std::filesystem::path p(f);
            config.fixture_files.push_back(p.is_absolute() ? p.string() : (dir / p).string());
        }
        config.validate();
        return config;
    } catch (const json::exception& e) {
        throw schema_error(path + ": " + e.what());
    }
}

std::vector<std::pair<VantagePoint, VantagePoint>> generate_pairs(
    std::span<const VantagePoint> points, Pairing pairing) {
    size_t minimum = pairing == Pairing::unordered_pairs_with_self ? 1 : 2;
    if (points.size() < minimum)
        throw Error("TooFewPoints", "need at least " + std::to_string(minimum) +
                                        " vantage points, got " + std::to_string(points.size()));

    std::vector<VantagePoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const VantagePoint& a, const VantagePoint& b) { return a.id < b.id; });

    std::vector<std::pair<VantagePoint, VantagePoint>> pairs;
    switch (pairing) {
        case Pairing::unordered_pairs:
            for (size_t i = 0; i < sorted.size(); ++i)
                for (size_t k = i + 1; k < sorted.size(); ++k)
                    pairs.emplace_back(sorted[i], sorted[k]);
            break;
        case Pairing::unordered_pairs_with_self:
            for (size_t i = 0; i < sorted.size(); ++i)
                for (size_t k = i; k < sorted.size(); ++k)
                    pairs.emplace_back(sorted[i], sorted[k]);
            break;
        case Pairing::ordered_pairs:
            for (size_t i = 0; i < sorted.size(); ++i)
                for (size_t k = 0; k < sorted.size(); ++k)
                    if (i != k) pairs.emplace_back(sorted[i], sorted[k]);
            break;
    }
    return pairs;
}

flows::MessageSchedule build_schedule(const AppConfig& app,
                                      const std::pair<std::string, std::string>& pair_ids,
                                      UtcInstant start, const std::function<uint32_t()>& rand32) {
    app.validate();
    flows::MessageSchedule schedule;
    for (size_t i = 0; i < app.timer_offsets_s.size(); ++i) {
        const std::string& sender = i % 2 == 0 ? pair_ids.first : pair_ids.second;
        schedule.send_instants.emplace_back(start.plus_seconds(app.timer_offsets_s[i]), sender);
    }
    double range = app.end_window_s.second - app.end_window_s.first;
    double draw = app.end_window_s.first + range * (rand32() / 4294967296.0);
    schedule.experiment_end = start.plus_seconds(draw);
    if (!schedule.send_instants.empty() &&
        schedule.experiment_end < schedule.send_instants.back().first)
        schedule.experiment_end = schedule.send_instants.back().first;
    schedule.validate();
    return schedule;
}

ReplayExecutor::ReplayExecutor(const std::vector<std::string>& record_files) {
    for (const std::string& file : record_files) {
        for (ExperimentRecord& rec : report::load_experiments(file)) {
            auto key = std::tuple(rec.app, rec.src.id, rec.dst.id);
            index_[key] = std::move(rec);
        }
    }
}

ExperimentRecord ReplayExecutor::run_experiment(const std::string& app, const VantagePoint& src,
                                                const VantagePoint& dst,
                                                const flows::MessageSchedule&) {
    auto it = index_.find(std::tuple(app, src.id, dst.id));
    if (it == index_.end())
        throw Error("ExecutorError",
                    "no fixture record for " + app + " " + src.id + "-" + dst.id);
    return it->second;
}

namespace {

struct Slot {
    std::string app;
    VantagePoint src;
    VantagePoint dst;
    const AppConfig* app_config;
};

struct JournalEntry {
    std::string status;
    int attempts = 0;
};

UtcInstant now_utc() {
    using namespace std::chrono;
    return {duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()};
}

std::vector<std::string> nonempty_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line))
        if (!trim(line).empty()) lines.push_back(line);
    return lines;
}

// A killed run may tear the file's final line mid-write; tolerate exactly
// that line, stay strict everywhere else.
std::map<std::tuple<std::string, std::string, std::string>, JournalEntry> read_journal(
    const std::filesystem::path& path) {
    std::map<std::tuple<std::string, std::string, std::string>, JournalEntry> out;
    auto lines = nonempty_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i + 1);
        try {
            auto f = split(lines[i], ',');
            if (f.size() != 6) throw schema_error(path.string() + ": bad journal line", lineno);
            JournalEntry e;
            e.status = f[3];
            e.attempts = static_cast<int>(parse_int(f[4], 0, 1 << 20, "attempts", lineno));
            out[std::tuple(f[0], f[1], f[2])] = e;
        } catch (const Error&) {
            if (i + 1 == lines.size()) break;  // torn tail from a killed run
            throw;
        }
    }
    return out;
}

uint64_t slot_seed(uint64_t campaign_seed, const Slot& slot) {
    std::hash<std::string> h;
    uint64_t v = campaign_seed;
    v = v * 1099511628211ull ^ h(slot.app);
    v = v * 1099511628211ull ^ h(slot.src.id);
    v = v * 1099511628211ull ^ h(slot.dst.id);
    return v;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config, Executor& executor,
                            const std::filesystem::path& out_dir, bool resume) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    auto journal_path = out_dir / "journal.csv";
    auto partial_path = out_dir / "records.partial.jsonl";
    auto final_path = out_dir / "records.jsonl";
    auto failures_path = out_dir / "failures.log";

    std::map<std::tuple<std::string, std::string, std::string>, JournalEntry> done;
    std::map<std::tuple<std::string, std::string, std::string>, ExperimentRecord> records;

    if (resume) {
        done = read_journal(journal_path);
        auto lines = nonempty_lines(partial_path);
        for (size_t i = 0; i < lines.size(); ++i) {
            try {
                ExperimentRecord rec =
                    report::experiment_from_line(lines[i], static_cast<int>(i + 1));
                records[std::tuple(rec.app, rec.src.id, rec.dst.id)] = std::move(rec);
            } catch (const Error&) {
                if (i + 1 == lines.size()) break;  // torn tail from a killed run
                throw;
            }
        }
    } else {
        std::filesystem::remove(journal_path);
        std::filesystem::remove(partial_path);
        std::filesystem::remove(final_path);
        std::filesystem::remove(failures_path);
    }

    auto pairs = generate_pairs(config.vantage_points, config.pairing);
    std::vector<Slot> slots;
    std::set<std::tuple<std::string, std::string, std::string>> slot_keys;
    CampaignResult result;
    for (const AppConfig& app : config.apps) {
        for (const auto& [src, dst] : pairs) {
            auto key = std::tuple(app.name, src.id, dst.id);
            slot_keys.insert(key);
            auto it = done.find(key);
            bool terminal = it != done.end() &&
                            (it->second.status == "failed" ||
                             (it->second.status == "complete" && records.count(key)));
            if (terminal) {
                ++result.skipped_slots;
                if (it->second.status == "failed" && !records.count(key))
                    records[key] = ExperimentRecord{app.name, src, dst, std::nullopt, {},
                                                    ExperimentStatus::failed};
                continue;
            }
            slots.push_back({app.name, src, dst, &app});
        }
    }

    std::ofstream journal(journal_path, std::ios::app);
    std::ofstream partial(partial_path, std::ios::app);
    std::ofstream failures(failures_path, std::ios::app);
    if (!journal || !partial || !failures)
        throw schema_error("cannot open campaign outputs under " + out_dir.string());

    std::mutex io_mutex;
    std::atomic<size_t> next{0};
    std::atomic<int> failed{0};
    std::atomic<int> retried{0};

    auto run_slot = [&](const Slot& slot) {
        uint64_t seed = slot_seed(config.seed, slot);
        auto rand32 = [state = seed]() mutable {
            // xorshift64*, folded to 32 bits
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            return static_cast<uint32_t>((state * 2685821657736338717ull) >> 32);
        };
        flows::MessageSchedule schedule =
            build_schedule(*slot.app_config, {slot.src.id, slot.dst.id}, now_utc(), rand32);

        ExperimentRecord record{slot.app, slot.src, slot.dst, std::nullopt, {},
                                ExperimentStatus::failed};
        int attempts = 0;
        bool ok = false;
        std::string last_error;
        while (attempts <= config.retries && !ok) {
            ++attempts;
            if (config.throttle_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(config.throttle_ms));
            try {
                record = executor.run_experiment(slot.app, slot.src, slot.dst, schedule);
                ok = true;
            } catch (const std::exception& e) {
                last_error = e.what();
                std::lock_guard<std::mutex> lock(io_mutex);
                failures << slot.app << ',' << slot.src.id << ',' << slot.dst.id << ",attempt "
                         << attempts << ": " << last_error << '\n';
                failures.flush();
            }
        }
        if (!ok) {
            failed.fetch_add(1);
            record = ExperimentRecord{slot.app, slot.src, slot.dst, std::nullopt, {},
                                      ExperimentStatus::failed};
        } else if (attempts > 1) {
            retried.fetch_add(1);
        }

        std::lock_guard<std::mutex> lock(io_mutex);
        journal << slot.app << ',' << slot.src.id << ',' << slot.dst.id << ','
                << to_string(record.status) << ',' << attempts << ','
                << format_rfc3339(now_utc()) << '\n';
        journal.flush();
        partial << report::experiment_to_line(record) << '\n';
        partial.flush();
        records[std::tuple(slot.app, slot.src.id, slot.dst.id)] = std::move(record);
        if (!ok)
            result.failure_log.push_back(slot.app + " " + slot.src.id + "-" + slot.dst.id + ": " +
                                         last_error);
    };

    // chunked dispatch: failures inside a chunk never stall the campaign,
    // and a killed run restarts at the first unjournaled slot
    for (size_t chunk_start = 0; chunk_start < slots.size();
         chunk_start += static_cast<size_t>(config.chunk_size)) {
        size_t chunk_end = std::min(slots.size(), chunk_start + static_cast<size_t>(config.chunk_size));
        next.store(chunk_start);
        size_t workers = std::min<size_t>(static_cast<size_t>(config.parallelism),
                                          chunk_end - chunk_start);
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    size_t i = next.fetch_add(1);
                    if (i >= chunk_end) return;
                    run_slot(slots[i]);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    result.failed_slots = failed.load();
    result.retried_slots = retried.load();
    result.records.reserve(records.size());
    // stale partial records from other configs never reach the final set;
    // std::map ordering already gives (app, src, dst)
    for (auto& [key, rec] : records)
        if (slot_keys.count(key)) result.records.push_back(std::move(rec));
    report::save_experiments(final_path.string(), result.records);
    return result;
}

}  // namespace pathloc::campaign
