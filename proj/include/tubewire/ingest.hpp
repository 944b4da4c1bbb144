#pragma once

#include <map>
#include <string>
#include <vector>

#include "tubewire/types.hpp"

namespace tubewire::ingest {

struct CleansingConfig {
    Timestamp cutoff = parse_timestamp("2012-01-01");  // theta
    bool drop_negative_lags = true;
    // Crawl/reference time used downstream for the "final views" age filter.
    // 0 means "derive from the data" (max tweet timestamp, set by cleanse()).
    Timestamp as_of = 0;

    void validate() const;  // theta strictly after 2006-01-01
};

struct QuarantinedEvent {
    SharingEvent event;
    std::string reason;
};

struct CleanseReport {
    std::int64_t input_events = 0;
    std::int64_t removed_negative_lag = 0;
    std::int64_t removed_legacy_videos = 0;       // videos uploaded before theta
    std::int64_t removed_legacy_video_events = 0;  // their events
    std::int64_t retained_events = 0;
    bool cleansed = false;
};

// Joined store. Maps are ordered by id so every traversal is deterministic.
// Immutable after cleansing; safe for concurrent readers.
struct EventStore {
    std::map<std::string, UserRecord> users;
    std::map<std::string, VideoRecord> videos;
    std::vector<SharingEvent> events;  // input order; lag filled at join
    std::vector<QuarantinedEvent> quarantined;
    CleansingConfig config;
    CleanseReport report;

    const UserRecord& user(const std::string& id) const;
    const VideoRecord& video(const std::string& id) const;

    // Distinct user ids with at least one retained event, sorted.
    std::vector<std::string> sharer_ids() const;
};

// Parses the three line-delimited streams. Users/videos are deduplicated
// (exact duplicates collapse; conflicting duplicates are an error). Events
// referencing unknown users or videos are quarantined, not dropped.
// Parsing is chunk-parallel; the result is identical to a sequential load.
EventStore parse_streams(const std::string& user_path, const std::string& video_path,
                         const std::string& event_path, int threads = 0);

// In-memory variants, used by tests and the synthetic round trip.
std::vector<UserRecord> parse_user_lines(const std::vector<std::string>& lines, int threads = 0);
std::vector<VideoRecord> parse_video_lines(const std::vector<std::string>& lines, int threads = 0);

// Applies the cleansing rules in order: negative lags first, then videos
// uploaded before the cutoff (with their events). Idempotent.
EventStore cleanse(EventStore store, const CleansingConfig& config);

// Events with lag in [0, 604800] grouped per video; videos without any
// first-week event are absent.
std::map<std::string, std::vector<SharingEvent>> first_week_slice(const EventStore& store);

// Store directory layout: users.jsonl, videos.jsonl, events.jsonl,
// quarantine.jsonl, manifest.json.
void save_store(const EventStore& store, const std::string& dir);
EventStore load_store(const std::string& dir);

// JSON (de)serialization for single records, shared with the generator.
std::string user_to_json(const UserRecord& u);
std::string video_to_json(const VideoRecord& v);
std::string event_to_json(const SharingEvent& e);

}  // namespace tubewire::ingest
