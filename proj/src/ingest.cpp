#include "tubewire/ingest.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace tubewire::ingest {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

[[noreturn]] void field_error(const std::string& what, std::size_t line_no, const std::string& field) {
    throw ValidationError(what + " at line " + std::to_string(line_no + 1) + ", field '" + field + "'");
}

class RecordReader {
public:
    RecordReader(const ordered_json& j, std::size_t line_no) : j_(j), line_(line_no) {}

    std::string str(const char* field, bool required = true) const {
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) {
            if (required) field_error("missing field", line_, field);
            return {};
        }
        if (!it->is_string()) field_error("expected string", line_, field);
        return it->get<std::string>();
    }

    std::int64_t count(const char* field, bool required = true) const {
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) {
            if (required) field_error("missing field", line_, field);
            return 0;
        }
        if (!it->is_number_integer() && !it->is_number_unsigned())
            field_error("expected integer", line_, field);
        auto v = it->get<std::int64_t>();
        if (v < 0) field_error("negative count", line_, field);
        return v;
    }

    std::optional<std::int64_t> opt_count(const char* field) const {
        if (!j_.contains(field) || j_.at(field).is_null()) return std::nullopt;
        return count(field);
    }

    double fraction(const char* field) const {
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) field_error("missing field", line_, field);
        if (!it->is_number()) field_error("expected number", line_, field);
        double v = it->get<double>();
        if (v < 0.0 || v > 1.0) field_error("fraction outside [0,1]", line_, field);
        return v;
    }

    double nonneg_real(const char* field) const {
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) field_error("missing field", line_, field);
        if (!it->is_number()) field_error("expected number", line_, field);
        double v = it->get<double>();
        if (v < 0.0) field_error("negative value", line_, field);
        return v;
    }

    Timestamp timestamp(const char* field) const {
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) field_error("missing field", line_, field);
        if (it->is_number_integer() || it->is_number_unsigned())
            return it->get<std::int64_t>();
        if (it->is_string()) {
            try {
                return parse_timestamp(it->get<std::string>());
            } catch (const ValidationError& e) {
                field_error(e.what(), line_, field);
            }
        }
        field_error("expected epoch seconds or ISO timestamp", line_, field);
    }

    std::vector<std::string> id_list(const char* field) const {
        std::vector<std::string> out;
        auto it = j_.find(field);
        if (it == j_.end() || it->is_null()) return out;
        if (!it->is_array()) field_error("expected array", line_, field);
        out.reserve(it->size());
        for (const auto& e : *it) {
            if (!e.is_string()) field_error("expected string ids", line_, field);
            out.push_back(e.get<std::string>());
        }
        return out;
    }

private:
    const ordered_json& j_;
    std::size_t line_;
};

ordered_json parse_line(const std::string& line, std::size_t line_no, const char* stream) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError(std::string("malformed ") + stream + " line " + std::to_string(line_no + 1));
    return j;
}

UserRecord parse_user(const std::string& line, std::size_t line_no) {
    ordered_json j = parse_line(line, line_no, "user");
    RecordReader r(j, line_no);
    UserRecord u;
    u.user_id = r.str("user_id");
    u.handle = r.str("handle");
    u.display_name = r.str("display_name", false);
    u.bio = r.str("bio", false);
    u.location_raw = r.str("location_raw", false);
    u.followers_count = r.count("followers_count");
    u.friends_count = r.count("friends_count");
    u.follower_ids = r.id_list("follower_ids");
    u.friend_ids = r.id_list("friend_ids");
    u.account_created_at = r.timestamp("account_created_at");
    u.tweet_count = r.count("tweet_count");
    u.retweet_fraction = r.fraction("retweet_fraction");
    u.url_fraction = r.fraction("url_fraction");
    u.youtube_url_fraction = r.fraction("youtube_url_fraction");
    u.hashtag_fraction = r.fraction("hashtag_fraction");
    u.mentioned_user_count = r.count("mentioned_user_count");
    u.retweeted_tweet_fraction = r.fraction("retweeted_tweet_fraction");
    u.mean_nonzero_retweet_count = r.nonneg_real("mean_nonzero_retweet_count");
    if (u.user_id.empty()) field_error("empty id", line_no, "user_id");
    return u;
}

VideoRecord parse_video(const std::string& line, std::size_t line_no) {
    ordered_json j = parse_line(line, line_no, "video");
    RecordReader r(j, line_no);
    VideoRecord v;
    v.video_id = r.str("video_id");
    v.uploader_handle = r.str("uploader_handle", false);
    v.upload_ts = r.timestamp("upload_ts");
    v.views = r.count("views");
    v.likes = r.count("likes");
    v.dislikes = r.count("dislikes");
    v.favorites = r.opt_count("favorites").value_or(0);
    v.raters = r.opt_count("raters");
    v.comments = r.opt_count("comments").value_or(0);
    try {
        v.category = parse_category(r.str("category"));
    } catch (const ValidationError& e) {
        field_error(e.what(), line_no, "category");
    }
    if (v.category == Category::finance)
        field_error("finance is not a video category", line_no, "category");
    v.topics = r.id_list("topics");
    if (v.video_id.empty()) field_error("empty id", line_no, "video_id");
    if (v.raters && v.likes + v.dislikes > *v.raters)
        field_error("likes + dislikes exceed raters", line_no, "raters");
    return v;
}

SharingEvent parse_event(const std::string& line, std::size_t line_no) {
    ordered_json j = parse_line(line, line_no, "event");
    RecordReader r(j, line_no);
    SharingEvent e;
    e.tweet_id = r.str("tweet_id");
    e.user_id = r.str("user_id");
    e.video_id = r.str("video_id");
    e.tweet_ts = r.timestamp("tweet_ts");
    if (e.tweet_id.empty()) field_error("empty id", line_no, "tweet_id");
    return e;
}

// Parses every non-empty line with fn, chunk-parallel, preserving order.
template <typename Record, typename Fn>
std::vector<Record> parse_all(const std::vector<std::string>& lines, int threads, Fn fn) {
    std::vector<std::optional<Record>> slots(lines.size());
    parallel_chunks(lines.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (trim(lines[i]).empty()) continue;
            slots[i] = fn(lines[i], i);
        }
    });
    std::vector<Record> out;
    out.reserve(lines.size());
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

bool users_equal(const UserRecord& a, const UserRecord& b) {
    return a.handle == b.handle && a.display_name == b.display_name && a.bio == b.bio &&
           a.location_raw == b.location_raw && a.followers_count == b.followers_count &&
           a.friends_count == b.friends_count && a.follower_ids == b.follower_ids &&
           a.friend_ids == b.friend_ids && a.account_created_at == b.account_created_at &&
           a.tweet_count == b.tweet_count && a.retweet_fraction == b.retweet_fraction &&
           a.url_fraction == b.url_fraction && a.youtube_url_fraction == b.youtube_url_fraction &&
           a.hashtag_fraction == b.hashtag_fraction && a.mentioned_user_count == b.mentioned_user_count &&
           a.retweeted_tweet_fraction == b.retweeted_tweet_fraction &&
           a.mean_nonzero_retweet_count == b.mean_nonzero_retweet_count;
}

bool videos_equal(const VideoRecord& a, const VideoRecord& b) {
    return a.uploader_handle == b.uploader_handle && a.upload_ts == b.upload_ts && a.views == b.views &&
           a.likes == b.likes && a.dislikes == b.dislikes && a.favorites == b.favorites &&
           a.raters == b.raters && a.comments == b.comments && a.category == b.category &&
           a.topics == b.topics;
}

}  // namespace

void CleansingConfig::validate() const {
    static const Timestamp floor = parse_timestamp("2006-01-01");
    if (cutoff <= floor)
        throw ValidationError("cutoff must be strictly after 2006-01-01");
}

const UserRecord& EventStore::user(const std::string& id) const {
    auto it = users.find(id);
    if (it == users.end())
        throw ValidationError("unknown user: " + id);
    return it->second;
}

const VideoRecord& EventStore::video(const std::string& id) const {
    auto it = videos.find(id);
    if (it == videos.end())
        throw ValidationError("unknown video: " + id);
    return it->second;
}

std::vector<std::string> EventStore::sharer_ids() const {
    std::unordered_set<std::string> seen;
    for (const auto& e : events) seen.insert(e.user_id);
    std::vector<std::string> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<UserRecord> parse_user_lines(const std::vector<std::string>& lines, int threads) {
    return parse_all<UserRecord>(lines, threads, parse_user);
}

std::vector<VideoRecord> parse_video_lines(const std::vector<std::string>& lines, int threads) {
    return parse_all<VideoRecord>(lines, threads, parse_video);
}

EventStore parse_streams(const std::string& user_path, const std::string& video_path,
                         const std::string& event_path, int threads) {
    EventStore store;

    auto users = parse_all<UserRecord>(read_lines(user_path), threads, parse_user);
    for (auto& u : users) {
        auto [it, inserted] = store.users.try_emplace(u.user_id, u);
        if (!inserted && !users_equal(it->second, u))
            throw ValidationError("duplicate user_id with conflicting fields: " + u.user_id);
    }

    auto videos = parse_all<VideoRecord>(read_lines(video_path), threads, parse_video);
    for (auto& v : videos) {
        auto [it, inserted] = store.videos.try_emplace(v.video_id, v);
        if (!inserted && !videos_equal(it->second, v))
            throw ValidationError("duplicate video_id with conflicting fields: " + v.video_id);
    }

    auto events = parse_all<SharingEvent>(read_lines(event_path), threads, parse_event);
    for (auto& e : events) {
        if (!store.users.count(e.user_id)) {
            store.quarantined.push_back({std::move(e), "unknown_user"});
            continue;
        }
        auto vit = store.videos.find(e.video_id);
        if (vit == store.videos.end()) {
            store.quarantined.push_back({std::move(e), "unknown_video"});
            continue;
        }
        e.lag = e.tweet_ts - vit->second.upload_ts;
        store.events.push_back(std::move(e));
    }
    return store;
}

EventStore cleanse(EventStore store, const CleansingConfig& config) {
    config.validate();
    store.config = config;

    CleanseReport report;
    report.input_events = static_cast<std::int64_t>(store.events.size());

    std::vector<SharingEvent> kept;
    kept.reserve(store.events.size());
    for (auto& e : store.events) {
        if (config.drop_negative_lags && e.lag < 0) {
            ++report.removed_negative_lag;
            continue;
        }
        kept.push_back(std::move(e));
    }

    std::unordered_set<std::string> legacy;
    for (auto it = store.videos.begin(); it != store.videos.end();) {
        if (it->second.upload_ts < config.cutoff) {
            legacy.insert(it->first);
            it = store.videos.erase(it);
            ++report.removed_legacy_videos;
        } else {
            ++it;
        }
    }

    std::vector<SharingEvent> retained;
    retained.reserve(kept.size());
    for (auto& e : kept) {
        if (legacy.count(e.video_id)) {
            ++report.removed_legacy_video_events;
            continue;
        }
        retained.push_back(std::move(e));
    }

    store.events = std::move(retained);
    report.retained_events = static_cast<std::int64_t>(store.events.size());
    report.cleansed = true;

    if (store.config.as_of == 0) {
        Timestamp max_ts = 0;
        for (const auto& e : store.events) max_ts = std::max(max_ts, e.tweet_ts);
        for (const auto& [id, v] : store.videos) max_ts = std::max(max_ts, v.upload_ts);
        store.config.as_of = max_ts;
    }
    store.report = report;
    return store;
}

std::map<std::string, std::vector<SharingEvent>> first_week_slice(const EventStore& store) {
    std::map<std::string, std::vector<SharingEvent>> slice;
    for (const auto& e : store.events)
        if (e.lag >= 0 && e.lag <= kFirstWeekSeconds) slice[e.video_id].push_back(e);
    for (auto& [id, events] : slice)
        std::stable_sort(events.begin(), events.end(), [](const SharingEvent& a, const SharingEvent& b) {
            if (a.tweet_ts != b.tweet_ts) return a.tweet_ts < b.tweet_ts;
            return a.tweet_id < b.tweet_id;
        });
    return slice;
}

std::string user_to_json(const UserRecord& u) {
    ordered_json j;
    j["user_id"] = u.user_id;
    j["handle"] = u.handle;
    j["display_name"] = u.display_name;
    j["bio"] = u.bio;
    j["location_raw"] = u.location_raw;
    j["followers_count"] = u.followers_count;
    j["friends_count"] = u.friends_count;
    j["follower_ids"] = u.follower_ids;
    j["friend_ids"] = u.friend_ids;
    j["account_created_at"] = u.account_created_at;
    j["tweet_count"] = u.tweet_count;
    j["retweet_fraction"] = u.retweet_fraction;
    j["url_fraction"] = u.url_fraction;
    j["youtube_url_fraction"] = u.youtube_url_fraction;
    j["hashtag_fraction"] = u.hashtag_fraction;
    j["mentioned_user_count"] = u.mentioned_user_count;
    j["retweeted_tweet_fraction"] = u.retweeted_tweet_fraction;
    j["mean_nonzero_retweet_count"] = u.mean_nonzero_retweet_count;
    return j.dump();
}

std::string video_to_json(const VideoRecord& v) {
    ordered_json j;
    j["video_id"] = v.video_id;
    j["uploader_handle"] = v.uploader_handle;
    j["upload_ts"] = v.upload_ts;
    j["views"] = v.views;
    j["likes"] = v.likes;
    j["dislikes"] = v.dislikes;
    j["favorites"] = v.favorites;
    if (v.raters) j["raters"] = *v.raters;
    j["comments"] = v.comments;
    j["category"] = std::string(category_name(v.category));
    j["topics"] = v.topics;
    return j.dump();
}

std::string event_to_json(const SharingEvent& e) {
    ordered_json j;
    j["tweet_id"] = e.tweet_id;
    j["user_id"] = e.user_id;
    j["video_id"] = e.video_id;
    j["tweet_ts"] = e.tweet_ts;
    return j.dump();
}

void save_store(const EventStore& store, const std::string& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "users.jsonl");
        for (const auto& [id, u] : store.users) out << user_to_json(u) << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "videos.jsonl");
        for (const auto& [id, v] : store.videos) out << video_to_json(v) << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "events.jsonl");
        for (const auto& e : store.events) out << event_to_json(e) << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "quarantine.jsonl");
        for (const auto& q : store.quarantined) {
            ordered_json j = ordered_json::parse(event_to_json(q.event));
            j["reason"] = q.reason;
            out << j.dump() << "\n";
        }
    }
    ordered_json manifest;
    manifest["cutoff"] = store.config.cutoff;
    manifest["drop_negative_lags"] = store.config.drop_negative_lags;
    manifest["as_of"] = store.config.as_of;
    manifest["cleansed"] = store.report.cleansed;
    manifest["input_events"] = store.report.input_events;
    manifest["removed_negative_lag"] = store.report.removed_negative_lag;
    manifest["removed_legacy_videos"] = store.report.removed_legacy_videos;
    manifest["removed_legacy_video_events"] = store.report.removed_legacy_video_events;
    manifest["retained_events"] = store.report.retained_events;
    manifest["users"] = store.users.size();
    manifest["videos"] = store.videos.size();
    manifest["quarantined"] = store.quarantined.size();
    std::ofstream out(fs::path(dir) / "manifest.json");
    out << manifest.dump(2) << "\n";
}

EventStore load_store(const std::string& dir) {
    const fs::path base(dir);
    if (!fs::exists(base / "manifest.json"))
        throw ValidationError("not a store directory (missing manifest.json): " + dir);

    EventStore store = parse_streams((base / "users.jsonl").string(), (base / "videos.jsonl").string(),
                                     (base / "events.jsonl").string());

    std::ifstream in(base / "manifest.json");
    ordered_json manifest = ordered_json::parse(in);
    store.config.cutoff = manifest.at("cutoff").get<Timestamp>();
    store.config.drop_negative_lags = manifest.at("drop_negative_lags").get<bool>();
    store.config.as_of = manifest.at("as_of").get<Timestamp>();
    store.report.cleansed = manifest.at("cleansed").get<bool>();
    store.report.input_events = manifest.at("input_events").get<std::int64_t>();
    store.report.removed_negative_lag = manifest.at("removed_negative_lag").get<std::int64_t>();
    store.report.removed_legacy_videos = manifest.at("removed_legacy_videos").get<std::int64_t>();
    store.report.removed_legacy_video_events = manifest.at("removed_legacy_video_events").get<std::int64_t>();
    store.report.retained_events = manifest.at("retained_events").get<std::int64_t>();
    return store;
}

}  // namespace tubewire::ingest
