#include "tubewire/profiles.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

using nlohmann::ordered_json;

namespace tubewire::profiles {

std::string_view gender_name(Gender g) {
    switch (g) {
        case Gender::male: return "male";
        case Gender::female: return "female";
        case Gender::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view geo_name(Geo g) {
    switch (g) {
        case Geo::urban_us: return "urban_us";
        case Geo::rural_us: return "rural_us";
        case Geo::us_other: return "us_other";
        case Geo::non_us: return "non_us";
        case Geo::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view leaning_name(Leaning l) {
    switch (l) {
        case Leaning::left: return "left";
        case Leaning::right: return "right";
        case Leaning::apolitical: return "apolitical";
    }
    return "apolitical";
}

namespace {

std::vector<std::vector<std::string>> read_tsv(const std::string& path, std::size_t min_fields) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, '\t')) fields.push_back(field);
        if (fields.size() < min_fields)
            throw ValidationError(path + ": line " + std::to_string(line_no) + " has too few fields");
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string normalize_location(const std::string& raw) {
    std::string lowered = to_lower(trim(raw));
    std::string out;
    bool in_space = false;
    for (char c : lowered) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

Gender parse_gender(const std::string& s) {
    const std::string g = to_lower(trim(s));
    if (g == "male" || g == "m") return Gender::male;
    if (g == "female" || g == "f") return Gender::female;
    throw ValidationError("unknown gender label: '" + s + "'");
}

}  // namespace

// ---- NameDictionary -----------------------------------------------------------

NameDictionary NameDictionary::load_tsv(const std::string& path) {
    NameDictionary dict;
    for (const auto& row : read_tsv(path, 2)) dict.add(row[0], parse_gender(row[1]));
    return dict;
}

void NameDictionary::add(const std::string& name, Gender gender) {
    names_[to_lower(trim(name))] = gender;
}

Gender NameDictionary::lookup(const std::string& lowercase_first_name) const {
    auto it = names_.find(lowercase_first_name);
    return it == names_.end() ? Gender::unknown : it->second;
}

// ---- Gazetteer ------------------------------------------------------------------

Gazetteer Gazetteer::load_tsv(const std::string& path) {
    Gazetteer g;
    for (const auto& row : read_tsv(path, 2))
        g.add(row[0], Place{trim(row[1]), row.size() > 2 ? to_lower(trim(row[2])) : ""});
    return g;
}

void Gazetteer::add(const std::string& location, Place place) {
    place.country = to_lower(place.country) == "us" || place.country == "US" ? "US" : place.country;
    places_[normalize_location(location)] = std::move(place);
}

const Gazetteer::Place* Gazetteer::lookup(const std::string& location_raw) const {
    const std::string key = normalize_location(location_raw);
    if (key.empty()) return nullptr;
    auto it = places_.find(key);
    if (it != places_.end()) return &it->second;
    // fall back to the part before the first comma ("Chicago, IL" -> "chicago")
    auto comma = key.find(',');
    if (comma != std::string::npos) {
        it = places_.find(trim(key.substr(0, comma)));
        if (it != places_.end()) return &it->second;
    }
    return nullptr;
}

// ---- TopCities -------------------------------------------------------------------

TopCities TopCities::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    TopCities cities;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty() && line[0] != '#') cities.add(line);
    }
    return cities;
}

void TopCities::add(const std::string& city) {
    cities_.insert(to_lower(trim(city)));
}

bool TopCities::contains(const std::string& city) const {
    return cities_.count(to_lower(trim(city))) > 0;
}

// ---- InterestDirectory --------------------------------------------------------------

InterestDirectory InterestDirectory::load_tsv(const std::string& path) {
    InterestDirectory dir;
    for (const auto& row : read_tsv(path, 3)) {
        DirectoryEntry e;
        e.handle = row[0];
        e.interest_tag = to_lower(trim(row[1]));
        e.prominence = std::stoi(row[2]);
        dir.add(std::move(e));
    }
    return dir;
}

void InterestDirectory::add(DirectoryEntry entry) {
    if (entry.prominence < 0 || entry.prominence > 100)
        throw ValidationError("prominence outside [0,100] for handle " + entry.handle);
    auto& entries = by_handle_[to_lower(trim(entry.handle))];
    for (const auto& existing : entries)
        if (existing.interest_tag == entry.interest_tag)
            throw ValidationError("duplicate (handle, tag) directory entry: " + entry.handle + "/" +
                                  entry.interest_tag);
    entries.push_back(std::move(entry));
    ++entries_;
}

const std::vector<DirectoryEntry>* InterestDirectory::lookup(const std::string& handle) const {
    auto it = by_handle_.find(to_lower(trim(handle)));
    return it == by_handle_.end() ? nullptr : &it->second;
}

// ---- CategoryMapping ----------------------------------------------------------------

CategoryMapping CategoryMapping::load_tsv(const std::string& path) {
    CategoryMapping map;
    for (const auto& row : read_tsv(path, 2)) map.add(row[0], parse_category(row[1]));
    return map;
}

void CategoryMapping::add(const std::string& tag, Category category) {
    const std::string key = to_lower(trim(tag));
    auto it = tags_.find(key);
    if (it != tags_.end() && it->second != category)
        throw ValidationError("interest tag mapped to two categories: " + tag);
    tags_[key] = category;
}

const Category* CategoryMapping::lookup(const std::string& tag) const {
    auto it = tags_.find(to_lower(trim(tag)));
    return it == tags_.end() ? nullptr : &it->second;
}

// ---- PoliticalSeeds -------------------------------------------------------------------

PoliticalSeeds PoliticalSeeds::load_tsv(const std::string& path) {
    PoliticalSeeds seeds;
    for (const auto& row : read_tsv(path, 2)) {
        const std::string side = to_lower(trim(row[1]));
        if (side == "left")
            seeds.left_handles.insert(to_lower(trim(row[0])));
        else if (side == "right")
            seeds.right_handles.insert(to_lower(trim(row[0])));
        else
            throw ValidationError("seed side must be left or right: '" + row[1] + "'");
    }
    seeds.validate();
    return seeds;
}

void PoliticalSeeds::validate() const {
    for (const auto& h : left_handles)
        if (right_handles.count(h))
            throw ValidationError("seed handle on both sides: " + h);
}

// ---- inference -------------------------------------------------------------------------

Gender infer_gender(const std::string& display_name, const NameDictionary& dictionary) {
    const std::string token = first_token_lower(display_name);
    if (token.empty()) return Gender::unknown;
    return dictionary.lookup(token);
}

Roles infer_roles(const std::string& bio) {
    static const std::unordered_set<std::string> mother_tokens = {"mother", "mom", "wife"};
    static const std::unordered_set<std::string> father_tokens = {"father", "dad", "husband"};
    static const std::unordered_set<std::string> student_tokens = {"student", "study", "studying"};
    Roles roles;
    for (const auto& token : tokenize_words(bio)) {
        if (mother_tokens.count(token)) roles.mother = true;
        if (father_tokens.count(token)) roles.father = true;
        if (student_tokens.count(token)) roles.student = true;
    }
    return roles;
}

Geo infer_geo(const std::string& location_raw, const Gazetteer& gazetteer, const TopCities& top_cities) {
    const Gazetteer::Place* place = gazetteer.lookup(location_raw);
    if (!place) return Geo::unknown;
    if (place->country != "US") return Geo::non_us;
    if (place->city.empty()) return Geo::us_other;
    return top_cities.contains(place->city) ? Geo::urban_us : Geo::rural_us;
}

InterestVector interest_distribution(const UserRecord& user, const ingest::EventStore& store,
                                     const InterestDirectory& directory,
                                     const CategoryMapping& category_map,
                                     std::int64_t* matched_friends) {
    InterestVector weights{};
    double total = 0;
    std::int64_t matched = 0;

    std::unordered_set<std::string> seen;
    for (const auto& friend_id : user.friend_ids) {
        if (!seen.insert(friend_id).second) continue;
        auto uit = store.users.find(friend_id);
        if (uit == store.users.end()) continue;
        const auto* entries = directory.lookup(uit->second.handle);
        if (!entries) continue;
        bool any = false;
        for (const auto& entry : *entries) {
            const Category* cat = category_map.lookup(entry.interest_tag);
            if (!cat) continue;
            weights[static_cast<std::size_t>(*cat)] += entry.prominence;
            total += entry.prominence;
            any = true;
        }
        if (any) ++matched;
    }
    if (matched_friends) *matched_friends = matched;
    if (total > 0)
        for (auto& w : weights) w /= total;
    return weights;
}

Leaning infer_leaning(const UserRecord& user, const ingest::EventStore& store,
                      const PoliticalSeeds& seeds) {
    std::unordered_set<std::string> seen;
    int left = 0, right = 0;
    for (const auto& friend_id : user.friend_ids) {
        if (!seen.insert(friend_id).second) continue;
        auto uit = store.users.find(friend_id);
        if (uit == store.users.end()) continue;
        const std::string handle = to_lower(trim(uit->second.handle));
        if (seeds.left_handles.count(handle)) ++left;
        if (seeds.right_handles.count(handle)) ++right;
    }
    if (left > right) return Leaning::left;
    if (right > left) return Leaning::right;
    return Leaning::apolitical;
}

double political_ratio(const UserRecord& user, const ingest::EventStore& store) {
    std::int64_t total = 0, political = 0;
    for (const auto& e : store.events) {
        if (e.user_id != user.user_id) continue;
        ++total;
        if (store.video(e.video_id).category == Category::news_politics) ++political;
    }
    if (total == 0)
        throw ValidationError("political_ratio undefined: user has no retained shares: " + user.user_id);
    return static_cast<double>(political) / static_cast<double>(total);
}

std::vector<UserFeatures> extract_features(const ingest::EventStore& store, const FeatureContext& ctx,
                                           int threads) {
    const std::vector<std::string> sharers = store.sharer_ids();

    // Event and category tallies in one pass; the per-user loops stay cheap.
    std::map<std::string, std::array<std::int64_t, kVideoCategoryCount>> category_counts;
    std::map<std::string, std::int64_t> event_counts;
    for (const auto& e : store.events) {
        auto& counts = category_counts.try_emplace(e.user_id).first->second;
        ++counts[static_cast<std::size_t>(store.video(e.video_id).category)];
        ++event_counts[e.user_id];
    }

    std::vector<UserFeatures> features(sharers.size());
    parallel_chunks(sharers.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const UserRecord& user = store.user(sharers[i]);
            UserFeatures f;
            f.user_id = user.user_id;
            f.gender = infer_gender(user.display_name, *ctx.names);
            const Roles roles = infer_roles(user.bio);
            f.role_mother = roles.mother;
            f.role_father = roles.father;
            f.role_student = roles.student;
            f.geo = infer_geo(user.location_raw, *ctx.gazetteer, *ctx.top_cities);
            if (ctx.directory) {
                f.interests = interest_distribution(user, store, *ctx.directory, *ctx.category_map,
                                                    &f.matched_friend_count);
                f.interests_matched = f.matched_friend_count > 0;
            }
            f.leaning = infer_leaning(user, store, *ctx.seeds);
            f.political_ratio = political_ratio(user, store);
            f.political_ratio_defined = true;

            const auto& counts = category_counts.at(user.user_id);
            const double total = static_cast<double>(event_counts.at(user.user_id));
            for (std::size_t c = 0; c < counts.size(); ++c)
                f.category_fractions[c] = static_cast<double>(counts[c]) / total;

            double follower_sum = 0;
            std::int64_t follower_n = 0;
            for (const auto& follower_id : user.follower_ids) {
                auto it = store.users.find(follower_id);
                if (it == store.users.end()) continue;
                follower_sum += static_cast<double>(it->second.followers_count);
                ++follower_n;
            }
            f.avg_follower_followers = follower_n > 0 ? follower_sum / static_cast<double>(follower_n) : 0;

            f.aggregates = videometrics::user_aggregates(user.user_id, store, ctx.polarization,
                                                         ctx.weight_video_stats_by_event);
            f.active_for_clustering = f.aggregates.num_videos_shared >= 10 && f.matched_friend_count >= 10;
            features[i] = std::move(f);
        }
    });
    return features;
}

// ---- features.jsonl -----------------------------------------------------------------------

void write_features_jsonl(const std::vector<UserFeatures>& features, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    for (const auto& f : features) {
        ordered_json j;
        j["user_id"] = f.user_id;
        j["gender"] = std::string(gender_name(f.gender));
        ordered_json roles = ordered_json::array();
        if (f.role_mother) roles.push_back("mother");
        if (f.role_father) roles.push_back("father");
        if (f.role_student) roles.push_back("student");
        j["roles"] = roles;
        j["geo"] = std::string(geo_name(f.geo));
        j["leaning"] = std::string(leaning_name(f.leaning));
        if (f.political_ratio_defined)
            j["political_ratio"] = f.political_ratio;
        else
            j["political_ratio"] = nullptr;
        ordered_json interests;
        for (std::size_t c = 0; c < f.interests.size(); ++c)
            interests[std::string(category_name(static_cast<Category>(c)))] = f.interests[c];
        j["interests"] = interests;
        j["interests_matched"] = f.interests_matched;
        j["matched_friend_count"] = f.matched_friend_count;
        j["active_for_clustering"] = f.active_for_clustering;
        ordered_json fractions;
        for (std::size_t c = 0; c < f.category_fractions.size(); ++c)
            fractions[std::string(category_name(static_cast<Category>(c)))] = f.category_fractions[c];
        j["category_fractions"] = fractions;
        j["avg_follower_followers"] = f.avg_follower_followers;
        j["num_videos_shared"] = f.aggregates.num_videos_shared;
        j["num_events"] = f.aggregates.num_events;
        if (f.aggregates.median_views)
            j["median_views"] = *f.aggregates.median_views;
        else
            j["median_views"] = nullptr;
        if (f.aggregates.median_polarization)
            j["median_polarization"] = *f.aggregates.median_polarization;
        else
            j["median_polarization"] = nullptr;
        j["median_lag"] = f.aggregates.median_lag;
        j["mean_lag"] = f.aggregates.mean_lag;
        j["lag_stddev"] = f.aggregates.lag_stddev;
        out << j.dump() << "\n";
    }
}

std::vector<UserFeatures> read_features_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    std::vector<UserFeatures> features;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ValidationError("malformed features line " + std::to_string(line_no));
        UserFeatures f;
        f.user_id = j.at("user_id").get<std::string>();
        const std::string gender = j.at("gender").get<std::string>();
        f.gender = gender == "male" ? Gender::male : gender == "female" ? Gender::female : Gender::unknown;
        for (const auto& role : j.at("roles")) {
            const std::string r = role.get<std::string>();
            if (r == "mother") f.role_mother = true;
            if (r == "father") f.role_father = true;
            if (r == "student") f.role_student = true;
        }
        const std::string geo = j.at("geo").get<std::string>();
        f.geo = geo == "urban_us"   ? Geo::urban_us
                : geo == "rural_us" ? Geo::rural_us
                : geo == "us_other" ? Geo::us_other
                : geo == "non_us"   ? Geo::non_us
                                    : Geo::unknown;
        const std::string leaning = j.at("leaning").get<std::string>();
        f.leaning = leaning == "left" ? Leaning::left : leaning == "right" ? Leaning::right : Leaning::apolitical;
        if (!j.at("political_ratio").is_null()) {
            f.political_ratio = j.at("political_ratio").get<double>();
            f.political_ratio_defined = true;
        }
        for (std::size_t c = 0; c < f.interests.size(); ++c)
            f.interests[c] = j.at("interests").at(std::string(category_name(static_cast<Category>(c)))).get<double>();
        f.interests_matched = j.at("interests_matched").get<bool>();
        f.matched_friend_count = j.at("matched_friend_count").get<std::int64_t>();
        f.active_for_clustering = j.at("active_for_clustering").get<bool>();
        for (std::size_t c = 0; c < f.category_fractions.size(); ++c)
            f.category_fractions[c] =
                j.at("category_fractions").at(std::string(category_name(static_cast<Category>(c)))).get<double>();
        f.avg_follower_followers = j.at("avg_follower_followers").get<double>();
        f.aggregates.user_id = f.user_id;
        f.aggregates.num_videos_shared = j.at("num_videos_shared").get<std::int64_t>();
        f.aggregates.num_events = j.at("num_events").get<std::int64_t>();
        if (!j.at("median_views").is_null()) f.aggregates.median_views = j.at("median_views").get<double>();
        if (!j.at("median_polarization").is_null())
            f.aggregates.median_polarization = j.at("median_polarization").get<double>();
        f.aggregates.median_lag = j.at("median_lag").get<double>();
        f.aggregates.mean_lag = j.at("mean_lag").get<double>();
        f.aggregates.lag_stddev = j.at("lag_stddev").get<double>();
        features.push_back(std::move(f));
    }
    return features;
}

}  // namespace tubewire::profiles
