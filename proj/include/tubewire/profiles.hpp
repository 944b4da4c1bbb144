#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tubewire/ingest.hpp"
#include "tubewire/videometrics.hpp"

namespace tubewire::profiles {

enum class Gender { male, female, unknown };
enum class Geo { urban_us, rural_us, us_other, non_us, unknown };
enum class Leaning { left, right, apolitical };

std::string_view gender_name(Gender g);
std::string_view geo_name(Geo g);
std::string_view leaning_name(Leaning l);

// First name (lowercase) -> gender.
class NameDictionary {
public:
    static NameDictionary load_tsv(const std::string& path);  // name \t gender
    static const NameDictionary& bundled();
    void add(const std::string& name, Gender gender);
    Gender lookup(const std::string& lowercase_first_name) const;

private:
    std::map<std::string, Gender> names_;
};

// Normalized location string -> (country code, city).
class Gazetteer {
public:
    struct Place {
        std::string country;  // ISO-ish, "US" for the United States
        std::string city;     // may be empty for country-level resolutions
    };
    static Gazetteer load_tsv(const std::string& path);  // location \t country \t city
    static const Gazetteer& bundled();
    void add(const std::string& location, Place place);
    const Place* lookup(const std::string& location_raw) const;  // nullptr when unresolved

private:
    std::map<std::string, Place> places_;
};

class TopCities {
public:
    static TopCities load(const std::string& path);  // one city per line
    static const TopCities& bundled();               // the 100 biggest US cities
    void add(const std::string& city);
    bool contains(const std::string& city) const;

private:
    std::set<std::string> cities_;  // lowercase
};

struct DirectoryEntry {
    std::string handle;
    std::string interest_tag;
    int prominence = 0;  // [0, 100]
};

// Interest directory: handle -> tagged entries with prominence weights.
class InterestDirectory {
public:
    static InterestDirectory load_tsv(const std::string& path);  // handle \t tag \t prominence
    void add(DirectoryEntry entry);
    const std::vector<DirectoryEntry>* lookup(const std::string& handle) const;
    std::size_t size() const { return entries_; }

private:
    std::map<std::string, std::vector<DirectoryEntry>> by_handle_;  // lowercase handle
    std::size_t entries_ = 0;
};

// Interest tag -> category (many-to-one; a bundled default covers the
// standard tag vocabulary).
class CategoryMapping {
public:
    static CategoryMapping load_tsv(const std::string& path);  // tag \t category name
    static const CategoryMapping& bundled();
    void add(const std::string& tag, Category category);
    const Category* lookup(const std::string& tag) const;

private:
    std::map<std::string, Category> tags_;
};

struct PoliticalSeeds {
    std::set<std::string> left_handles;   // lowercase
    std::set<std::string> right_handles;

    static PoliticalSeeds load_tsv(const std::string& path);  // handle \t left|right
    static const PoliticalSeeds& bundled();
    void validate() const;  // disjoint
};

using InterestVector = std::array<double, kInterestCategoryCount>;
using CategoryVector = std::array<double, kVideoCategoryCount>;

struct UserFeatures {
    std::string user_id;
    Gender gender = Gender::unknown;
    bool role_mother = false;
    bool role_father = false;
    bool role_student = false;
    Geo geo = Geo::unknown;
    InterestVector interests{};   // c^T, prominence-weighted, sums to 1 when matched
    bool interests_matched = false;
    std::int64_t matched_friend_count = 0;
    Leaning leaning = Leaning::apolitical;
    double political_ratio = 0;   // defined only when the user has >= 1 share
    bool political_ratio_defined = false;
    bool active_for_clustering = false;  // >= 10 distinct videos and >= 10 matched friends
    CategoryVector category_fractions{};  // c^Y, event-normalized
    double avg_follower_followers = 0;    // mean f(u') over the capped follower list
    videometrics::UserAggregates aggregates;
};

Gender infer_gender(const std::string& display_name, const NameDictionary& dictionary);

struct Roles {
    bool mother = false;
    bool father = false;
    bool student = false;
};
Roles infer_roles(const std::string& bio);

Geo infer_geo(const std::string& location_raw, const Gazetteer& gazetteer, const TopCities& top_cities);

// Prominence-weighted interest distribution c^T over the friend list.
// Friends resolve to handles through the store's user table and match the
// directory case-insensitively; duplicates in the friend list are ignored.
InterestVector interest_distribution(const UserRecord& user, const ingest::EventStore& store,
                                     const InterestDirectory& directory,
                                     const CategoryMapping& category_map,
                                     std::int64_t* matched_friends = nullptr);

Leaning infer_leaning(const UserRecord& user, const ingest::EventStore& store,
                      const PoliticalSeeds& seeds);

// Fraction of the user's retained sharing events on News & Politics videos.
double political_ratio(const UserRecord& user, const ingest::EventStore& store);

// Lookup tables for a feature extraction run; all read-only after load.
struct FeatureContext {
    const NameDictionary* names = &NameDictionary::bundled();
    const Gazetteer* gazetteer = &Gazetteer::bundled();
    const TopCities* top_cities = &TopCities::bundled();
    const InterestDirectory* directory = nullptr;  // optional
    const CategoryMapping* category_map = &CategoryMapping::bundled();
    const PoliticalSeeds* seeds = &PoliticalSeeds::bundled();
    videometrics::PolarizationParams polarization;
    bool weight_video_stats_by_event = false;
};

// Features for every sharer in the store, sorted by user id.
std::vector<UserFeatures> extract_features(const ingest::EventStore& store, const FeatureContext& ctx,
                                           int threads = 0);

void write_features_jsonl(const std::vector<UserFeatures>& features, const std::string& path);
std::vector<UserFeatures> read_features_jsonl(const std::string& path);

}  // namespace tubewire::profiles
