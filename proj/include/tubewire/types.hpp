#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tubewire/util.hpp"

namespace tubewire {

// The 19 YouTube video categories, plus Finance which exists only in the
// interest directory (it maps to no video). Trailers exists only on the
// video side (no interest tags map to it).
enum class Category : std::uint8_t {
    autos_vehicles,
    comedy,
    education,
    entertainment,
    film_animation,
    gaming,
    howto_style,
    movies,
    music,
    news_politics,
    nonprofits_activism,
    people_blogs,
    pets_animals,
    science_technology,
    scifi_fantasy,
    shows,
    sports,
    trailers,
    travel_events,
    finance,
};

constexpr int kVideoCategoryCount = 19;     // valid for VideoRecord.category
constexpr int kInterestCategoryCount = 20;  // includes finance

std::string_view category_name(Category c);
Category parse_category(std::string_view name);  // throws ValidationError
const std::array<Category, kVideoCategoryCount>& video_categories();
const std::array<Category, kInterestCategoryCount>& interest_categories();

struct UserRecord {
    std::string user_id;
    std::string handle;
    std::string display_name;
    std::string bio;
    std::string location_raw;
    std::int64_t followers_count = 0;  // f(u), scalar; may exceed capped list
    std::int64_t friends_count = 0;    // f^-1(u)
    std::vector<std::string> follower_ids;  // capped crawl, <= 5000
    std::vector<std::string> friend_ids;    // capped crawl, <= 5000
    Timestamp account_created_at = 0;
    std::int64_t tweet_count = 0;
    double retweet_fraction = 0;
    double url_fraction = 0;
    double youtube_url_fraction = 0;
    double hashtag_fraction = 0;
    std::int64_t mentioned_user_count = 0;
    double retweeted_tweet_fraction = 0;
    double mean_nonzero_retweet_count = 0;  // R0(u); 0 when never retweeted
};

struct VideoRecord {
    std::string video_id;
    std::string uploader_handle;
    Timestamp upload_ts = 0;
    std::int64_t views = 0;  // V_v
    std::int64_t likes = 0;  // L_v
    std::int64_t dislikes = 0;  // D_v
    std::int64_t favorites = 0;
    std::optional<std::int64_t> raters;  // likes + dislikes <= raters when present
    std::int64_t comments = 0;
    Category category = Category::entertainment;
    std::vector<std::string> topics;
};

struct SharingEvent {
    std::string tweet_id;
    std::string user_id;
    std::string video_id;
    Timestamp tweet_ts = 0;
    Duration lag = 0;  // tweet_ts - upload_ts, derived at join time
};

}  // namespace tubewire
