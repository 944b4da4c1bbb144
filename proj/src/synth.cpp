#include "tubewire/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "tubewire/ingest.hpp"
#include "tubewire/profiles.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace tubewire::synth {

namespace {

constexpr Duration kHour = 3600;
constexpr Duration kDay = kSecondsPerDay;

// One directory tag per category; Trailers maps to no tag.
const char* hub_tag(Category c) {
    switch (c) {
        case Category::autos_vehicles: return "autos";
        case Category::comedy: return "comedy";
        case Category::education: return "education";
        case Category::entertainment: return "entertainment";
        case Category::film_animation: return "film";
        case Category::gaming: return "gaming";
        case Category::howto_style: return "howto";
        case Category::movies: return "movies";
        case Category::music: return "music";
        case Category::news_politics: return "news";
        case Category::nonprofits_activism: return "nonprofit";
        case Category::people_blogs: return "people";
        case Category::pets_animals: return "pets";
        case Category::science_technology: return "tech";
        case Category::scifi_fantasy: return "scifi";
        case Category::shows: return "tv";
        case Category::sports: return "sports";
        case Category::travel_events: return "travel";
        case Category::finance: return "finance";
        case Category::trailers: return nullptr;
    }
    return nullptr;
}

constexpr const char* kMaleNames[] = {"john", "david", "michael", "james", "robert", "kevin"};
constexpr const char* kFemaleNames[] = {"mary", "jennifer", "lisa", "sarah", "emily", "laura"};
constexpr const char* kSurnames[] = {"smith", "jones", "garcia", "miller", "davis", "lopez",
                                     "wilson", "taylor", "moore", "clark"};
constexpr const char* kUrbanCities[] = {"chicago", "houston", "seattle", "denver", "boston"};
constexpr const char* kRuralCities[] = {"peoria", "boulder", "savannah", "topeka", "missoula"};
constexpr const char* kForeign[] = {"london", "toronto", "jakarta", "bangkok", "sao paulo"};
constexpr const char* kStudioWords[] = {"meadow", "harbor", "copper", "violet", "monsoon",
                                        "lantern", "cascade", "ember", "juniper", "orchid"};

std::vector<std::array<double, kVideoCategoryCount>> default_mixtures() {
    auto weight = [](std::initializer_list<std::pair<Category, double>> entries) {
        std::array<double, kVideoCategoryCount> mix{};
        for (const auto& [c, w] : entries) mix[static_cast<std::size_t>(c)] = w;
        double sum = std::accumulate(mix.begin(), mix.end(), 0.0);
        for (auto& v : mix) v /= sum;
        return mix;
    };
    return {
        weight({{Category::music, 0.50}, {Category::entertainment, 0.14}, {Category::people_blogs, 0.10},
                {Category::comedy, 0.10}, {Category::news_politics, 0.06}, {Category::shows, 0.05},
                {Category::film_animation, 0.05}}),
        weight({{Category::sports, 0.50}, {Category::entertainment, 0.12}, {Category::music, 0.10},
                {Category::comedy, 0.08}, {Category::news_politics, 0.08}, {Category::autos_vehicles, 0.07},
                {Category::people_blogs, 0.05}}),
        weight({{Category::gaming, 0.48}, {Category::science_technology, 0.16}, {Category::music, 0.08},
                {Category::entertainment, 0.08}, {Category::news_politics, 0.06},
                {Category::scifi_fantasy, 0.08}, {Category::movies, 0.06}}),
        weight({{Category::nonprofits_activism, 0.28}, {Category::education, 0.22},
                {Category::news_politics, 0.14}, {Category::people_blogs, 0.10}, {Category::music, 0.08},
                {Category::pets_animals, 0.08}, {Category::howto_style, 0.06},
                {Category::trailers, 0.04}}),
    };
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

std::string pad_id(const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix, n);
    return buf;
}

std::string random_handle(std::mt19937_64& rng, std::size_t len) {
    std::uniform_int_distribution<int> ch(0, 25);
    std::string s(len, 'a');
    for (auto& c : s) c = static_cast<char>('a' + ch(rng));
    return s;
}

}  // namespace

void SyntheticConfig::validate() const {
    if (user_count <= 0 || video_count <= 0 || event_count <= 0)
        throw ValidationError("synthetic counts must be positive");
    if (event_count < video_count)
        throw ValidationError("infeasible config: fewer events than videos (each video needs a share)");
    if (event_count < user_count)
        throw ValidationError("infeasible config: fewer events than users (each sharer needs an event)");
    if (views_noise_sigma < 0 || lag_log_sigma < 0)
        throw ValidationError("noise sigma must be non-negative");
    if (promo_fraction < 0 || promo_fraction >= 1)
        throw ValidationError("promo_fraction must lie in [0, 1)");
    if (left_fraction < 0 || right_fraction < 0 || left_fraction + right_fraction > 1)
        throw ValidationError("political fractions must be non-negative and sum to at most 1");
    for (double m : {mu_left, mu_right, mu_apolitical})
        if (m < 0 || m > 0.9)
            throw ValidationError("political share means must lie in [0, 0.9]");
    for (const auto& mix : category_mixtures) {
        double sum = 0;
        for (double w : mix) {
            if (w < 0)
                throw ValidationError("category mixture weights must be non-negative");
            sum += w;
        }
        if (sum <= 0)
            throw ValidationError("category mixture must have positive mass");
    }
}

GroundTruth generate_synthetic(const SyntheticConfig& config, const std::string& out_dir) {
    config.validate();
    fs::create_directories(out_dir);

    GroundTruth truth;
    truth.config = config;

    const auto mixtures = config.category_mixtures.empty() ? default_mixtures() : config.category_mixtures;
    const std::size_t group_count = mixtures.size();

    const Timestamp upload_lo = parse_timestamp("2012-02-01");
    const Timestamp upload_hi = parse_timestamp("2013-04-20");
    truth.as_of = upload_hi + 90 * kDay;

    // ---- population plan -------------------------------------------------
    const std::size_t n_users = static_cast<std::size_t>(config.user_count);
    const std::size_t promo_count =
        static_cast<std::size_t>(std::llround(config.promo_fraction * static_cast<double>(n_users)));
    const std::size_t regular_count = n_users - promo_count;
    if (regular_count == 0)
        throw ValidationError("infeasible config: no regular users");
    const std::size_t left_count =
        static_cast<std::size_t>(std::llround(config.left_fraction * static_cast<double>(regular_count)));
    const std::size_t right_count =
        static_cast<std::size_t>(std::llround(config.right_fraction * static_cast<double>(regular_count)));

    struct Plan {
        std::string user_id;
        bool promo = false;
        int branch = 0;         // intended branch for promo users
        int group = -1;         // interest group for regular users
        std::string leaning = "apolitical";
        double political_p = 0;
        std::int64_t budget = 0;
        std::string own_channel;
        std::string handle;
    };
    std::vector<Plan> plans(n_users);

    std::mt19937_64 rng_plan(mix_seed(config.seed, 1));
    for (std::size_t i = 0; i < n_users; ++i) {
        Plan& p = plans[i];
        p.user_id = pad_id("u", i + 1);
        p.promo = i >= regular_count;
        if (p.promo) {
            p.branch = static_cast<int>((i - regular_count) % 3) + 1;
        } else {
            p.group = static_cast<int>(i % group_count);
            if (i < left_count) {
                p.leaning = "left";
                p.political_p = config.mu_left;
            } else if (i < left_count + right_count) {
                p.leaning = "right";
                p.political_p = config.mu_right;
            } else {
                p.political_p = config.mu_apolitical;
            }
        }
    }

    // handles; promo handles are built against their channel per branch
    for (std::size_t i = 0; i < n_users; ++i) {
        Plan& p = plans[i];
        if (!p.promo) {
            p.handle = random_handle(rng_plan, 8 + rng_plan() % 5);
            continue;
        }
        const std::size_t k = i - regular_count;
        switch (p.branch) {
            case 1: {
                // near-identical names: lcs_s = 1, lcs_l >= 0.5
                const std::string base = "fitvlogs" + std::to_string(k);
                p.handle = base;
                p.own_channel = base + "tv";
                break;
            }
            case 2: {
                // lcs_s in [0.5, 0.75), plus concentration and activity
                char word[8];
                std::snprintf(word, sizeof word, "sunrise");
                char digits[8];
                std::snprintf(digits, sizeof digits, "%02zu", k);
                p.handle = std::string(word) + "_" + digits;       // 10 chars
                p.own_channel = "a" + std::string(word) + "media";  // 13 chars, LCS 7
                break;
            }
            default: {
                // no name similarity, concentration alone
                p.handle = random_handle(rng_plan, 10);
                p.own_channel = "promonet_" + std::to_string(k) + "_channel";
                break;
            }
        }
    }

    // ---- budgets ---------------------------------------------------------
    std::mt19937_64 rng_budget(mix_seed(config.seed, 2));
    const double mean_budget = static_cast<double>(config.event_count) / static_cast<double>(n_users);
    std::int64_t total = 0;
    for (auto& p : plans) {
        if (p.promo)
            p.budget = static_cast<std::int64_t>(2.0 * mean_budget) +
                       static_cast<std::int64_t>(rng_budget() % (static_cast<std::uint64_t>(mean_budget) + 1));
        else
            p.budget = 10 + static_cast<std::int64_t>(rng_budget() % 5);
        total += p.budget;
    }
    // scale to the exact event count
    const double scale = static_cast<double>(config.event_count) / static_cast<double>(total);
    total = 0;
    for (auto& p : plans) {
        p.budget = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(p.budget * scale)));
        total += p.budget;
    }
    for (std::size_t i = 0; total != config.event_count; i = (i + 1) % n_users) {
        Plan& p = plans[i];
        if (total < config.event_count) {
            ++p.budget;
            ++total;
        } else if (p.budget > 1) {
            --p.budget;
            --total;
        }
    }
    for (const auto& p : plans)
        if (p.promo && static_cast<double>(p.budget) <= 1.2 * mean_budget)
            throw ValidationError("infeasible config: promotional budgets too close to the mean");

    // ---- videos ------------------------------------------------------------
    std::mt19937_64 rng_video(mix_seed(config.seed, 3));
    std::vector<VideoRecord> videos;
    videos.reserve(static_cast<std::size_t>(config.video_count));

    std::vector<std::size_t> used_categories;  // indices into the 19
    {
        std::set<std::size_t> used;
        for (const auto& mix : mixtures)
            for (std::size_t c = 0; c < mix.size(); ++c)
                if (mix[c] > 0) used.insert(c);
        used.insert(static_cast<std::size_t>(Category::news_politics));
        used_categories.assign(used.begin(), used.end());
    }

    auto add_video = [&](const std::string& channel, Category cat, Timestamp ts) -> std::size_t {
        VideoRecord v;
        v.video_id = pad_id("v", videos.size() + 1);
        v.uploader_handle = channel;
        v.upload_ts = ts;
        v.category = cat;
        const int n_topics = 1 + static_cast<int>(rng_video() % 3);
        for (int t = 0; t < n_topics; ++t)
            v.topics.push_back("t_" + std::string(hub_tag(cat) ? hub_tag(cat) : "trailer") + "_" +
                               std::to_string(rng_video() % 12));
        videos.push_back(std::move(v));
        return videos.size() - 1;
    };
    auto draw_upload_ts = [&] {
        std::uniform_int_distribution<Timestamp> u(upload_lo, upload_hi);
        return u(rng_video);
    };

    // promotional channels first
    std::int64_t promo_video_total = 0;
    std::map<std::string, std::vector<std::size_t>> own_videos;  // user id -> video indices
    for (auto& p : plans) {
        if (!p.promo) continue;
        const std::int64_t n_own = std::clamp<std::int64_t>(p.budget / 4, 2, 6);
        promo_video_total += n_own;
        for (std::int64_t v = 0; v < n_own; ++v) {
            const auto cat = static_cast<Category>(used_categories[rng_video() % used_categories.size()]);
            own_videos[p.user_id].push_back(add_video(p.own_channel, cat, draw_upload_ts()));
        }
    }
    if (promo_video_total > config.video_count / 2)
        throw ValidationError("infeasible config: promotional channels would hold most videos");

    // regular videos, categories spread evenly over the used set
    const std::size_t regular_video_count =
        static_cast<std::size_t>(config.video_count - promo_video_total);
    if (regular_video_count < used_categories.size())
        throw ValidationError("infeasible config: not enough videos to cover the category pools");
    std::vector<std::vector<std::size_t>> category_pool(kVideoCategoryCount);
    const std::size_t n_studios = std::max<std::size_t>(6, regular_video_count / 25);
    for (std::size_t v = 0; v < regular_video_count; ++v) {
        const std::size_t cat_idx = used_categories[v % used_categories.size()];
        const std::string studio = "studio_" + std::string(kStudioWords[(v / 3) % 10]) + "_" +
                                   std::to_string(v % n_studios);
        const std::size_t idx = add_video(studio, static_cast<Category>(cat_idx), draw_upload_ts());
        category_pool[cat_idx].push_back(idx);
    }

    // ---- events --------------------------------------------------------------
    std::mt19937_64 rng_event(mix_seed(config.seed, 4));
    struct PlannedEvent {
        std::size_t user;   // index into plans
        std::size_t video;  // index into videos
    };
    std::vector<PlannedEvent> planned;
    planned.reserve(static_cast<std::size_t>(config.event_count));

    std::vector<std::size_t> category_cursor(kVideoCategoryCount, 0);
    auto pick_from_pool = [&](std::size_t cat_idx) {
        auto& pool = category_pool[cat_idx];
        if (pool.empty())
            throw Error("internal: empty category pool");
        const std::size_t idx = pool[category_cursor[cat_idx] % pool.size()];
        ++category_cursor[cat_idx];
        return idx;
    };

    for (std::size_t i = 0; i < n_users; ++i) {
        Plan& p = plans[i];
        if (p.promo) {
            const auto& own = own_videos.at(p.user_id);
            const double ratio_target = p.branch == 1 ? 0.7 : p.branch == 2 ? 0.75 : 0.8;
            const auto own_target =
                static_cast<std::int64_t>(std::ceil(ratio_target * static_cast<double>(p.budget)));
            for (std::int64_t e = 0; e < p.budget; ++e) {
                if (e < own_target) {
                    planned.push_back({i, own[static_cast<std::size_t>(e) % own.size()]});
                } else {
                    const std::size_t cat_idx = used_categories[rng_event() % used_categories.size()];
                    planned.push_back({i, pick_from_pool(cat_idx)});
                }
            }
            continue;
        }
        // regular user: group mixture with the news mass pinned to the
        // planted political share probability
        auto mix = mixtures[static_cast<std::size_t>(p.group)];
        const auto news = static_cast<std::size_t>(Category::news_politics);
        const double old_news = mix[news];
        if (old_news < 1.0) {
            const double rescale = (1.0 - p.political_p) / (1.0 - old_news);
            for (std::size_t c = 0; c < mix.size(); ++c) mix[c] *= rescale;
        }
        mix[news] = p.political_p;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::int64_t e = 0; e < p.budget; ++e) {
            double u = unit(rng_event);
            std::size_t chosen = news;
            for (std::size_t c = 0; c < mix.size(); ++c) {
                if (u < mix[c]) {
                    chosen = c;
                    break;
                }
                u -= mix[c];
            }
            if (category_pool[chosen].empty()) chosen = used_categories[rng_event() % used_categories.size()];
            planned.push_back({i, pick_from_pool(chosen)});
        }
    }

    // min-one-share fix-up: repoint surplus events onto uncovered videos,
    // same category first so planted mixtures stay intact
    {
        std::set<std::size_t> promo_video_set;
        for (const auto& [uid, idxs] : own_videos) promo_video_set.insert(idxs.begin(), idxs.end());

        std::vector<std::vector<std::size_t>> events_on(videos.size());
        for (std::size_t e = 0; e < planned.size(); ++e) events_on[planned[e].video].push_back(e);
        std::vector<std::size_t> uncovered;
        for (std::size_t v = 0; v < videos.size(); ++v)
            if (events_on[v].empty()) uncovered.push_back(v);

        auto donor_from = [&](std::size_t cat_idx, bool same_category_only) -> std::optional<std::size_t> {
            std::size_t best_video = videos.size();
            for (std::size_t v = 0; v < videos.size(); ++v) {
                if (events_on[v].size() < 2) continue;
                if (promo_video_set.count(v)) continue;  // never touch planted promo ratios
                const auto vc = static_cast<std::size_t>(videos[v].category);
                if (same_category_only && vc != cat_idx) continue;
                if (!same_category_only && vc == static_cast<std::size_t>(Category::news_politics))
                    continue;  // keep planted political ratios intact
                if (best_video == videos.size() || events_on[v].size() > events_on[best_video].size())
                    best_video = v;
            }
            if (best_video == videos.size()) return std::nullopt;
            const std::size_t event_idx = events_on[best_video].back();
            events_on[best_video].pop_back();
            return event_idx;
        };

        for (std::size_t v : uncovered) {
            const auto cat_idx = static_cast<std::size_t>(videos[v].category);
            auto donor = donor_from(cat_idx, true);
            if (!donor) donor = donor_from(cat_idx, false);
            if (!donor)
                throw ValidationError("infeasible config: cannot cover every video with one share");
            planned[*donor].video = v;
            events_on[v].push_back(*donor);
        }
    }

    // timestamps
    std::mt19937_64 rng_lag(mix_seed(config.seed, 5));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SharingEvent> events;
    events.reserve(planned.size() + 4);
    for (std::size_t e = 0; e < planned.size(); ++e) {
        const Plan& p = plans[planned[e].user];
        const VideoRecord& v = videos[planned[e].video];
        double lag_seconds;
        if (!p.promo && unit(rng_lag) < config.late_tail_fraction) {
            lag_seconds = (40.0 + 40.0 * unit(rng_lag)) * kDay;  // long-tail reshares
        } else {
            const double median_h =
                p.promo ? config.promo_lag_median_hours : config.regular_lag_median_hours;
            lag_seconds = std::exp(std::log(median_h * kHour) + config.lag_log_sigma * normal(rng_lag));
        }
        SharingEvent ev;
        ev.tweet_id = pad_id("t", e + 1);
        ev.user_id = p.user_id;
        ev.video_id = v.video_id;
        ev.tweet_ts = v.upload_ts + static_cast<Duration>(std::llround(std::max(1.0, lag_seconds)));
        events.push_back(std::move(ev));
    }

    // ---- neighbor, hub and seed profiles ------------------------------------
    std::mt19937_64 rng_profile(mix_seed(config.seed, 6));
    std::vector<UserRecord> records;

    const std::size_t neighbor_count = std::max<std::size_t>(40, n_users);
    std::vector<std::string> neighbor_ids;
    for (std::size_t i = 0; i < neighbor_count; ++i) {
        UserRecord u;
        u.user_id = pad_id("n", i + 1);
        u.handle = random_handle(rng_profile, 10);
        u.display_name = "Account " + std::to_string(i + 1);
        u.followers_count = static_cast<std::int64_t>(log_uniform(rng_profile, 10, 3000));
        u.friends_count = rng_profile() % 100 < 15
                              ? 0
                              : static_cast<std::int64_t>(log_uniform(rng_profile, 20, 900));
        u.account_created_at = parse_timestamp("2009-01-01") +
                               static_cast<Timestamp>(rng_profile() % (3ull * 365 * kDay));
        u.tweet_count = static_cast<std::int64_t>(log_uniform(rng_profile, 10, 20000));
        u.mean_nonzero_retweet_count = rng_profile() % 100 < 30 ? 0.0 : log_uniform(rng_profile, 1, 20);
        neighbor_ids.push_back(u.user_id);
        records.push_back(std::move(u));
    }

    // interest hubs, three per taggable category
    std::map<std::size_t, std::vector<std::string>> hub_ids_by_category;
    std::vector<std::pair<std::string, std::pair<std::string, int>>> directory_rows;  // handle -> (tag, prom)
    {
        std::size_t hub_n = 0;
        const int prominences[3] = {99, 60, 25};
        for (std::size_t c = 0; c < kInterestCategoryCount; ++c) {
            const char* tag = hub_tag(static_cast<Category>(c));
            if (!tag) continue;
            for (int h = 0; h < 3; ++h) {
                UserRecord u;
                u.user_id = pad_id("h", ++hub_n);
                u.handle = "hub_" + std::string(tag) + "_" + std::to_string(h + 1);
                u.display_name = std::string(tag) + " hub";
                u.followers_count = 5000 + static_cast<std::int64_t>(rng_profile() % 200000);
                u.friends_count = 100 + static_cast<std::int64_t>(rng_profile() % 2000);
                u.account_created_at = parse_timestamp("2008-06-01");
                u.tweet_count = 50000;
                u.mean_nonzero_retweet_count = log_uniform(rng_profile, 5, 80);
                hub_ids_by_category[c].push_back(u.user_id);
                directory_rows.push_back({u.handle, {tag, prominences[h]}});
                records.push_back(std::move(u));
            }
        }
    }

    // political seed profiles reuse the bundled seed handles
    std::vector<std::string> left_seed_ids, right_seed_ids;
    {
        std::size_t seed_n = 0;
        auto add_seed = [&](const std::string& handle, bool left) {
            UserRecord u;
            u.user_id = pad_id("s", ++seed_n);
            u.handle = handle;
            u.display_name = handle;
            u.followers_count = 100000 + static_cast<std::int64_t>(rng_profile() % 1000000);
            u.friends_count = 500;
            u.account_created_at = parse_timestamp("2008-01-01");
            u.tweet_count = 10000;
            (left ? left_seed_ids : right_seed_ids).push_back(u.user_id);
            records.push_back(std::move(u));
        };
        for (const auto& h : profiles::PoliticalSeeds::bundled().left_handles) add_seed(h, true);
        for (const auto& h : profiles::PoliticalSeeds::bundled().right_handles) add_seed(h, false);
    }

    // ---- sharer profiles -------------------------------------------------------
    auto sample_distinct = [&](const std::vector<std::string>& pool, std::size_t want,
                               std::mt19937_64& rng) {
        std::vector<std::string> out;
        if (pool.empty() || want == 0) return out;
        want = std::min(want, pool.size());
        std::set<std::size_t> chosen;
        while (chosen.size() < want) chosen.insert(rng() % pool.size());
        for (std::size_t idx : chosen) out.push_back(pool[idx]);
        return out;
    };

    for (std::size_t i = 0; i < n_users; ++i) {
        const Plan& p = plans[i];
        UserRecord u;
        u.user_id = p.user_id;
        u.handle = p.handle;
        u.followers_count = static_cast<std::int64_t>(log_uniform(rng_profile, 50, 1500));
        u.friends_count = static_cast<std::int64_t>(log_uniform(rng_profile, 50, 800));
        u.follower_ids = sample_distinct(neighbor_ids, 5 + rng_profile() % 16, rng_profile);
        u.account_created_at = parse_timestamp("2009-06-01") +
                               static_cast<Timestamp>(rng_profile() % (3ull * 365 * kDay));
        u.tweet_count = p.budget * (20 + static_cast<std::int64_t>(rng_profile() % 20));
        u.retweet_fraction = 0.05 + 0.4 * unit(rng_profile);
        u.url_fraction = 0.3 + 0.5 * unit(rng_profile);
        u.youtube_url_fraction = u.url_fraction * (0.3 + 0.5 * unit(rng_profile));
        u.hashtag_fraction = 0.05 + 0.4 * unit(rng_profile);
        u.mentioned_user_count = static_cast<std::int64_t>(log_uniform(rng_profile, 5, 400));
        u.retweeted_tweet_fraction = 0.05 + 0.3 * unit(rng_profile);
        u.mean_nonzero_retweet_count = log_uniform(rng_profile, 1, 15);

        GroundTruthUser gt;
        gt.user_id = p.user_id;
        gt.promotional = p.promo;
        gt.intended_branch = p.branch;
        gt.own_channel = p.own_channel;
        gt.interest_group = p.group;
        gt.leaning = p.leaning;
        gt.political_share_probability = p.promo ? 0.0 : p.political_p;

        // gender and display name
        const std::size_t gender_pick = i % 5;
        if (gender_pick < 2) {
            gt.gender = "male";
            const char* first = kMaleNames[rng_profile() % std::size(kMaleNames)];
            u.display_name = std::string(first) + " " + kSurnames[rng_profile() % std::size(kSurnames)];
            u.display_name[0] = static_cast<char>(std::toupper(u.display_name[0]));
        } else if (gender_pick < 4) {
            gt.gender = "female";
            const char* first = kFemaleNames[rng_profile() % std::size(kFemaleNames)];
            u.display_name = std::string(first) + " " + kSurnames[rng_profile() % std::size(kSurnames)];
            u.display_name[0] = static_cast<char>(std::toupper(u.display_name[0]));
        } else {
            gt.gender = "unknown";
            u.display_name = random_handle(rng_profile, 7) + "99";
        }

        // bio: a themed line plus planted role tokens
        std::string bio;
        if (!p.promo) {
            const char* tag = nullptr;
            const auto& mix = mixtures[static_cast<std::size_t>(p.group)];
            const std::size_t dominant =
                static_cast<std::size_t>(std::max_element(mix.begin(), mix.end()) - mix.begin());
            tag = hub_tag(static_cast<Category>(dominant));
            bio = std::string(tag ? tag : "video") + " fan sharing clips daily";
        } else {
            bio = "daily uploads and highlights";
        }
        if (i % 7 == 0 && gt.gender == "female") {
            bio += "; proud mom of two";
            gt.roles.push_back("mother");
        }
        if (i % 9 == 0 && gt.gender == "male") {
            bio += "; husband and dad";
            gt.roles.push_back("father");
        }
        if (i % 6 == 0) {
            bio += "; studying engineering";
            gt.roles.push_back("student");
        }
        u.bio = bio;

        // location
        switch (i % 5) {
            case 0:
                gt.geo = "urban_us";
                u.location_raw = kUrbanCities[rng_profile() % std::size(kUrbanCities)];
                break;
            case 1:
                gt.geo = "rural_us";
                u.location_raw = kRuralCities[rng_profile() % std::size(kRuralCities)];
                break;
            case 2:
                gt.geo = "us_other";
                u.location_raw = "USA";
                break;
            case 3:
                gt.geo = "non_us";
                u.location_raw = kForeign[rng_profile() % std::size(kForeign)];
                break;
            default:
                gt.geo = "unknown";
                u.location_raw = "";
                break;
        }

        // friends: interest hubs biased to the group's categories, political
        // seeds per leaning, a few neighbors
        std::vector<std::string> friends;
        if (!p.promo) {
            // every hub of the group's top three categories, plus a few
            // others; keeps the matched-friend count safely above the
            // clustering eligibility bar while the interests stay themed
            const auto& mix = mixtures[static_cast<std::size_t>(p.group)];
            std::vector<std::size_t> order(mix.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return mix[a] > mix[b]; });
            std::set<std::string> top_hub_ids;
            std::size_t taken = 0;
            for (std::size_t c : order) {
                if (taken == 3) break;
                auto it = hub_ids_by_category.find(c);
                if (it == hub_ids_by_category.end()) continue;
                top_hub_ids.insert(it->second.begin(), it->second.end());
                ++taken;
            }
            std::vector<std::string> other_hub_ids;
            for (const auto& [c, ids] : hub_ids_by_category)
                for (const auto& id : ids)
                    if (!top_hub_ids.count(id)) other_hub_ids.push_back(id);
            friends.assign(top_hub_ids.begin(), top_hub_ids.end());
            for (auto& id : sample_distinct(other_hub_ids, 3 + rng_profile() % 4, rng_profile))
                friends.push_back(id);
        } else {
            for (std::size_t h = 0; h < rng_profile() % 4; ++h) {
                auto it = hub_ids_by_category.begin();
                std::advance(it, rng_profile() % hub_ids_by_category.size());
                friends.push_back(it->second[rng_profile() % it->second.size()]);
            }
        }
        if (gt.leaning == "left") {
            for (auto& id : sample_distinct(left_seed_ids, 2 + rng_profile() % 2, rng_profile))
                friends.push_back(id);
            if (rng_profile() % 3 == 0) friends.push_back(right_seed_ids[rng_profile() % right_seed_ids.size()]);
        } else if (gt.leaning == "right") {
            for (auto& id : sample_distinct(right_seed_ids, 2 + rng_profile() % 2, rng_profile))
                friends.push_back(id);
            if (rng_profile() % 3 == 0) friends.push_back(left_seed_ids[rng_profile() % left_seed_ids.size()]);
        } else if (rng_profile() % 5 == 0) {
            // split preference stays apolitical
            friends.push_back(left_seed_ids[rng_profile() % left_seed_ids.size()]);
            friends.push_back(right_seed_ids[rng_profile() % right_seed_ids.size()]);
        }
        for (auto& id : sample_distinct(neighbor_ids, rng_profile() % 5, rng_profile))
            friends.push_back(id);
        std::sort(friends.begin(), friends.end());
        friends.erase(std::unique(friends.begin(), friends.end()), friends.end());
        u.friend_ids = std::move(friends);

        truth.users[u.user_id] = gt;
        (p.promo ? truth.promo_user_ids : truth.regular_user_ids).push_back(u.user_id);
        records.push_back(std::move(u));
    }

    // ---- cleansing noise ----------------------------------------------------
    std::mt19937_64 rng_noise(mix_seed(config.seed, 7));
    if (config.plant_cleansing_noise) {
        UserRecord noise_user;
        noise_user.user_id = pad_id("u", n_users + 1);
        noise_user.handle = random_handle(rng_noise, 11);
        noise_user.display_name = "Stream Relay";
        noise_user.followers_count = 40;
        noise_user.friends_count = 40;
        noise_user.account_created_at = parse_timestamp("2011-01-01");
        noise_user.tweet_count = 500;
        records.push_back(noise_user);

        // two negative lags on existing videos (live-stream style noise)
        for (int k = 0; k < 2; ++k) {
            const VideoRecord& v = videos[rng_noise() % videos.size()];
            SharingEvent ev;
            ev.tweet_id = pad_id("t", planned.size() + 1 + static_cast<std::size_t>(k));
            ev.user_id = noise_user.user_id;
            ev.video_id = v.video_id;
            ev.tweet_ts = v.upload_ts - static_cast<Duration>(1 + rng_noise() % (2 * kHour));
            events.push_back(std::move(ev));
            ++truth.noise_event_count;
        }
        // two legacy videos with events after the cutoff
        for (int k = 0; k < 2; ++k) {
            VideoRecord v;
            v.video_id = pad_id("v", videos.size() + 1);
            v.uploader_handle = "studio_" + std::string(kStudioWords[k]) + "_0";
            v.upload_ts = parse_timestamp("2011-06-01") + static_cast<Timestamp>(k) * 90 * kDay;
            v.category = Category::music;
            v.views = 1000;
            v.likes = 10;
            v.dislikes = 2;
            v.topics = {"t_music_0"};
            SharingEvent ev;
            ev.tweet_id = pad_id("t", planned.size() + 3 + static_cast<std::size_t>(k));
            ev.user_id = noise_user.user_id;
            ev.video_id = v.video_id;
            ev.tweet_ts = parse_timestamp("2012-02-10") + static_cast<Timestamp>(rng_noise() % kDay);
            videos.push_back(std::move(v));
            events.push_back(std::move(ev));
            ++truth.noise_event_count;
        }
    }

    // ---- views from the planted model ------------------------------------------
    // The attention metrics are recomputed here with straight-line loops so
    // the pipeline's implementation can be checked against this independent
    // route end to end.
    std::mt19937_64 rng_views(mix_seed(config.seed, 8));
    {
        std::map<std::string, const UserRecord*> by_id;
        for (const auto& r : records) by_id[r.user_id] = &r;
        std::map<std::string, bool> promo_by_id;
        for (const auto& p : plans) promo_by_id[p.user_id] = p.promo;

        std::map<std::string, std::set<std::string>> first_week_sharers;  // video -> user ids
        std::map<std::string, std::int64_t> first_week_count;
        std::map<std::string, std::size_t> video_index;
        for (std::size_t v = 0; v < videos.size(); ++v) video_index[videos[v].video_id] = v;
        std::map<std::string, bool> video_is_promo;
        for (const auto& [uid, idxs] : own_videos)
            for (std::size_t v : idxs) video_is_promo[videos[v].video_id] = true;

        for (const auto& ev : events) {
            const VideoRecord& v = videos[video_index.at(ev.video_id)];
            const Duration lag = ev.tweet_ts - v.upload_ts;
            if (lag < 0 || lag > kFirstWeekSeconds) continue;
            const bool promo_event = promo_by_id.count(ev.user_id) ? promo_by_id.at(ev.user_id) : false;
            const bool promo_video = video_is_promo.count(ev.video_id) > 0;
            // plant V on the audience that will be evaluated against it
            if (promo_video != promo_event) continue;
            first_week_sharers[ev.video_id].insert(ev.user_id);
            ++first_week_count[ev.video_id];
        }

        std::normal_distribution<double> z(0.0, 1.0);
        for (auto& v : videos) {
            double views;
            auto sit = first_week_sharers.find(v.video_id);
            if (sit == first_week_sharers.end()) {
                views = config.views_scale * std::exp(config.views_noise_sigma * z(rng_views));
            } else {
                double S = static_cast<double>(first_week_count.at(v.video_id));
                double E = 0, I = 0, E2 = 0, A = 0;
                for (const auto& uid : sit->second) {
                    const UserRecord& u = *by_id.at(uid);
                    E += static_cast<double>(u.followers_count);
                    I += u.mean_nonzero_retweet_count;
                    double friends_sum = 0;
                    std::int64_t friends_n = 0;
                    for (const auto& fid : u.follower_ids) {
                        const UserRecord& f = *by_id.at(fid);
                        E2 += static_cast<double>(f.followers_count);
                        if (f.friends_count > 0) {
                            friends_sum += static_cast<double>(f.friends_count);
                            ++friends_n;
                        }
                    }
                    if (friends_n > 0)
                        A += static_cast<double>(u.followers_count) /
                             (friends_sum / static_cast<double>(friends_n));
                }
                const double log_v = std::log(config.views_scale) +
                                     config.exponents[0] * std::log(std::max(S, 1.0)) +
                                     config.exponents[1] * std::log(std::max(I, 1.0)) +
                                     config.exponents[2] * std::log(std::max(E, 1.0)) +
                                     config.exponents[3] * std::log(std::max(E2, 1.0)) +
                                     config.exponents[4] * std::log(std::max(A, 1.0)) +
                                     config.views_noise_sigma * z(rng_views);
                views = std::exp(log_v);
            }
            v.views = std::max<std::int64_t>(1, std::llround(views));
            const double like_noise = std::exp(0.3 * z(rng_views));
            const double dislike_noise = std::exp(0.3 * z(rng_views));
            v.likes = std::llround(0.05 * std::pow(static_cast<double>(v.views), config.like_exponent) *
                                   like_noise);
            v.dislikes = std::llround(
                0.012 * std::pow(static_cast<double>(v.views), config.dislike_exponent) * dislike_noise);
            v.favorites = v.views / 200;
            v.raters = v.likes + v.dislikes;
            v.comments = v.views / 150;
        }
    }

    // ---- write everything --------------------------------------------------------
    std::sort(records.begin(), records.end(),
              [](const UserRecord& a, const UserRecord& b) { return a.user_id < b.user_id; });
    {
        std::ofstream out(fs::path(out_dir) / "users.jsonl");
        for (const auto& r : records) out << ingest::user_to_json(r) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "videos.jsonl");
        for (const auto& v : videos) out << ingest::video_to_json(v) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "events.jsonl");
        for (const auto& e : events) out << ingest::event_to_json(e) << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "directory.tsv");
        for (const auto& [handle, entry] : directory_rows)
            out << handle << '\t' << entry.first << '\t' << entry.second << '\n';
    }

    truth.sharer_count = static_cast<std::int64_t>(n_users);
    truth.neighbor_count = static_cast<std::int64_t>(neighbor_count);

    ordered_json gt;
    gt["as_of"] = truth.as_of;
    gt["seed"] = config.seed;
    gt["sharer_count"] = truth.sharer_count;
    gt["neighbor_count"] = truth.neighbor_count;
    gt["noise_event_count"] = truth.noise_event_count;
    ordered_json planted;
    planted["exponents"] = config.exponents;
    planted["views_noise_sigma"] = config.views_noise_sigma;
    planted["views_scale"] = config.views_scale;
    planted["promo_lag_median_hours"] = config.promo_lag_median_hours;
    planted["regular_lag_median_hours"] = config.regular_lag_median_hours;
    planted["mu_left"] = config.mu_left;
    planted["mu_right"] = config.mu_right;
    planted["mu_apolitical"] = config.mu_apolitical;
    planted["like_exponent"] = config.like_exponent;
    planted["dislike_exponent"] = config.dislike_exponent;
    gt["planted"] = planted;
    ordered_json users_json;
    for (const auto& [uid, gtu] : truth.users) {
        ordered_json u;
        u["interest_group"] = gtu.interest_group;
        u["leaning"] = gtu.leaning;
        u["political_share_probability"] = gtu.political_share_probability;
        u["gender"] = gtu.gender;
        u["roles"] = gtu.roles;
        u["geo"] = gtu.geo;
        u["promotional"] = gtu.promotional;
        u["intended_branch"] = gtu.intended_branch;
        u["own_channel"] = gtu.own_channel;
        users_json[uid] = u;
    }
    gt["users"] = users_json;
    {
        std::ofstream out(fs::path(out_dir) / "ground_truth.json");
        out << gt.dump(2) << "\n";
    }
    return truth;
}

GroundTruth read_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + path);
    ordered_json j = ordered_json::parse(in);
    GroundTruth truth;
    truth.as_of = j.at("as_of").get<Timestamp>();
    truth.sharer_count = j.at("sharer_count").get<std::int64_t>();
    truth.neighbor_count = j.at("neighbor_count").get<std::int64_t>();
    truth.noise_event_count = j.at("noise_event_count").get<std::int64_t>();
    truth.config.seed = j.at("seed").get<std::uint64_t>();
    const auto& planted = j.at("planted");
    truth.config.exponents = planted.at("exponents").get<std::array<double, 5>>();
    truth.config.views_noise_sigma = planted.at("views_noise_sigma").get<double>();
    truth.config.views_scale = planted.at("views_scale").get<double>();
    truth.config.promo_lag_median_hours = planted.at("promo_lag_median_hours").get<double>();
    truth.config.regular_lag_median_hours = planted.at("regular_lag_median_hours").get<double>();
    truth.config.mu_left = planted.at("mu_left").get<double>();
    truth.config.mu_right = planted.at("mu_right").get<double>();
    truth.config.mu_apolitical = planted.at("mu_apolitical").get<double>();
    truth.config.like_exponent = planted.at("like_exponent").get<double>();
    truth.config.dislike_exponent = planted.at("dislike_exponent").get<double>();
    for (const auto& [uid, u] : j.at("users").items()) {
        GroundTruthUser gtu;
        gtu.user_id = uid;
        gtu.interest_group = u.at("interest_group").get<int>();
        gtu.leaning = u.at("leaning").get<std::string>();
        gtu.political_share_probability = u.at("political_share_probability").get<double>();
        gtu.gender = u.at("gender").get<std::string>();
        for (const auto& r : u.at("roles")) gtu.roles.push_back(r.get<std::string>());
        gtu.geo = u.at("geo").get<std::string>();
        gtu.promotional = u.at("promotional").get<bool>();
        gtu.intended_branch = u.at("intended_branch").get<int>();
        gtu.own_channel = u.at("own_channel").get<std::string>();
        (gtu.promotional ? truth.promo_user_ids : truth.regular_user_ids).push_back(uid);
        truth.users[uid] = std::move(gtu);
    }
    return truth;
}

}  // namespace tubewire::synth
