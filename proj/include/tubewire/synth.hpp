#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "tubewire/types.hpp"

namespace tubewire::synth {

// Knobs for the planted-parameter generator. Defaults plant the published
// values: the non-promotional substitutes-model exponents, the 18 h vs 38 h
// promo/regular lag medians and the per-leaning political share means.
struct SyntheticConfig {
    std::int64_t user_count = 60;    // sharers
    std::int64_t video_count = 300;
    std::int64_t event_count = 1000;

    // views-model exponents for (S, I, E, second-order E, A), noise, scale
    std::array<double, 5> exponents = {1.083, 0.449, 0.096, 0.118, -0.102};
    double views_noise_sigma = 1.0;  // log-space
    double views_scale = 300.0;

    double promo_fraction = 0.15;
    double promo_lag_median_hours = 18.0;
    double regular_lag_median_hours = 38.0;
    double lag_log_sigma = 0.7;
    double late_tail_fraction = 0.01;  // regular-user lags drawn from [40, 80] days

    // political composition and planted per-group political share means
    double left_fraction = 0.2;
    double right_fraction = 0.1;
    double mu_left = 0.06;
    double mu_right = 0.29;
    double mu_apolitical = 0.05;

    // interest groups: per-group category mixture over the 19 video
    // categories; empty means "use the built-in four-group default"
    std::vector<std::array<double, kVideoCategoryCount>> category_mixtures;

    // planted like/dislike scaling exponents (polarization refit target)
    double like_exponent = 0.849;
    double dislike_exponent = 0.884;

    bool plant_cleansing_noise = true;  // a few negative-lag and legacy records
    std::uint64_t seed = 42;

    void validate() const;
};

struct GroundTruthUser {
    std::string user_id;
    int interest_group = -1;     // -1 for promotional users
    std::string leaning;         // left / right / apolitical
    double political_share_probability = 0;
    std::string gender;          // male / female / unknown
    std::vector<std::string> roles;
    std::string geo;
    bool promotional = false;
    int intended_branch = 0;     // 1..3 for promotional users
    std::string own_channel;
};

struct GroundTruth {
    SyntheticConfig config;
    Timestamp as_of = 0;  // synthetic crawl time; uploads end well before it
    std::map<std::string, GroundTruthUser> users;
    std::vector<std::string> promo_user_ids;
    std::vector<std::string> regular_user_ids;
    std::int64_t sharer_count = 0;
    std::int64_t neighbor_count = 0;
    std::int64_t noise_event_count = 0;  // events planted to be cleansed away
};

// Writes users.jsonl, videos.jsonl, events.jsonl, directory.tsv and
// ground_truth.json into out_dir. Deterministic for a fixed config.
GroundTruth generate_synthetic(const SyntheticConfig& config, const std::string& out_dir);

GroundTruth read_ground_truth(const std::string& path);

}  // namespace tubewire::synth
