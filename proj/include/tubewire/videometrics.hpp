#pragma once

#include <optional>
#include <string>

#include "tubewire/ingest.hpp"

namespace tubewire::videometrics {

struct PolarizationParams {
    double like_exponent = 0.849;     // a
    double dislike_exponent = 0.884;  // b

    void validate() const;  // both in (0, 1.5)
};

// Pol_v = (L / V^a) * (D / V^b). Requires V >= 1.
double polarization(std::int64_t views, std::int64_t likes, std::int64_t dislikes,
                    const PolarizationParams& params = {});

struct UserAggregates {
    std::string user_id;
    // Video attributes over distinct shared videos by default (see flag).
    std::optional<double> median_views;
    std::optional<double> median_polarization;  // absent when every video has V = 0
    // Lag statistics are always per event.
    double median_lag = 0;
    double mean_lag = 0;
    double lag_stddev = 0;  // population (divide by n)
    std::int64_t num_videos_shared = 0;  // distinct
    std::int64_t num_events = 0;
};

// weight_video_stats_by_event: when true, view/polarization medians count a
// video once per sharing event instead of once per distinct video.
UserAggregates user_aggregates(const std::string& user_id, const ingest::EventStore& store,
                               const PolarizationParams& params = {},
                               bool weight_video_stats_by_event = false);

// Recomputes the polarization exponents from the corpus as the slopes of
// log-likes and log-dislikes against log-views (videos with positive counts).
PolarizationParams refit_polarization_exponents(const ingest::EventStore& store);

}  // namespace tubewire::videometrics
