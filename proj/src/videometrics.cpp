#include "tubewire/videometrics.hpp"

#include <cmath>
#include <set>

namespace tubewire::videometrics {

void PolarizationParams::validate() const {
    if (like_exponent <= 0 || like_exponent >= 1.5 || dislike_exponent <= 0 || dislike_exponent >= 1.5)
        throw ValidationError("polarization exponents must lie in (0, 1.5)");
}

double polarization(std::int64_t views, std::int64_t likes, std::int64_t dislikes,
                    const PolarizationParams& params) {
    params.validate();
    if (views < 1)
        throw ValidationError("polarization undefined for views < 1");
    const double v = static_cast<double>(views);
    return (static_cast<double>(likes) / std::pow(v, params.like_exponent)) *
           (static_cast<double>(dislikes) / std::pow(v, params.dislike_exponent));
}

UserAggregates user_aggregates(const std::string& user_id, const ingest::EventStore& store,
                               const PolarizationParams& params, bool weight_video_stats_by_event) {
    UserAggregates agg;
    agg.user_id = user_id;

    std::vector<double> lags;
    std::vector<const VideoRecord*> sampled_videos;
    std::set<std::string> distinct;
    for (const auto& e : store.events) {
        if (e.user_id != user_id) continue;
        lags.push_back(static_cast<double>(e.lag));
        const bool first_time = distinct.insert(e.video_id).second;
        if (weight_video_stats_by_event || first_time)
            sampled_videos.push_back(&store.video(e.video_id));
    }
    if (lags.empty())
        throw ValidationError("user_aggregates: user has no retained events: " + user_id);

    agg.num_events = static_cast<std::int64_t>(lags.size());
    agg.num_videos_shared = static_cast<std::int64_t>(distinct.size());
    agg.median_lag = median(lags);
    agg.mean_lag = mean(lags);
    agg.lag_stddev = stddev_population(lags);

    std::vector<double> views, pols;
    for (const VideoRecord* v : sampled_videos) {
        views.push_back(static_cast<double>(v->views));
        if (v->views >= 1) pols.push_back(polarization(v->views, v->likes, v->dislikes, params));
    }
    if (!views.empty()) agg.median_views = median(views);
    if (!pols.empty()) agg.median_polarization = median(pols);
    return agg;
}

namespace {

// OLS slope of y on x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0)
        throw ValidationError("refit: zero variance in log views");
    return sxy / sxx;
}

}  // namespace

PolarizationParams refit_polarization_exponents(const ingest::EventStore& store) {
    std::vector<double> lv_like, ll, lv_dis, ld;
    for (const auto& [id, v] : store.videos) {
        if (v.views >= 1 && v.likes >= 1) {
            lv_like.push_back(std::log(static_cast<double>(v.views)));
            ll.push_back(std::log(static_cast<double>(v.likes)));
        }
        if (v.views >= 1 && v.dislikes >= 1) {
            lv_dis.push_back(std::log(static_cast<double>(v.views)));
            ld.push_back(std::log(static_cast<double>(v.dislikes)));
        }
    }
    if (lv_like.size() < 10 || lv_dis.size() < 10)
        throw ValidationError("refit: need at least 10 videos with positive likes and dislikes");
    PolarizationParams params;
    params.like_exponent = slope(lv_like, ll);
    params.dislike_exponent = slope(lv_dis, ld);
    params.validate();
    return params;
}

}  // namespace tubewire::videometrics
