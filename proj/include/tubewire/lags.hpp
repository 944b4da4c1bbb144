#pragma once

#include <map>
#include <string>
#include <vector>

#include "tubewire/ingest.hpp"

namespace tubewire::lags {

// A sample of inter-event times with cached quantiles and a histogram over
// log10-spaced bins (10 per decade; lags below 1 s land in an underflow bin).
class LagDistribution {
public:
    explicit LagDistribution(std::vector<double> lags_seconds);

    const std::vector<double>& sample() const { return sample_; }  // sorted
    std::size_t size() const { return sample_.size(); }
    bool empty() const { return sample_.empty(); }

    double quantile(double q) const;  // [0,1], linear interpolation
    double median() const { return quantile(0.5); }
    double cdf(double t) const;  // fraction of lags <= t

    struct HistogramBin {
        double low = 0;
        double high = 0;
        std::int64_t count = 0;
    };
    const std::vector<HistogramBin>& histogram() const { return bins_; }

    // Two-column (lag_seconds, F) rows on the log-spaced grid.
    std::vector<std::pair<double, double>> cdf_grid() const;

private:
    std::vector<double> sample_;
    std::vector<double> cached_quantiles_;  // percentiles 0..100
    std::vector<HistogramBin> bins_;
};

// Per-user median lags for a set of users (each must have >= 1 event).
std::map<std::string, double> per_user_median_lags(const ingest::EventStore& store,
                                                   const std::vector<std::string>& user_ids);

// Median of the users' per-user median lags.
double group_median_lag(const ingest::EventStore& store, const std::vector<std::string>& user_group);
double group_median_lag(const std::vector<double>& per_user_medians);

// System-level lag collection for one category (every event whose video is
// in the category contributes).
LagDistribution category_lag_cdf(const ingest::EventStore& store, Category category);

struct DecileRow {
    int decile = 0;  // 1 = least active
    std::int64_t user_count = 0;
    std::int64_t min_shares = 0;
    std::int64_t max_shares = 0;
    double median_of_median_lags = 0;
};

// Users ranked ascending by number of events (ties by user_id), split into
// 10 near-equal buckets; the remainder goes to the lowest-activity buckets.
std::vector<DecileRow> activity_deciles(const ingest::EventStore& store);

void write_cdf_tsv(const LagDistribution& dist, const std::string& path);
void write_deciles_tsv(const std::vector<DecileRow>& rows, const std::string& path);

}  // namespace tubewire::lags
