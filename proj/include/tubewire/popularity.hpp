#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tubewire/ingest.hpp"

namespace tubewire::popularity {

// First-week attention metrics plus the final view count.
struct AttentionVector {
    std::string video_id;
    double shares = 0;                 // S_v = sum of n_v(u)
    double exposure = 0;               // E_v = sum of f(u) over distinct sharers
    double impact = 0;                 // I_v = sum of R0(u)
    double second_order_exposure = 0;  // curly E_v = sum over followers of f(u')
    double share_of_voice = 0;         // A_v = sum of f(u) / mean friends count of followers
    double final_views = 0;            // V_v
};

// Names the five regressors in model order: S, I, E, second-order E, A.
constexpr std::array<const char*, 5> kMetricNames = {"S", "I", "E", "E2", "A"};

// Metrics for one video from its first-week events. Sharers must resolve in
// the user table; followers that lack a profile are skipped in the
// second-order sums. A sharer with an empty follower list contributes 0 to
// second-order exposure and share of voice. Adding a sharer never decreases
// S, E, I or the second-order exposure; the share of voice can move either
// way (its inner mean depends on the new sharer's audience).
AttentionVector attention_vector(const VideoRecord& video,
                                 const std::vector<SharingEvent>& first_week_events,
                                 const std::map<std::string, UserRecord>& users);

// Vectors for every video with first-week attention from the given sharers,
// ordered by video id. Videos younger than min_age_days at store.config.as_of
// are excluded (their views are not "final" yet).
std::vector<AttentionVector> attention_vectors(const ingest::EventStore& store,
                                               const std::vector<std::string>& sharer_subset,
                                               double min_age_days = 30.0, int threads = 0);

struct PowerLawFit {
    double exponent = 0;
    double stderr_exponent = 0;
    double intercept = 0;  // in log space
    std::size_t n = 0;
};

// OLS of log y on log x. Requires positive data and n >= 10.
PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y);

struct BinnedRow {
    double bin_low = 0;
    double bin_high = 0;
    double bin_center = 0;  // geometric mean of the edges
    std::int64_t count = 0;
    double mean_y = 0;
    double stderr_y = 0;  // sample stddev / sqrt(n); 0 for singletons
};

// Log-spaced bin edges covering [min_x, max_x].
std::vector<double> log_bin_edges(double min_x, double max_x, int bins_per_decade = 4);

// Mean and standard error of y per bin of x; empty bins omitted.
std::vector<BinnedRow> binned_means(std::span<const double> x, std::span<const double> y,
                                    const std::vector<double>& edges);

struct FitResult {
    std::array<double, 5> exponents{};  // alpha..kappa for S, I, E, E2, A
    std::array<double, 5> stderrs{};
    std::array<double, 5> p_values{};   // two-sided, normal approximation
    double intercept = 0;
    double intercept_stderr = 0;
    double r_squared = 0;
    std::size_t n = 0;

    double predict_views(const AttentionVector& v) const;  // back in view space
};

// Least squares of log V on the five log regressors plus intercept. Values
// below 1 (zeros included) are floored at 1 before the log transform.
FitResult fit_substitutes_model(const std::vector<AttentionVector>& vectors);

struct ClassifiedVideo {
    std::string video_id;
    bool actual_popular = false;     // V >= threshold
    bool predicted_popular = false;  // model estimate > threshold
};

std::vector<ClassifiedVideo> classify_popular(const FitResult& fit,
                                              const std::vector<AttentionVector>& vectors,
                                              double threshold = 10000.0);

struct CvResult {
    double mean_precision = 0;
    double mean_recall = 0;
    double base_rate = 0;           // mean fraction of popular videos per fold
    double random_precision = 0;    // label-shuffling baseline on the same partitions
    double random_recall = 0;
    int folds = 0;
    int precision_excluded_folds = 0;  // no predicted positives
    int recall_excluded_folds = 0;     // no actual positives
};

// Shuffled k-fold cross validation; the shuffle derives from the seed, so
// fold assignment is reproducible bit for bit.
CvResult cross_validate(const std::vector<AttentionVector>& vectors, int k = 10,
                        std::uint64_t seed = 1, double threshold = 10000.0);

void write_attention_tsv(const std::vector<AttentionVector>& vectors, const std::string& path);
void write_fit_json(const FitResult& fit, const std::string& path);
void write_cv_json(const CvResult& cv, const std::string& path);

}  // namespace tubewire::popularity
