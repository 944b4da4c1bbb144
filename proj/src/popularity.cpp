#include "tubewire/popularity.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

using nlohmann::ordered_json;

namespace tubewire::popularity {

AttentionVector attention_vector(const VideoRecord& video,
                                 const std::vector<SharingEvent>& first_week_events,
                                 const std::map<std::string, UserRecord>& users) {
    if (first_week_events.empty())
        throw ValidationError("attention_vector: no first-week events for " + video.video_id);

    AttentionVector out;
    out.video_id = video.video_id;
    out.final_views = static_cast<double>(video.views);

    std::set<std::string> distinct;
    for (const auto& e : first_week_events) {
        out.shares += 1.0;  // S sums n_v(u) = one per event
        distinct.insert(e.user_id);
    }

    for (const auto& uid : distinct) {
        auto uit = users.find(uid);
        if (uit == users.end())
            throw ValidationError("attention_vector: sharer missing from user table: " + uid);
        const UserRecord& u = uit->second;
        out.exposure += static_cast<double>(u.followers_count);
        out.impact += u.mean_nonzero_retweet_count;

        // Second-order sums walk the capped follower list; followers without
        // a crawled profile are skipped.
        double friends_sum = 0;
        std::int64_t friends_n = 0;
        for (const auto& fid : u.follower_ids) {
            auto fit = users.find(fid);
            if (fit == users.end()) continue;
            out.second_order_exposure += static_cast<double>(fit->second.followers_count);
            if (fit->second.friends_count > 0) {  // A's inner mean skips f^-1 = 0
                friends_sum += static_cast<double>(fit->second.friends_count);
                ++friends_n;
            }
        }
        if (friends_n > 0)
            out.share_of_voice += static_cast<double>(u.followers_count) /
                                  (friends_sum / static_cast<double>(friends_n));
    }
    return out;
}

std::vector<AttentionVector> attention_vectors(const ingest::EventStore& store,
                                               const std::vector<std::string>& sharer_subset,
                                               double min_age_days, int threads) {
    const std::unordered_set<std::string> allowed(sharer_subset.begin(), sharer_subset.end());
    auto slice = ingest::first_week_slice(store);

    std::vector<std::pair<const VideoRecord*, std::vector<SharingEvent>>> work;
    const Timestamp age_floor =
        store.config.as_of - static_cast<Timestamp>(min_age_days * kSecondsPerDay);
    for (auto& [vid, events] : slice) {
        const VideoRecord& video = store.video(vid);
        if (video.upload_ts > age_floor) continue;  // views not final yet
        std::vector<SharingEvent> filtered;
        for (auto& e : events)
            if (allowed.count(e.user_id)) filtered.push_back(std::move(e));
        if (!filtered.empty()) work.emplace_back(&video, std::move(filtered));
    }

    std::vector<AttentionVector> vectors(work.size());
    parallel_chunks(work.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            vectors[i] = attention_vector(*work[i].first, work[i].second, store.users);
    });
    return vectors;
}

namespace {

struct Ols {
    std::vector<double> beta;
    std::vector<double> stderrs;
    double r_squared = 0;
    double rss = 0;
};

// OLS with intercept via centered normal equations and Cholesky. `names`
// label the slope columns in rank-deficiency errors.
Ols ols_with_intercept(const std::vector<std::array<double, 5>>& x, const std::vector<double>& y,
                       std::span<const char* const> names) {
    const std::size_t n = y.size();
    const std::size_t p = 5;

    std::array<double, p> mx{};
    double my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) mx[j] += x[i][j];
        my += y[i];
    }
    for (auto& m : mx) m /= static_cast<double>(n);
    my /= static_cast<double>(n);

    // normal equations on centered data
    std::array<std::array<double, p>, p> xtx{};
    std::array<double, p> xty{};
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, p> c;
        for (std::size_t j = 0; j < p; ++j) c[j] = x[i][j] - mx[j];
        const double cy = y[i] - my;
        for (std::size_t j = 0; j < p; ++j) {
            xty[j] += c[j] * cy;
            for (std::size_t k = j; k < p; ++k) xtx[j][k] += c[j] * c[k];
        }
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < j; ++k) xtx[j][k] = xtx[k][j];

    // Cholesky factorization, failing pivots name the collinear column.
    std::array<std::array<double, p>, p> chol{};
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
            double sum = xtx[j][k];
            for (std::size_t m = 0; m < k; ++m) sum -= chol[j][m] * chol[k][m];
            if (j == k) {
                if (sum <= 1e-12 * std::max(1.0, xtx[j][j]))
                    throw ValidationError(std::string("rank-deficient design: column log(") +
                                          names[j] + ") is constant or collinear with earlier columns");
                chol[j][j] = std::sqrt(sum);
            } else {
                chol[j][k] = sum / chol[k][k];
            }
        }
    }

    auto solve = [&](std::array<double, p> rhs) {
        std::array<double, p> z{};
        for (std::size_t j = 0; j < p; ++j) {
            double sum = rhs[j];
            for (std::size_t m = 0; m < j; ++m) sum -= chol[j][m] * z[m];
            z[j] = sum / chol[j][j];
        }
        std::array<double, p> b{};
        for (std::size_t jj = p; jj-- > 0;) {
            double sum = z[jj];
            for (std::size_t m = jj + 1; m < p; ++m) sum -= chol[m][jj] * b[m];
            b[jj] = sum / chol[jj][jj];
        }
        return b;
    };

    const std::array<double, p> slopes = solve(xty);

    Ols result;
    result.beta.assign(slopes.begin(), slopes.end());
    double intercept = my;
    for (std::size_t j = 0; j < p; ++j) intercept -= slopes[j] * mx[j];
    result.beta.push_back(intercept);

    double tss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = intercept;
        for (std::size_t j = 0; j < p; ++j) fitted += slopes[j] * x[i][j];
        result.rss += (y[i] - fitted) * (y[i] - fitted);
        tss += (y[i] - my) * (y[i] - my);
    }
    result.r_squared = tss > 0 ? 1.0 - result.rss / tss : 1.0;

    // covariance of the slopes: s^2 (Xc'Xc)^-1, via columns of the identity
    const double dof = static_cast<double>(n) - static_cast<double>(p) - 1.0;
    const double s2 = dof > 0 ? result.rss / dof : 0.0;
    std::array<std::array<double, p>, p> inv{};
    for (std::size_t j = 0; j < p; ++j) {
        std::array<double, p> e{};
        e[j] = 1.0;
        inv[j] = solve(e);
    }
    result.stderrs.resize(p + 1);
    for (std::size_t j = 0; j < p; ++j) result.stderrs[j] = std::sqrt(std::max(0.0, s2 * inv[j][j]));
    double quad = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) quad += mx[j] * inv[j][k] * mx[k];
    result.stderrs[p] = std::sqrt(std::max(0.0, s2 * quad));
    return result;
}

double two_sided_normal_p(double t) {
    return std::erfc(std::abs(t) / std::sqrt(2.0));
}

double floored_log(double v) {
    return std::log(std::max(v, 1.0));
}

std::array<double, 5> regressor_row(const AttentionVector& v) {
    return {floored_log(v.shares), floored_log(v.impact), floored_log(v.exposure),
            floored_log(v.second_order_exposure), floored_log(v.share_of_voice)};
}

}  // namespace

PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("power_law_fit: length mismatch");
    if (x.size() < 10)
        throw ValidationError("power_law_fit: need at least 10 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw ValidationError("power_law_fit: non-positive value, log undefined");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0)
        throw ValidationError("power_law_fit: zero variance in x");
    PowerLawFit fit;
    fit.n = n;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
        rss += r * r;
    }
    fit.stderr_exponent = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return fit;
}

std::vector<double> log_bin_edges(double min_x, double max_x, int bins_per_decade) {
    if (min_x <= 0 || max_x < min_x)
        throw ValidationError("log_bin_edges: need 0 < min_x <= max_x");
    if (bins_per_decade < 1)
        throw ValidationError("log_bin_edges: bins_per_decade must be positive");
    const double step = 1.0 / bins_per_decade;
    const double lo = std::floor(std::log10(min_x) / step) * step;
    std::vector<double> edges;
    for (double e = lo;; e += step) {
        edges.push_back(std::pow(10.0, e));
        if (edges.back() > max_x) break;
    }
    return edges;
}

std::vector<BinnedRow> binned_means(std::span<const double> x, std::span<const double> y,
                                    const std::vector<double>& edges) {
    if (x.size() != y.size())
        throw ValidationError("binned_means: length mismatch");
    if (edges.size() < 2)
        throw ValidationError("binned_means: need at least two bin edges");
    std::vector<std::vector<double>> contents(edges.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto it = std::upper_bound(edges.begin(), edges.end(), x[i]);
        if (it == edges.begin() || it == edges.end()) continue;  // outside grid
        contents[static_cast<std::size_t>(it - edges.begin()) - 1].push_back(y[i]);
    }
    std::vector<BinnedRow> rows;
    for (std::size_t b = 0; b < contents.size(); ++b) {
        if (contents[b].empty()) continue;
        BinnedRow row;
        row.bin_low = edges[b];
        row.bin_high = edges[b + 1];
        row.bin_center = std::sqrt(edges[b] * edges[b + 1]);
        row.count = static_cast<std::int64_t>(contents[b].size());
        row.mean_y = mean(contents[b]);
        if (contents[b].size() > 1) {
            double acc = 0;
            for (double v : contents[b]) acc += (v - row.mean_y) * (v - row.mean_y);
            const double sample_sd = std::sqrt(acc / static_cast<double>(contents[b].size() - 1));
            row.stderr_y = sample_sd / std::sqrt(static_cast<double>(contents[b].size()));
        }
        rows.push_back(row);
    }
    return rows;
}

FitResult fit_substitutes_model(const std::vector<AttentionVector>& vectors) {
    if (vectors.size() < 50)
        throw ValidationError("fit_substitutes_model: need at least 50 vectors");
    std::vector<std::array<double, 5>> x;
    std::vector<double> y;
    x.reserve(vectors.size());
    y.reserve(vectors.size());
    for (const auto& v : vectors) {
        x.push_back(regressor_row(v));
        y.push_back(floored_log(v.final_views));
    }
    const Ols ols = ols_with_intercept(x, y, kMetricNames);

    FitResult fit;
    fit.n = vectors.size();
    for (std::size_t j = 0; j < 5; ++j) {
        fit.exponents[j] = ols.beta[j];
        fit.stderrs[j] = ols.stderrs[j];
        fit.p_values[j] =
            ols.stderrs[j] > 0 ? two_sided_normal_p(ols.beta[j] / ols.stderrs[j]) : 0.0;
    }
    fit.intercept = ols.beta[5];
    fit.intercept_stderr = ols.stderrs[5];
    fit.r_squared = ols.r_squared;
    return fit;
}

double FitResult::predict_views(const AttentionVector& v) const {
    const auto row = regressor_row(v);
    double log_views = intercept;
    for (std::size_t j = 0; j < 5; ++j) log_views += exponents[j] * row[j];
    return std::exp(log_views);
}

std::vector<ClassifiedVideo> classify_popular(const FitResult& fit,
                                              const std::vector<AttentionVector>& vectors,
                                              double threshold) {
    std::vector<ClassifiedVideo> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        ClassifiedVideo c;
        c.video_id = v.video_id;
        c.actual_popular = v.final_views >= threshold;         // "at least 10,000 views"
        c.predicted_popular = fit.predict_views(v) > threshold;  // "a value above 10,000"
        out.push_back(std::move(c));
    }
    return out;
}

CvResult cross_validate(const std::vector<AttentionVector>& vectors, int k, std::uint64_t seed,
                        double threshold) {
    if (k < 2)
        throw ValidationError("cross_validate: k must be at least 2");
    if (vectors.size() < static_cast<std::size_t>(k))
        throw ValidationError("cross_validate: fewer vectors than folds");

    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::shuffle(order.begin(), order.end(), rng);

    CvResult cv;
    cv.folds = k;
    double precision_sum = 0, recall_sum = 0, base_sum = 0, rand_prec_sum = 0, rand_rec_sum = 0;
    int precision_folds = 0, recall_folds = 0;

    for (int fold = 0; fold < k; ++fold) {
        std::vector<AttentionVector> train, test;
        for (std::size_t i = 0; i < order.size(); ++i)
            (static_cast<int>(i % static_cast<std::size_t>(k)) == fold ? test : train)
                .push_back(vectors[order[i]]);

        const FitResult fit = fit_substitutes_model(train);
        const auto classified = classify_popular(fit, test, threshold);

        std::int64_t tp = 0, fp = 0, fn = 0, pos = 0, pred_pos = 0;
        for (const auto& c : classified) {
            pos += c.actual_popular;
            pred_pos += c.predicted_popular;
            tp += c.actual_popular && c.predicted_popular;
            fp += !c.actual_popular && c.predicted_popular;
            fn += c.actual_popular && !c.predicted_popular;
        }
        const double fold_n = static_cast<double>(classified.size());
        const double fold_base = static_cast<double>(pos) / fold_n;
        base_sum += fold_base;

        if (pred_pos > 0) {
            precision_sum += static_cast<double>(tp) / static_cast<double>(tp + fp);
            // A classifier that assigns the same pred_pos labels at random has
            // expected precision equal to the fold's base rate.
            rand_prec_sum += fold_base;
            ++precision_folds;
        } else {
            ++cv.precision_excluded_folds;
        }
        if (pos > 0) {
            recall_sum += static_cast<double>(tp) / static_cast<double>(tp + fn);
            rand_rec_sum += static_cast<double>(pred_pos) / fold_n;
            ++recall_folds;
        } else {
            ++cv.recall_excluded_folds;
        }
    }

    cv.base_rate = base_sum / static_cast<double>(k);
    if (precision_folds > 0) {
        cv.mean_precision = precision_sum / precision_folds;
        cv.random_precision = rand_prec_sum / precision_folds;
    }
    if (recall_folds > 0) {
        cv.mean_recall = recall_sum / recall_folds;
        cv.random_recall = rand_rec_sum / recall_folds;
    }
    return cv;
}

void write_attention_tsv(const std::vector<AttentionVector>& vectors, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << "video_id\tshares\texposure\timpact\tsecond_order_exposure\tshare_of_voice\tfinal_views\n";
    for (const auto& v : vectors)
        out << v.video_id << '\t' << format_double(v.shares) << '\t' << format_double(v.exposure)
            << '\t' << format_double(v.impact) << '\t' << format_double(v.second_order_exposure)
            << '\t' << format_double(v.share_of_voice) << '\t' << format_double(v.final_views) << '\n';
}

void write_fit_json(const FitResult& fit, const std::string& path) {
    ordered_json j;
    for (std::size_t i = 0; i < 5; ++i) {
        ordered_json coef;
        coef["exponent"] = fit.exponents[i];
        coef["stderr"] = fit.stderrs[i];
        coef["p_value"] = fit.p_values[i];
        j["coefficients"][kMetricNames[i]] = coef;
    }
    j["intercept"] = fit.intercept;
    j["intercept_stderr"] = fit.intercept_stderr;
    j["r_squared"] = fit.r_squared;
    j["n"] = fit.n;
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_cv_json(const CvResult& cv, const std::string& path) {
    ordered_json j;
    j["folds"] = cv.folds;
    j["mean_precision"] = cv.mean_precision;
    j["mean_recall"] = cv.mean_recall;
    j["base_rate"] = cv.base_rate;
    j["random_precision"] = cv.random_precision;
    j["random_recall"] = cv.random_recall;
    j["precision_excluded_folds"] = cv.precision_excluded_folds;
    j["recall_excluded_folds"] = cv.recall_excluded_folds;
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tubewire::popularity
