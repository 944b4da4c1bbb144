#pragma once

// Shared fixtures and independent brute-force oracles. Oracles intentionally
// re-derive results from definitions so they do not share code paths with the
// library implementations they check.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tubewire/ingest.hpp"
#include "tubewire/types.hpp"

namespace testutil {

namespace fs = std::filesystem;

// ---- oracles ---------------------------------------------------------------

// All-substrings LCS oracle: longest substring of a contained in b, ties by
// earliest start in a.
inline std::string lcs_brute(const std::string& a, const std::string& b) {
    for (std::size_t len = a.size(); len > 0; --len)
        for (std::size_t start = 0; start + len <= a.size(); ++start) {
            const std::string cand = a.substr(start, len);
            if (b.find(cand) != std::string::npos) return cand;
        }
    return "";
}

// Definitional average rank: 1 + #{smaller} + #{equal, other}/2.
inline std::vector<double> ranks_brute(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double smaller = 0, equal = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < x[i]) ++smaller;
            if (j != i && x[j] == x[i]) ++equal;
        }
        r[i] = 1.0 + smaller + equal / 2.0;
    }
    return r;
}

inline double pearson_brute(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (double v : x) mx += v;
    for (double v : y) my += v;
    mx /= n;
    my /= n;
    double num = 0, dx2 = 0, dy2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        dx2 += (x[i] - mx) * (x[i] - mx);
        dy2 += (y[i] - my) * (y[i] - my);
    }
    return num / (std::sqrt(dx2) * std::sqrt(dy2));
}

inline double spearman_brute(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson_brute(ranks_brute(x), ranks_brute(y));
}

// Small dense OLS with intercept via normal equations and Gaussian
// elimination; test-side oracle, independent of the library fitter.
struct OlsOracle {
    std::vector<double> beta;  // slopes then intercept
    double r_squared = 0;
    std::vector<double> residuals;
};

inline OlsOracle ols_oracle(const std::vector<std::vector<double>>& columns,
                            const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t p = columns.size() + 1;  // + intercept
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    auto x = [&](std::size_t i, std::size_t j) { return j < columns.size() ? columns[j][i] : 1.0; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < p; ++k) a[j][k] += x(i, j) * x(i, k);
            a[j][p] += x(i, j) * y[i];
        }
    for (std::size_t col = 0; col < p; ++col) {  // partial pivoting
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= p; ++k) a[r][k] -= f * a[col][k];
        }
    }
    OlsOracle fit;
    fit.beta.resize(p);
    for (std::size_t j = 0; j < p; ++j) fit.beta[j] = a[j][p] / a[j][j];
    double my = 0;
    for (double v : y) my += v;
    my /= static_cast<double>(n);
    double rss = 0, tss = 0;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0;
        for (std::size_t j = 0; j < p; ++j) fitted += fit.beta[j] * x(i, j);
        fit.residuals[i] = y[i] - fitted;
        rss += fit.residuals[i] * fit.residuals[i];
        tss += (y[i] - my) * (y[i] - my);
    }
    fit.r_squared = 1.0 - rss / tss;
    return fit;
}

// Chi-square from expected counts, sum over the four cells.
inline double chi_square_brute(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2) {
    const double obs[2][2] = {{double(k1), double(n1 - k1)}, {double(k2), double(n2 - k2)}};
    const double total = double(n1 + n2);
    double stat = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double row = obs[i][0] + obs[i][1];
            const double col = obs[0][j] + obs[1][j];
            const double expected = row * col / total;
            stat += (obs[i][j] - expected) * (obs[i][j] - expected) / expected;
        }
    return stat;
}

// ---- record builders ---------------------------------------------------------

inline tubewire::UserRecord make_user(const std::string& id, const std::string& handle) {
    tubewire::UserRecord u;
    u.user_id = id;
    u.handle = handle;
    u.display_name = handle;
    u.followers_count = 10;
    u.friends_count = 10;
    u.account_created_at = tubewire::parse_timestamp("2010-06-01");
    u.tweet_count = 100;
    return u;
}

inline tubewire::VideoRecord make_video(const std::string& id, const std::string& channel,
                                        tubewire::Timestamp upload_ts,
                                        tubewire::Category cat = tubewire::Category::music) {
    tubewire::VideoRecord v;
    v.video_id = id;
    v.uploader_handle = channel;
    v.upload_ts = upload_ts;
    v.views = 1000;
    v.likes = 10;
    v.dislikes = 5;
    v.category = cat;
    return v;
}

inline tubewire::SharingEvent make_event(const std::string& tweet_id, const std::string& user_id,
                                         const std::string& video_id, tubewire::Timestamp tweet_ts) {
    tubewire::SharingEvent e;
    e.tweet_id = tweet_id;
    e.user_id = user_id;
    e.video_id = video_id;
    e.tweet_ts = tweet_ts;
    return e;
}

// ---- scratch dirs and stores ---------------------------------------------------

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("tubewire_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Serializes records and loads them through the real parse path.
inline tubewire::ingest::EventStore store_from_records(const std::vector<tubewire::UserRecord>& users,
                                                       const std::vector<tubewire::VideoRecord>& videos,
                                                       const std::vector<tubewire::SharingEvent>& events) {
    TempDir dir("store");
    {
        std::ofstream u(dir.path / "users.jsonl"), v(dir.path / "videos.jsonl"),
            e(dir.path / "events.jsonl");
        for (const auto& r : users) u << tubewire::ingest::user_to_json(r) << "\n";
        for (const auto& r : videos) v << tubewire::ingest::video_to_json(r) << "\n";
        for (const auto& r : events) e << tubewire::ingest::event_to_json(r) << "\n";
    }
    return tubewire::ingest::parse_streams((dir.path / "users.jsonl").string(),
                                           (dir.path / "videos.jsonl").string(),
                                           (dir.path / "events.jsonl").string());
}

inline std::string random_string(std::mt19937_64& rng, std::size_t max_len, int alphabet = 4) {
    std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
    std::uniform_int_distribution<int> ch(0, alphabet - 1);
    std::string s(len_dist(rng), 'a');
    for (auto& c : s) c = static_cast<char>('a' + ch(rng));
    return s;
}

}  // namespace testutil
