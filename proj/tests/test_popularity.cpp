#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "tubewire/popularity.hpp"

using namespace tubewire;
using namespace tubewire::popularity;
using namespace testutil;

namespace {

const Timestamp kBase = parse_timestamp("2013-01-10");

// the hand-computed example: one sharer, 2 tweets, f=3, R0=4, followers with
// f=(2,3) and friend counts (4,6)
struct HandExample {
    std::map<std::string, UserRecord> users;
    VideoRecord video;
    std::vector<SharingEvent> events;

    HandExample() {
        auto sharer = make_user("u1", "sharer");
        sharer.followers_count = 3;
        sharer.mean_nonzero_retweet_count = 4;
        sharer.follower_ids = {"f1", "f2"};
        auto f1 = make_user("f1", "fol1");
        f1.followers_count = 2;
        f1.friends_count = 4;
        auto f2 = make_user("f2", "fol2");
        f2.followers_count = 3;
        f2.friends_count = 6;
        users = {{"u1", sharer}, {"f1", f1}, {"f2", f2}};
        video = make_video("v1", "chan", kBase);
        events = {make_event("t1", "u1", "v1", kBase + 100),
                  make_event("t2", "u1", "v1", kBase + 200)};
    }
};

std::vector<AttentionVector> planted_vectors(std::size_t n, const std::array<double, 5>& exponents,
                                             double sigma, std::uint64_t seed, double scale = 40.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logS(std::log(2.0), std::log(200.0));
    std::uniform_real_distribution<double> logI(std::log(1.5), std::log(500.0));
    std::uniform_real_distribution<double> logE(std::log(10.0), std::log(50000.0));
    std::uniform_real_distribution<double> logE2(std::log(10.0), std::log(1e6));
    std::uniform_real_distribution<double> logA(std::log(1.2), std::log(300.0));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<AttentionVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        AttentionVector v;
        v.video_id = "v" + std::to_string(i);
        v.shares = std::exp(logS(rng));
        v.impact = std::exp(logI(rng));
        v.exposure = std::exp(logE(rng));
        v.second_order_exposure = std::exp(logE2(rng));
        v.share_of_voice = std::exp(logA(rng));
        const double log_views = std::log(scale) + exponents[0] * std::log(v.shares) +
                                 exponents[1] * std::log(v.impact) + exponents[2] * std::log(v.exposure) +
                                 exponents[3] * std::log(v.second_order_exposure) +
                                 exponents[4] * std::log(v.share_of_voice) + sigma * noise(rng);
        v.final_views = std::exp(log_views);
        out.push_back(std::move(v));
    }
    return out;
}

constexpr std::array<double, 5> kPaperExponents = {1.083, 0.449, 0.096, 0.118, -0.102};

}  // namespace

TEST_CASE("attention vector matches the hand computation") {
    HandExample ex;
    auto v = attention_vector(ex.video, ex.events, ex.users);
    CHECK(v.shares == doctest::Approx(2.0));
    CHECK(v.exposure == doctest::Approx(3.0));
    CHECK(v.impact == doctest::Approx(4.0));
    CHECK(v.second_order_exposure == doctest::Approx(5.0));
    CHECK(v.share_of_voice == doctest::Approx(0.6));
}

TEST_CASE("attention vector: empty follower neighborhoods contribute zero") {
    auto a = make_user("a", "a");
    a.followers_count = 7;
    a.mean_nonzero_retweet_count = 1.5;
    auto b = make_user("b", "b");
    b.followers_count = 9;
    b.mean_nonzero_retweet_count = 2.5;
    std::map<std::string, UserRecord> users = {{"a", a}, {"b", b}};
    auto video = make_video("v1", "c", kBase);
    std::vector<SharingEvent> events = {make_event("t1", "a", "v1", kBase + 1),
                                        make_event("t2", "b", "v1", kBase + 2)};
    auto v = attention_vector(video, events, users);
    CHECK(v.shares == 2.0);
    CHECK(v.exposure == 16.0);
    CHECK(v.impact == doctest::Approx(4.0));
    CHECK(v.second_order_exposure == 0.0);
    CHECK(v.share_of_voice == 0.0);
}

TEST_CASE("attention vector is invariant to event order and errors on unknown sharers") {
    HandExample ex;
    auto forward = attention_vector(ex.video, ex.events, ex.users);
    std::reverse(ex.events.begin(), ex.events.end());
    auto reversed = attention_vector(ex.video, ex.events, ex.users);
    CHECK(forward.shares == reversed.shares);
    CHECK(forward.exposure == reversed.exposure);
    CHECK(forward.share_of_voice == reversed.share_of_voice);

    ex.events.push_back(make_event("t3", "ghost", "v1", kBase + 300));
    CHECK_THROWS_WITH_AS(attention_vector(ex.video, ex.events, ex.users), doctest::Contains("ghost"),
                         ValidationError);
}

TEST_CASE("metrics are monotone when a sharer is added") {
    HandExample ex;
    auto before = attention_vector(ex.video, ex.events, ex.users);
    auto extra = make_user("u2", "another");
    extra.followers_count = 10;
    extra.mean_nonzero_retweet_count = 2;
    ex.users["u2"] = extra;
    ex.events.push_back(make_event("t3", "u2", "v1", kBase + 400));
    auto after = attention_vector(ex.video, ex.events, ex.users);
    CHECK(after.shares > before.shares);
    CHECK(after.exposure > before.exposure);
    CHECK(after.impact > before.impact);
    CHECK(after.second_order_exposure >= before.second_order_exposure);
}

TEST_CASE("power law: exact quadratic, flat line, scale invariance") {
    std::vector<double> x, y2, yflat;
    for (int i = 1; i <= 30; ++i) {
        x.push_back(i);
        y2.push_back(double(i) * i);
        yflat.push_back(7.5);
    }
    auto quad = power_law_fit(x, y2);
    CHECK(quad.exponent == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quad.stderr_exponent == doctest::Approx(0.0).scale(1).epsilon(1e-10));

    auto flat = power_law_fit(x, yflat);
    CHECK(flat.exponent == doctest::Approx(0.0).scale(1).epsilon(1e-12));

    // multiplicative rescaling moves the intercept, not the slope
    std::vector<double> xs(x), ys(y2);
    for (auto& v : xs) v *= 12.5;
    for (auto& v : ys) v *= 0.003;
    auto scaled = power_law_fit(xs, ys);
    CHECK(scaled.exponent == doctest::Approx(quad.exponent).epsilon(1e-10));

    std::vector<double> bad = {1, 2, 0, 4, 5, 6, 7, 8, 9, 10};
    CHECK_THROWS_AS(power_law_fit(bad, bad), ValidationError);
    std::vector<double> tiny = {1, 2, 3};
    CHECK_THROWS_AS(power_law_fit(tiny, tiny), ValidationError);
}

TEST_CASE("power law recovers the planted 2.18 exponent at n=10000") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> logS(std::log(1.0), std::log(1000.0));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> s(10000), v(10000);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::exp(logS(rng));
        v[i] = 100.0 * std::pow(s[i], 2.18) * std::exp(noise(rng));
    }
    auto fit = power_law_fit(s, v);
    CHECK(std::abs(fit.exponent - 2.18) < 0.1);
    CHECK(fit.stderr_exponent < 0.01);
}

TEST_CASE("binned means: constants, totals, grouping oracle") {
    std::mt19937_64 rng(29);
    std::vector<double> x, y;
    for (int i = 0; i < 500; ++i) {
        x.push_back(std::exp(std::uniform_real_distribution<double>(0.0, 6.0)(rng)));
        y.push_back(std::normal_distribution<double>(5.0, 2.0)(rng));
    }
    const auto edges = log_bin_edges(*std::min_element(x.begin(), x.end()),
                                     *std::max_element(x.begin(), x.end()));
    auto rows = binned_means(x, y, edges);

    // totals: count-weighted bin means reproduce the overall mean
    double weighted = 0;
    std::int64_t count = 0;
    for (const auto& r : rows) {
        weighted += r.mean_y * static_cast<double>(r.count);
        count += r.count;
    }
    CHECK(count == 500);
    CHECK(weighted / 500.0 == doctest::Approx(mean(y)).epsilon(1e-12));

    // direct grouping oracle
    for (const auto& r : rows) {
        std::vector<double> members;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] > r.bin_low && x[i] <= r.bin_high) members.push_back(y[i]);
        REQUIRE(static_cast<std::int64_t>(members.size()) == r.count);
        CHECK(r.mean_y == doctest::Approx(mean(members)).epsilon(1e-12));
    }

    // constant y: zero stderr everywhere, including singletons
    std::vector<double> flat(x.size(), 3.25);
    for (const auto& r : binned_means(x, flat, edges)) {
        CHECK(r.mean_y == doctest::Approx(3.25));
        CHECK(r.stderr_y == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    }
}

TEST_CASE("substitutes model: exact recovery on noiseless planted data") {
    auto vectors = planted_vectors(2000, kPaperExponents, 0.0, 31);
    auto fit = fit_substitutes_model(vectors);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(fit.exponents[i] == doctest::Approx(kPaperExponents[i]).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("substitutes model: noisy recovery within three standard errors") {
    auto vectors = planted_vectors(10000, kPaperExponents, 1.0, 37);
    auto fit = fit_substitutes_model(vectors);
    for (std::size_t i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(std::abs(fit.exponents[i] - kPaperExponents[i]) < 3.0 * fit.stderrs[i]);
    }
    CHECK(fit.r_squared > 0.5);
}

TEST_CASE("substitutes model: residuals orthogonal to each log regressor") {
    auto vectors = planted_vectors(500, kPaperExponents, 1.0, 41);
    auto fit = fit_substitutes_model(vectors);
    std::array<double, 5> dots{};
    for (const auto& v : vectors) {
        const std::array<double, 5> row = {
            std::log(std::max(v.shares, 1.0)), std::log(std::max(v.impact, 1.0)),
            std::log(std::max(v.exposure, 1.0)), std::log(std::max(v.second_order_exposure, 1.0)),
            std::log(std::max(v.share_of_voice, 1.0))};
        double fitted = fit.intercept;
        for (std::size_t j = 0; j < 5; ++j) fitted += fit.exponents[j] * row[j];
        const double resid = std::log(std::max(v.final_views, 1.0)) - fitted;
        for (std::size_t j = 0; j < 5; ++j) dots[j] += resid * row[j];
    }
    for (std::size_t j = 0; j < 5; ++j)
        CHECK(std::abs(dots[j]) / static_cast<double>(vectors.size()) < 1e-8);
}

TEST_CASE("substitutes model: collinear design names the bad column") {
    auto vectors = planted_vectors(200, kPaperExponents, 0.5, 43);
    for (auto& v : vectors) v.exposure = 2.0 * v.shares;  // log E = log 2 + log S
    CHECK_THROWS_WITH_AS(fit_substitutes_model(vectors), doctest::Contains("log(E)"), ValidationError);

    std::vector<AttentionVector> few(vectors.begin(), vectors.begin() + 10);
    CHECK_THROWS_AS(fit_substitutes_model(few), ValidationError);
}

TEST_CASE("dropping a regressor changes R^2 by the squared partial correlation") {
    auto vectors = planted_vectors(4000, kPaperExponents, 1.0, 47);
    const auto full = fit_substitutes_model(vectors);

    // oracle refit without the A column, plus residualizations of y and A on
    // the remaining four regressors
    std::vector<std::vector<double>> other(4);
    std::vector<double> log_a, log_v;
    for (const auto& v : vectors) {
        other[0].push_back(std::log(v.shares));
        other[1].push_back(std::log(v.impact));
        other[2].push_back(std::log(v.exposure));
        other[3].push_back(std::log(v.second_order_exposure));
        log_a.push_back(std::log(v.share_of_voice));
        log_v.push_back(std::log(v.final_views));
    }
    const auto reduced = ols_oracle(other, log_v);
    const auto a_on_other = ols_oracle(other, log_a);
    const double partial = pearson_brute(reduced.residuals, a_on_other.residuals);

    const double r2_gain = (full.r_squared - reduced.r_squared) / (1.0 - reduced.r_squared);
    CHECK(r2_gain == doctest::Approx(partial * partial).epsilon(1e-8));
}

TEST_CASE("classifier boundaries follow the stated wording") {
    auto vectors = planted_vectors(600, kPaperExponents, 0.0, 53);
    auto fit = fit_substitutes_model(vectors);

    AttentionVector boundary = vectors[0];
    boundary.final_views = 10000.0;
    auto c = classify_popular(fit, {boundary})[0];
    CHECK(c.actual_popular);  // "at least 10,000"

    boundary.final_views = 9999.0;
    CHECK_FALSE(classify_popular(fit, {boundary})[0].actual_popular);

    // prediction strictly above the threshold
    const auto preds = classify_popular(fit, vectors);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double estimate = fit.predict_views(vectors[i]);
        CHECK(preds[i].predicted_popular == (estimate > 10000.0));
    }
}

TEST_CASE("noiseless planted data classifies perfectly under cross validation") {
    auto vectors = planted_vectors(1500, kPaperExponents, 0.0, 59);
    auto cv = cross_validate(vectors, 10, 61);
    CHECK(cv.mean_precision == doctest::Approx(1.0));
    CHECK(cv.mean_recall == doctest::Approx(1.0));
    CHECK(cv.folds == 10);
    CHECK(cv.precision_excluded_folds == 0);
}

TEST_CASE("label shuffling drops precision to the base rate") {
    auto vectors = planted_vectors(4000, kPaperExponents, 1.0, 67, 60.0);
    // destroy the relationship by shuffling the outcomes
    std::vector<double> views;
    for (const auto& v : vectors) views.push_back(v.final_views);
    std::mt19937_64 rng(71);
    std::shuffle(views.begin(), views.end(), rng);
    for (std::size_t i = 0; i < vectors.size(); ++i) vectors[i].final_views = views[i];

    auto cv = cross_validate(vectors, 10, 73);
    CHECK(std::abs(cv.mean_precision - cv.base_rate) < 0.05);
    CHECK(std::abs(cv.random_precision - cv.base_rate) < 1e-9);
}

TEST_CASE("fold assignment is bit-reproducible given the seed") {
    auto vectors = planted_vectors(800, kPaperExponents, 0.7, 79);
    auto a = cross_validate(vectors, 10, 83);
    auto b = cross_validate(vectors, 10, 83);
    CHECK(a.mean_precision == b.mean_precision);
    CHECK(a.mean_recall == b.mean_recall);
    CHECK(a.base_rate == b.base_rate);
    auto c = cross_validate(vectors, 10, 84);
    // different seed reshuffles folds; results may differ but stay valid
    CHECK(c.folds == 10);
}

TEST_CASE("attention vectors from a store respect group and age filters") {
    auto sharer = make_user("u1", "sharer");
    sharer.followers_count = 5;
    auto other = make_user("u2", "other");
    auto young = make_video("v_young", "c", kBase);
    auto old = make_video("v_old", "c", kBase - 200 * kSecondsPerDay);
    std::vector<SharingEvent> events = {
        make_event("t1", "u1", "v_old", kBase - 200 * kSecondsPerDay + 100),
        make_event("t2", "u2", "v_old", kBase - 200 * kSecondsPerDay + 200),
        make_event("t3", "u1", "v_young", kBase + 100),
    };
    auto store = ingest::cleanse(store_from_records({sharer, other}, {young, old}, events), {});
    // as_of derived from the data: v_young is too fresh for final views
    auto vectors = popularity::attention_vectors(store, {"u1"});
    REQUIRE(vectors.size() == 1);
    CHECK(vectors[0].video_id == "v_old");
    CHECK(vectors[0].shares == 1.0);  // u2's event is outside the group
}
