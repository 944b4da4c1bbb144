#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "tubewire/cluster.hpp"

using namespace tubewire;
using namespace tubewire::cluster;
using namespace testutil;

namespace {

CategoryDistribution dist(const std::string& id,
                          std::initializer_list<std::pair<Category, double>> weights) {
    CategoryDistribution d;
    d.user_id = id;
    double sum = 0;
    for (const auto& [c, w] : weights) {
        d.weights[static_cast<std::size_t>(c)] = w;
        sum += w;
    }
    for (auto& w : d.weights) w /= sum;
    return d;
}

// two well-separated planted mixtures with per-user noise
struct PlantedPartition {
    std::vector<CategoryDistribution> distributions;
    std::vector<std::string> bios;
    std::map<std::string, int> truth;

    explicit PlantedPartition(int per_group, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> jitter(0.0, 0.08);
        for (int g = 0; g < 2; ++g) {
            for (int u = 0; u < per_group; ++u) {
                const std::string id = "u" + std::to_string(g) + "_" + std::to_string(u);
                CategoryDistribution d;
                d.user_id = id;
                const auto dominant = g == 0 ? Category::music : Category::sports;
                const auto secondary = g == 0 ? Category::entertainment : Category::autos_vehicles;
                d.weights[static_cast<std::size_t>(dominant)] = 0.7 + jitter(rng);
                d.weights[static_cast<std::size_t>(secondary)] = 0.2 + jitter(rng);
                d.weights[static_cast<std::size_t>(Category::comedy)] = 0.1 + jitter(rng);
                double sum = 0;
                for (double w : d.weights) sum += w;
                for (auto& w : d.weights) w /= sum;
                distributions.push_back(std::move(d));
                bios.push_back(g == 0 ? "music fan and artist" : "sports fan and runner");
                truth[id] = g;
            }
        }
    }
};

}  // namespace

TEST_CASE("planted two-group mixtures are recovered perfectly") {
    PlantedPartition planted(15, 3);
    ClusterOptions options;
    options.k = 2;
    auto report = cluster_users(planted.distributions, planted.bios, {}, options);

    REQUIRE(report.clusters.size() == 2);
    CHECK_FALSE(report.degenerate_similarity);
    // adjusted agreement of 1: every planted group maps to exactly one cluster
    std::map<int, std::set<int>> seen;
    for (const auto& [uid, cl] : report.assignments) seen[planted.truth.at(uid)].insert(cl);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].size() == 1);
    CHECK(seen[1].size() == 1);
    CHECK(*seen[0].begin() != *seen[1].begin());
}

TEST_CASE("discriminative categories surface the dominant planted category") {
    PlantedPartition planted(12, 5);
    ClusterOptions options;
    options.k = 2;
    auto report = cluster_users(planted.distributions, planted.bios, {}, options);
    for (const auto& c : report.clusters) {
        REQUIRE(c.discriminative_categories.size() == 5);
        const auto& top = c.discriminative_categories[0];
        CHECK((top == "Music" || top == "Sports"));
    }
}

TEST_CASE("identical users flag degenerate similarity; any partition is valid") {
    std::vector<CategoryDistribution> identical;
    std::vector<std::string> bios;
    for (int i = 0; i < 8; ++i) {
        identical.push_back(dist("u" + std::to_string(i), {{Category::music, 1.0}}));
        bios.push_back("music");
    }
    ClusterOptions options;
    options.k = 3;
    auto report = cluster_users(identical, bios, {}, options);
    CHECK(report.degenerate_similarity);
    CHECK(report.clusters.size() == 3);
    CHECK(report.assignments.size() == 8);
}

TEST_CASE("k equal to n yields singletons; k above n is an error") {
    PlantedPartition planted(3, 7);
    ClusterOptions options;
    options.k = 6;
    auto report = cluster_users(planted.distributions, planted.bios, {}, options);
    CHECK(report.clusters.size() == 6);
    for (const auto& c : report.clusters) CHECK(c.members.size() == 1);

    options.k = 7;
    CHECK_THROWS_AS(cluster_users(planted.distributions, planted.bios, {}, options), ValidationError);
}

TEST_CASE("clustering is independent of input order") {
    PlantedPartition planted(10, 11);
    ClusterOptions options;
    options.k = 2;
    auto report_fwd = cluster_users(planted.distributions, planted.bios, {}, options);

    auto shuffled = planted;
    std::mt19937_64 rng(13);
    std::vector<std::size_t> order(planted.distributions.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<CategoryDistribution> d2;
    std::vector<std::string> b2;
    for (std::size_t i : order) {
        d2.push_back(planted.distributions[i]);
        b2.push_back(planted.bios[i]);
    }
    auto report_shuf = cluster_users(d2, b2, {}, options);
    CHECK(report_fwd.assignments == report_shuf.assignments);
}

TEST_CASE("significant feature deltas: planted mean shift is found and ranked") {
    PlantedPartition planted(20, 17);
    std::mt19937_64 rng(19);
    std::normal_distribution<double> noise(0.0, 0.5);
    FeatureMatrix features;
    std::vector<double> shifted, flat;
    for (const auto& d : planted.distributions) {
        const bool group0 = d.user_id[1] == '0';
        shifted.push_back((group0 ? 10.0 : 0.0) + noise(rng));
        flat.push_back(noise(rng));
    }
    features["shifted"] = shifted;
    features["flat"] = flat;

    ClusterOptions options;
    options.k = 2;
    options.permutations = 500;
    auto report = cluster_users(planted.distributions, planted.bios, features, options);
    for (const auto& c : report.clusters) {
        REQUIRE(!c.significant_deltas.empty());
        CHECK(c.significant_deltas[0].feature == "shifted");
        for (const auto& delta : c.significant_deltas) CHECK(delta.feature != "flat");
    }
}

TEST_CASE("constant feature columns collapse out of the delta ranking") {
    PlantedPartition planted(8, 23);
    FeatureMatrix features;
    features["constant"] = std::vector<double>(planted.distributions.size(), 4.2);
    ClusterOptions options;
    options.k = 2;
    auto report = cluster_users(planted.distributions, planted.bios, features, options);
    for (const auto& c : report.clusters)
        for (const auto& delta : c.significant_deltas) CHECK(delta.feature != "constant");
}

TEST_CASE("top bio terms: frequency ranking, stopwords, padding, determinism") {
    std::set<std::string> stop = {"and", "the"};
    auto terms = top_bio_terms({"music fan", "music lover"}, stop);
    CHECK(terms[0] == "music");

    auto padded = top_bio_terms({"and the", "the and"}, stop);
    REQUIRE(padded.size() == 5);
    for (const auto& t : padded) CHECK(t == "-");

    auto fwd = top_bio_terms({"alpha beta", "beta gamma", "gamma beta"}, stop);
    auto rev = top_bio_terms({"gamma beta", "beta gamma", "alpha beta"}, stop);
    CHECK(fwd == rev);
    CHECK(fwd[0] == "beta");  // document frequency 3

    CHECK_THROWS_AS(top_bio_terms({}, stop), ValidationError);
}

TEST_CASE("interest alignment: identical matrices, row sums, exclusions") {
    std::vector<std::string> ids = {"u1", "u2", "u3"};
    std::vector<profiles::InterestVector> t(3);
    std::mt19937_64 rng(29);
    for (auto& row : t)
        for (auto& v : row) v = static_cast<double>(rng() % 10);
    // zero out one category on both sides so it gets excluded
    for (auto& row : t) row[static_cast<std::size_t>(Category::trailers)] = 0;
    const std::vector<profiles::InterestVector> y(t);

    auto report = interest_alignment(ids, t, y);
    for (const auto& row : report.rows) {
        CHECK(row.mean_difference == doctest::Approx(0.0).scale(1).epsilon(1e-12));
        CHECK(row.median_difference == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    }
    bool trailers_excluded = false;
    for (Category c : report.excluded_categories)
        if (c == Category::trailers) trailers_excluded = true;
    CHECK(trailers_excluded);
}

TEST_CASE("alignment differences per user sum to zero across categories") {
    std::vector<std::string> ids;
    std::vector<profiles::InterestVector> t, y;
    std::mt19937_64 rng(31);
    for (int u = 0; u < 12; ++u) {
        ids.push_back("u" + std::to_string(u));
        profiles::InterestVector tv{}, yv{};
        for (std::size_t c = 0; c < tv.size(); ++c) {
            tv[c] = static_cast<double>(rng() % 8);
            yv[c] = static_cast<double>(rng() % 8);
        }
        t.push_back(tv);
        y.push_back(yv);
    }
    auto report = interest_alignment(ids, t, y);
    // mean over users of the per-category differences must net to ~0 because
    // each tilde row sums to 1 on both sides
    double total_mean = 0;
    for (const auto& row : report.rows)
        total_mean += row.mean_difference * static_cast<double>(row.user_count);
    CHECK(total_mean == doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("single-category user gets tilde weight 1 on both sides") {
    std::vector<std::string> ids = {"solo", "other"};
    std::vector<profiles::InterestVector> t(2), y(2);
    t[0][static_cast<std::size_t>(Category::music)] = 5;
    y[0][static_cast<std::size_t>(Category::music)] = 3;
    t[1][static_cast<std::size_t>(Category::music)] = 1;
    t[1][static_cast<std::size_t>(Category::sports)] = 1;
    y[1][static_cast<std::size_t>(Category::music)] = 1;
    y[1][static_cast<std::size_t>(Category::sports)] = 1;
    auto report = interest_alignment(ids, t, y);
    // solo's only category is music on both sides: difference 0 there
    for (const auto& row : report.rows)
        if (row.category == Category::music) CHECK(std::abs(row.mean_difference) < 0.5);
    CHECK(report.excluded_users == 0);
}
