#include "tubewire/types.hpp"

#include <map>

namespace tubewire {

namespace {

constexpr std::array<std::string_view, kInterestCategoryCount> kNames = {
    "Autos & Vehicles",
    "Comedy",
    "Education",
    "Entertainment",
    "Film & Animation",
    "Gaming",
    "Howto & Style",
    "Movies",
    "Music",
    "News & Politics",
    "Nonprofits & Activism",
    "People & Blogs",
    "Pets & Animals",
    "Science & Technology",
    "Sci-Fi/Fantasy",
    "Shows",
    "Sports",
    "Trailers",
    "Travel & Events",
    "Finance",
};

}  // namespace

std::string_view category_name(Category c) {
    return kNames[static_cast<std::size_t>(c)];
}

Category parse_category(std::string_view name) {
    static const std::map<std::string, Category> index = [] {
        std::map<std::string, Category> m;
        for (std::size_t i = 0; i < kNames.size(); ++i)
            m.emplace(to_lower(kNames[i]), static_cast<Category>(i));
        return m;
    }();
    auto it = index.find(to_lower(trim(name)));
    if (it == index.end())
        throw ValidationError("unknown category: '" + std::string(name) + "'");
    return it->second;
}

const std::array<Category, kVideoCategoryCount>& video_categories() {
    static const auto cats = [] {
        std::array<Category, kVideoCategoryCount> a{};
        for (int i = 0; i < kVideoCategoryCount; ++i) a[i] = static_cast<Category>(i);
        return a;
    }();
    return cats;
}

const std::array<Category, kInterestCategoryCount>& interest_categories() {
    static const auto cats = [] {
        std::array<Category, kInterestCategoryCount> a{};
        for (int i = 0; i < kInterestCategoryCount; ++i) a[i] = static_cast<Category>(i);
        return a;
    }();
    return cats;
}

}  // namespace tubewire
