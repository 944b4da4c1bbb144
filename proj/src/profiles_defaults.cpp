#include "tubewire/profiles.hpp"

// Bundled lookup-table defaults. These are replaceable snapshots: every
// loader has a file-based override, and the synthetic generator writes its
// own sidecar tables. The category map is the fixed 19+1 mapping; the rest
// are small, useful-out-of-the-box defaults.

namespace tubewire::profiles {

namespace {

struct NameEntry {
    const char* name;
    Gender gender;
};

constexpr NameEntry kNames[] = {
    {"james", Gender::male},     {"john", Gender::male},      {"robert", Gender::male},
    {"michael", Gender::male},   {"william", Gender::male},   {"david", Gender::male},
    {"richard", Gender::male},   {"joseph", Gender::male},    {"thomas", Gender::male},
    {"charles", Gender::male},   {"christopher", Gender::male}, {"daniel", Gender::male},
    {"matthew", Gender::male},   {"anthony", Gender::male},   {"donald", Gender::male},
    {"mark", Gender::male},      {"paul", Gender::male},      {"steven", Gender::male},
    {"andrew", Gender::male},    {"kenneth", Gender::male},   {"joshua", Gender::male},
    {"kevin", Gender::male},     {"brian", Gender::male},     {"george", Gender::male},
    {"edward", Gender::male},    {"ronald", Gender::male},    {"timothy", Gender::male},
    {"jason", Gender::male},     {"jeffrey", Gender::male},   {"ryan", Gender::male},
    {"jacob", Gender::male},     {"gary", Gender::male},      {"nicholas", Gender::male},
    {"eric", Gender::male},      {"jonathan", Gender::male},  {"stephen", Gender::male},
    {"larry", Gender::male},     {"justin", Gender::male},    {"scott", Gender::male},
    {"brandon", Gender::male},   {"benjamin", Gender::male},  {"samuel", Gender::male},
    {"frank", Gender::male},     {"gregory", Gender::male},   {"raymond", Gender::male},
    {"alexander", Gender::male}, {"patrick", Gender::male},   {"jack", Gender::male},
    {"dennis", Gender::male},    {"jerry", Gender::male},
    {"mary", Gender::female},    {"patricia", Gender::female}, {"jennifer", Gender::female},
    {"linda", Gender::female},   {"elizabeth", Gender::female}, {"barbara", Gender::female},
    {"susan", Gender::female},   {"jessica", Gender::female}, {"sarah", Gender::female},
    {"karen", Gender::female},   {"nancy", Gender::female},   {"lisa", Gender::female},
    {"margaret", Gender::female}, {"betty", Gender::female},  {"sandra", Gender::female},
    {"ashley", Gender::female},  {"dorothy", Gender::female}, {"kimberly", Gender::female},
    {"emily", Gender::female},   {"donna", Gender::female},   {"michelle", Gender::female},
    {"carol", Gender::female},   {"amanda", Gender::female},  {"melissa", Gender::female},
    {"deborah", Gender::female}, {"stephanie", Gender::female}, {"rebecca", Gender::female},
    {"laura", Gender::female},   {"sharon", Gender::female},  {"cynthia", Gender::female},
    {"kathleen", Gender::female}, {"amy", Gender::female},    {"shirley", Gender::female},
    {"angela", Gender::female},  {"helen", Gender::female},   {"anna", Gender::female},
    {"brenda", Gender::female},  {"pamela", Gender::female},  {"nicole", Gender::female},
    {"emma", Gender::female},    {"samantha", Gender::female}, {"katherine", Gender::female},
    {"christine", Gender::female}, {"debra", Gender::female}, {"rachel", Gender::female},
    {"catherine", Gender::female}, {"carolyn", Gender::female}, {"janet", Gender::female},
    {"ruth", Gender::female},    {"maria", Gender::female},
};

// The 100 biggest US cities (population ranking as of the early 2010s).
constexpr const char* kTopCities[] = {
    "new york", "los angeles", "chicago", "houston", "philadelphia", "phoenix", "san antonio",
    "san diego", "dallas", "san jose", "jacksonville", "indianapolis", "austin", "san francisco",
    "columbus", "fort worth", "charlotte", "detroit", "el paso", "memphis", "boston", "seattle",
    "denver", "baltimore", "washington", "nashville", "louisville", "milwaukee", "portland",
    "oklahoma city", "las vegas", "albuquerque", "tucson", "fresno", "sacramento", "long beach",
    "kansas city", "mesa", "virginia beach", "atlanta", "colorado springs", "raleigh", "omaha",
    "miami", "oakland", "tulsa", "minneapolis", "cleveland", "wichita", "arlington", "new orleans",
    "bakersfield", "tampa", "honolulu", "anaheim", "aurora", "santa ana", "st. louis", "riverside",
    "corpus christi", "pittsburgh", "lexington", "anchorage", "stockton", "cincinnati", "st. paul",
    "toledo", "newark", "greensboro", "plano", "henderson", "lincoln", "buffalo", "fort wayne",
    "jersey city", "chula vista", "orlando", "st. petersburg", "norfolk", "chandler", "laredo",
    "madison", "durham", "lubbock", "winston-salem", "garland", "glendale", "hialeah", "reno",
    "baton rouge", "irvine", "chesapeake", "irving", "scottsdale", "north las vegas", "fremont",
    "gilbert", "san bernardino", "boise", "birmingham",
};

// A handful of smaller US cities so the bundled gazetteer can resolve
// rural locations, plus common non-US entries and country-level strings.
constexpr const char* kSmallUsCities[] = {
    "peoria",    "boulder",  "savannah", "topeka",     "flagstaff", "missoula",
    "amarillo",  "chattanooga", "eugene", "fargo",     "santa fe",  "asheville",
    "lancaster", "green bay", "spokane", "huntsville", "knoxville", "salem",
};

struct ForeignCity {
    const char* city;
    const char* country;
};

constexpr ForeignCity kForeignCities[] = {
    {"london", "GB"},  {"manchester", "GB"}, {"toronto", "CA"}, {"vancouver", "CA"},
    {"sydney", "AU"},  {"melbourne", "AU"},  {"jakarta", "ID"}, {"bangkok", "TH"},
    {"sao paulo", "BR"}, {"rio de janeiro", "BR"}, {"paris", "FR"}, {"berlin", "DE"},
    {"madrid", "ES"},  {"mexico city", "MX"}, {"mumbai", "IN"}, {"delhi", "IN"},
    {"manila", "PH"},  {"singapore", "SG"},  {"dublin", "IE"}, {"amsterdam", "NL"},
};

struct TagRow {
    const char* tag;
    Category category;
};

// YouTube category -> interest tag mapping; Trailers has no tags and
// Finance is the extra non-YouTube category.
constexpr TagRow kTags[] = {
    {"sports", Category::sports},        {"baseball", Category::sports},
    {"basketball", Category::sports},    {"soccer", Category::sports},
    {"football", Category::sports},      {"cricket", Category::sports},
    {"nfl", Category::sports},
    {"movies", Category::movies},
    {"economics", Category::news_politics}, {"politics", Category::news_politics},
    {"news", Category::news_politics},
    {"banking", Category::finance},      {"investing", Category::finance},
    {"finance", Category::finance},      {"entrepreneur", Category::finance},
    {"business", Category::finance},
    {"comedy", Category::comedy},        {"comedian", Category::comedy},
    {"tech", Category::science_technology}, {"technology", Category::science_technology},
    {"gadgets", Category::science_technology}, {"science", Category::science_technology},
    {"socialmedia", Category::science_technology},
    {"nonprofits", Category::nonprofits_activism}, {"nonprofit", Category::nonprofits_activism},
    {"charity", Category::nonprofits_activism}, {"philanthropy", Category::nonprofits_activism},
    {"film", Category::film_animation},  {"animation", Category::film_animation},
    {"cartoons", Category::film_animation},
    {"scifi", Category::scifi_fantasy},  {"sciencefiction", Category::scifi_fantasy},
    {"fantasy", Category::scifi_fantasy},
    {"games", Category::gaming},         {"gaming", Category::gaming},
    {"blogger", Category::people_blogs}, {"blogs", Category::people_blogs},
    {"people", Category::people_blogs},  {"celebrity", Category::people_blogs},
    {"travel", Category::travel_events}, {"places", Category::travel_events},
    {"automotive", Category::autos_vehicles}, {"autos", Category::autos_vehicles},
    {"cars", Category::autos_vehicles},  {"vehicles", Category::autos_vehicles},
    {"music", Category::music},          {"dance", Category::music},
    {"dancer", Category::music},
    {"entertainment", Category::entertainment},
    {"academic", Category::education},   {"university", Category::education},
    {"education", Category::education},
    {"howto", Category::howto_style},    {"diy", Category::howto_style},
    {"doityourself", Category::howto_style},
    {"animals", Category::pets_animals}, {"cats", Category::pets_animals},
    {"dogs", Category::pets_animals},    {"pets", Category::pets_animals},
    {"tv", Category::shows},             {"tvshows", Category::shows},
    {"media", Category::shows},
};

// 13 left / 19 right seed accounts (early-2010s US political Twitter).
constexpr const char* kLeftSeeds[] = {
    "barackobama", "joebiden",   "billclinton",   "hillaryclinton", "algore",
    "nancypelosi", "harryreid",  "johnkerry",     "elizabethwarren", "corybooker",
    "davidaxelrod", "donnabrazile", "repjohnlewis",
};

constexpr const char* kRightSeeds[] = {
    "mittromney",   "newtgingrich",    "sarahpalinusa", "karlrove",      "speakerboehner",
    "ericcantor",   "marcorubio",      "senrandpaul",   "sentedcruz",    "govchristie",
    "jebbush",      "bobbyjindal",     "govmikehuckabee", "michelebachmann", "ricksantorum",
    "scottwalker",  "paulryanvp",      "ronpaul",       "senjohnmccain",
};

}  // namespace

const NameDictionary& NameDictionary::bundled() {
    static const NameDictionary dict = [] {
        NameDictionary d;
        for (const auto& e : kNames) d.add(e.name, e.gender);
        return d;
    }();
    return dict;
}

const TopCities& TopCities::bundled() {
    static const TopCities cities = [] {
        TopCities c;
        for (const char* city : kTopCities) c.add(city);
        return c;
    }();
    return cities;
}

const Gazetteer& Gazetteer::bundled() {
    static const Gazetteer gazetteer = [] {
        Gazetteer g;
        for (const char* city : kTopCities) g.add(city, {"US", city});
        for (const char* city : kSmallUsCities) g.add(city, {"US", city});
        for (const auto& f : kForeignCities) g.add(f.city, {f.country, f.city});
        g.add("usa", {"US", ""});
        g.add("united states", {"US", ""});
        g.add("america", {"US", ""});
        return g;
    }();
    return gazetteer;
}

const CategoryMapping& CategoryMapping::bundled() {
    static const CategoryMapping map = [] {
        CategoryMapping m;
        for (const auto& row : kTags) m.add(row.tag, row.category);
        return m;
    }();
    return map;
}

const PoliticalSeeds& PoliticalSeeds::bundled() {
    static const PoliticalSeeds seeds = [] {
        PoliticalSeeds s;
        for (const char* h : kLeftSeeds) s.left_handles.insert(h);
        for (const char* h : kRightSeeds) s.right_handles.insert(h);
        s.validate();
        return s;
    }();
    return seeds;
}

}  // namespace tubewire::profiles
