#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tubewire {

// Input/config problems the caller can fix. The CLI maps these to exit
// code 1; anything else escaping a stage is exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

using Timestamp = std::int64_t;  // UTC epoch seconds
using Duration = std::int64_t;   // seconds

constexpr Duration kSecondsPerDay = 86400;
constexpr Duration kFirstWeekSeconds = 7 * kSecondsPerDay;  // closed window [0, 604800]

// ---- time ----------------------------------------------------------------

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS[Z]".
Timestamp parse_timestamp(std::string_view text);

std::string format_timestamp(Timestamp ts);  // "YYYY-MM-DDTHH:MM:SSZ"

// ---- strings ---------------------------------------------------------------

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Lowercase alphanumeric tokens; everything else is a separator. Used for
// bios (role scan, cluster terms).
std::vector<std::string> tokenize_words(std::string_view text);

// First whitespace-delimited token, lowercased. Used for name lookup.
std::string first_token_lower(std::string_view text);

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

// ---- small statistics -------------------------------------------------------

// Median with the even-length convention: mean of the central pair.
double median(std::vector<double> values);
double mean(const std::vector<double>& values);
// Population standard deviation (divide by n).
double stddev_population(const std::vector<double>& values);

// ---- parallelism ------------------------------------------------------------

// Resolves a worker count: explicit request wins, otherwise TUBEWIRE_THREADS,
// otherwise hardware concurrency (clamped to [1, 16]).
int effective_threads(int requested = 0);

// Runs fn(begin, end) over contiguous chunks of [0, n), possibly on worker
// threads. Chunk boundaries depend only on (n, threads), so writers that fill
// disjoint preallocated slots stay deterministic. Exceptions propagate.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// ---- seeding ----------------------------------------------------------------

// Mixes a base seed with a stream index (splitmix64 finalizer). Every
// randomized loop derives per-iteration generators through this, so results
// do not depend on execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tubewire
