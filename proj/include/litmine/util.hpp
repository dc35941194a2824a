#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace litmine {

// 64-bit FNV-1a; used wherever a stable content hash is needed.
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Calendar date with optional month/day precision. month/day are 0 when the
// source string carried only "YYYY" or "YYYY-MM".
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    static std::optional<Date> parse(std::string_view s);
    static Date today();

    bool valid() const { return year > 0; }
    std::string to_string() const;
    std::string year_month() const;

    auto operator<=>(const Date&) const = default;
};

// Deterministic RNG. mt19937_64 has a standardized sequence and we avoid
// std::uniform_*_distribution, so a fixed seed reproduces bit-identically
// across platforms and standard libraries.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
    std::size_t below(std::size_t n) {
        std::size_t v = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

  private:
    std::mt19937_64 eng_;
};

std::string read_file(const std::filesystem::path& p);
std::vector<std::string> read_lines(const std::filesystem::path& p);

// Write-temp-then-rename so readers never see a truncated file.
void atomic_write(const std::filesystem::path& p, std::string_view content);

// Tabs and newlines mapped to spaces; keeps TSV rows one-line.
std::string sanitize_cell(std::string_view s);

}  // namespace litmine
