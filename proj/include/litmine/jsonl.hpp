#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace litmine {

struct JsonlFile {
    // (1-based line number, parsed object)
    std::vector<std::pair<std::size_t, nlohmann::json>> records;
    // (1-based line number, parse error)
    std::vector<std::pair<std::size_t, std::string>> errors;
};

// Blank lines are skipped; malformed lines land in `errors` and reading
// continues.
JsonlFile read_jsonl(const std::filesystem::path& p);

void write_jsonl(const std::filesystem::path& p, const std::vector<nlohmann::json>& records);

}  // namespace litmine
