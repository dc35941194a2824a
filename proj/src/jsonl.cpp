#include "litmine/jsonl.hpp"

#include "litmine/util.hpp"

namespace litmine {

JsonlFile read_jsonl(const std::filesystem::path& p) {
    JsonlFile out;
    auto lines = read_lines(p);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            out.errors.emplace_back(i + 1, "malformed JSON");
            continue;
        }
        out.records.emplace_back(i + 1, std::move(j));
    }
    return out;
}

void write_jsonl(const std::filesystem::path& p, const std::vector<nlohmann::json>& records) {
    std::string buf;
    for (const auto& r : records) {
        buf += r.dump();
        buf += '\n';
    }
    atomic_write(p, buf);
}

}  // namespace litmine
