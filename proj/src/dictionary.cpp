#include "litmine/dictionary.hpp"

#include <algorithm>
#include <map>

#include "litmine/corpus.hpp"
#include "litmine/util.hpp"

namespace litmine::dict {

namespace {

int priority(TermSource s) {
    switch (s) {
        case TermSource::drugbank: return 0;
        case TermSource::fda: return 1;
        case TermSource::chembl: return 2;
        case TermSource::user: break;
    }
    return 3;
}

std::size_t token_count(std::string_view surface) {
    if (surface.empty()) return 0;
    return static_cast<std::size_t>(std::count(surface.begin(), surface.end(), ' ')) + 1;
}

}  // namespace

std::string_view term_source_name(TermSource s) {
    switch (s) {
        case TermSource::drugbank: return "drugbank";
        case TermSource::fda: return "fda";
        case TermSource::chembl: return "chembl";
        case TermSource::user: break;
    }
    return "user";
}

TermSource term_source_from_name(std::string_view name) {
    if (name == "drugbank") return TermSource::drugbank;
    if (name == "fda") return TermSource::fda;
    if (name == "chembl") return TermSource::chembl;
    return TermSource::user;
}

const TermEntry* DrugDictionary::find(std::string_view surface) const {
    auto it = by_surface_.find(std::string(surface));
    if (it == by_surface_.end()) return nullptr;
    return &entries[it->second];
}

void DrugDictionary::rebuild_index() {
    by_surface_.clear();
    max_tokens_ = 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        by_surface_.emplace(entries[i].surface, i);
        max_tokens_ = std::max(max_tokens_, token_count(entries[i].surface));
    }
}

DrugDictionary compile_dictionary(const std::vector<SourceList>& lists, CompileReport* report) {
    // Stable priority order so the first source wins duplicate surfaces.
    std::vector<const SourceList*> ordered;
    ordered.reserve(lists.size());
    for (const auto& l : lists) ordered.push_back(&l);
    std::stable_sort(ordered.begin(), ordered.end(), [](const SourceList* a, const SourceList* b) {
        return priority(a->source) < priority(b->source);
    });

    DrugDictionary dict;
    auto drop = [&](const std::string& surface, const std::string& reason) {
        if (report) report->dropped.push_back({surface, reason});
    };
    auto in_bounds = [&](const std::string& surface, std::string* why) {
        if (surface.size() < 5 || surface.size() > 75) {
            *why = "length " + std::to_string(surface.size()) + " outside [5,75]";
            return false;
        }
        if (token_count(surface) > 3) {
            *why = "more than 3 tokens";
            return false;
        }
        return true;
    };

    std::unordered_set<std::string> present;
    for (const SourceList* list : ordered) {
        std::string canonical = corpus::normalize_text(list->name);
        std::vector<std::string> surfaces{canonical};
        for (const auto& a : list->aliases) {
            std::string alias = corpus::normalize_text(a);
            if (alias != canonical) surfaces.push_back(alias);
        }
        for (const auto& surface : surfaces) {
            std::string why;
            if (!in_bounds(surface, &why)) {
                drop(surface, why);
                continue;
            }
            if (present.count(surface)) {
                drop(surface, "duplicate of existing entry");
                continue;
            }
            // An alias points at the canonical only while that canonical is a
            // live surface; otherwise it stands for itself.
            std::string target = (surface == canonical || present.count(canonical)) ? canonical : surface;
            dict.entries.push_back({surface, target, list->source});
            present.insert(surface);
        }
    }
    dict.rebuild_index();
    if (report) report->kept = dict.entries.size();
    return dict;
}

DrugDictionary apply_blacklist(const DrugDictionary& dict,
                               const std::vector<std::string>& filter_terms,
                               CompileReport* report) {
    std::unordered_set<std::string> banned;
    for (const auto& t : filter_terms) {
        std::string n = corpus::normalize_text(t);
        if (!n.empty()) banned.insert(n);
    }

    DrugDictionary out;
    out.blacklist = dict.blacklist;
    out.blacklist.insert(banned.begin(), banned.end());
    for (const auto& e : dict.entries) {
        if (banned.count(e.surface)) {
            if (report) report->dropped.push_back({e.surface, "blacklisted"});
            continue;
        }
        if (banned.count(e.canonical)) {
            // The concept is vetoed, not just the spelling.
            if (report) report->dropped.push_back({e.surface, "canonical '" + e.canonical + "' blacklisted"});
            continue;
        }
        out.entries.push_back(e);
    }
    out.rebuild_index();
    if (report) report->kept = out.entries.size();
    return out;
}

std::vector<TermMatch> match_terms(const std::vector<std::string>& tokens,
                                   const DrugDictionary& dict) {
    std::vector<TermMatch> matches;
    const std::size_t n = tokens.size();
    const std::size_t max_len = dict.max_tokens();
    std::size_t i = 0;
    while (i < n) {
        bool matched = false;
        std::size_t longest = std::min(max_len, n - i);
        for (std::size_t len = longest; len >= 1 && !matched; --len) {
            std::string key = tokens[i];
            for (std::size_t j = 1; j < len; ++j) {
                key += ' ';
                key += tokens[i + j];
            }
            if (const TermEntry* e = dict.find(key)) {
                matches.push_back({e->surface, e->canonical, i, i + len});
                i += len;
                matched = true;
            }
        }
        if (!matched) ++i;
    }
    return matches;
}

std::vector<SourceList> load_term_lists_tsv(const std::filesystem::path& p) {
    std::vector<SourceList> lists;
    std::map<std::pair<std::string, std::string>, std::size_t> index;  // (canonical, source) -> slot
    for (const auto& line : read_lines(p)) {
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() < 2) continue;
        std::string canonical(trim(cols[0]));
        std::string alias(trim(cols[1]));
        std::string source = cols.size() > 2 ? std::string(trim(cols[2])) : "user";
        auto key = std::make_pair(canonical, source);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, lists.size());
            lists.push_back({canonical, {}, term_source_from_name(source)});
            it = index.find(key);
        }
        if (alias != canonical) lists[it->second].aliases.push_back(alias);
    }
    return lists;
}

std::vector<std::string> load_blacklist(const std::filesystem::path& p) {
    std::vector<std::string> terms;
    for (const auto& line : read_lines(p)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        terms.emplace_back(t);
    }
    return terms;
}

void save_dictionary_tsv(const DrugDictionary& dict, const std::filesystem::path& p) {
    std::vector<TermEntry> sorted = dict.entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const TermEntry& a, const TermEntry& b) { return a.surface < b.surface; });
    std::string buf = "surface\tcanonical\tsource\n";
    for (const auto& e : sorted) {
        buf += e.surface;
        buf += '\t';
        buf += e.canonical;
        buf += '\t';
        buf += term_source_name(e.source);
        buf += '\n';
    }
    atomic_write(p, buf);
}

DrugDictionary load_dictionary_tsv(const std::filesystem::path& p) {
    DrugDictionary dict;
    bool first = true;
    for (const auto& line : read_lines(p)) {
        if (trim(line).empty()) continue;
        auto cols = split(line, '\t');
        if (first && cols.size() >= 1 && cols[0] == "surface") {
            first = false;
            continue;
        }
        first = false;
        if (cols.size() < 3) continue;
        dict.entries.push_back({cols[0], cols[1], term_source_from_name(cols[2])});
    }
    dict.rebuild_index();
    return dict;
}

}  // namespace litmine::dict
