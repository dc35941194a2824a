#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace litmine::dict {

enum class TermSource { drugbank, fda, chembl, user };

std::string_view term_source_name(TermSource s);
TermSource term_source_from_name(std::string_view name);  // unknown -> user

struct TermEntry {
    std::string surface;    // normalized, 1-3 tokens, 5-75 chars
    std::string canonical;  // preferred name; always a surface of some entry
    TermSource source = TermSource::user;
};

struct DrugDictionary {
    std::vector<TermEntry> entries;
    std::unordered_set<std::string> blacklist;

    const TermEntry* find(std::string_view surface) const;
    std::size_t size() const { return entries.size(); }
    std::size_t max_tokens() const { return max_tokens_; }

    void rebuild_index();

  private:
    std::unordered_map<std::string, std::size_t> by_surface_;
    std::size_t max_tokens_ = 1;
};

struct SourceList {
    std::string name;                  // canonical drug name
    std::vector<std::string> aliases;  // may be empty
    TermSource source = TermSource::user;
};

struct CompileReport {
    struct Entry {
        std::string surface;
        std::string reason;
    };
    std::vector<Entry> dropped;
    std::size_t kept = 0;
};

// Normalizes every name and alias, drops surfaces outside 5-75 chars or above
// three tokens, collapses duplicate surfaces with drugbank > fda > chembl >
// user priority. An alias whose canonical did not survive becomes its own
// canonical.
DrugDictionary compile_dictionary(const std::vector<SourceList>& lists,
                                  CompileReport* report = nullptr);

// Removes entries whose surface is a filter term; removing a canonical removes
// its aliases as well.
DrugDictionary apply_blacklist(const DrugDictionary& dict,
                               const std::vector<std::string>& filter_terms,
                               CompileReport* report = nullptr);

struct TermMatch {
    std::string surface;
    std::string canonical;
    std::size_t token_start = 0;
    std::size_t token_end = 0;  // exclusive
};

// Non-overlapping leftmost-longest matches over token boundaries; a trigram
// beats a bigram beats a unigram starting at the same token.
std::vector<TermMatch> match_terms(const std::vector<std::string>& tokens,
                                   const DrugDictionary& dict);

// Term lists are TSV rows (canonical, alias, source); the canonical's own row
// carries alias = canonical. Blacklists are one term per line.
std::vector<SourceList> load_term_lists_tsv(const std::filesystem::path& p);
std::vector<std::string> load_blacklist(const std::filesystem::path& p);

// Compiled dictionary persisted as TSV (surface, canonical, source).
void save_dictionary_tsv(const DrugDictionary& dict, const std::filesystem::path& p);
DrugDictionary load_dictionary_tsv(const std::filesystem::path& p);

}  // namespace litmine::dict
