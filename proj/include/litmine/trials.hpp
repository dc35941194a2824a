#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "litmine/dictionary.hpp"
#include "litmine/preprocess.hpp"
#include "litmine/util.hpp"

namespace litmine::trials {

struct Trial {
    std::string trial_id;
    std::string title;
    std::string description_norm;
    std::optional<Date> date_registered;
    std::string phase;
};

struct TrialIngestResult {
    std::vector<Trial> trials;
    std::vector<std::pair<std::size_t, std::string>> skipped;  // (record index, reason)
};

// Accepts JSONL records or CSV rows already lifted to JSON. Recognized keys:
// trial_id/id/nct_id, title/public_title, description/abstract/summary,
// date/date_registered, phase. Duplicated ids keep the first record.
TrialIngestResult ingest_trials(const std::vector<nlohmann::json>& records);

// Reads a trial export; ".csv" parses as CSV with a header row (quoted fields
// per RFC 4180), anything else as JSONL.
std::vector<nlohmann::json> read_trial_records(const std::filesystem::path& p);

// Minimal CSV reader: header row names the columns, quotes and embedded
// newlines handled.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

enum class Category { drug, vaccine, biologic };
std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

// A keyword rule: term sequences matched at token boundaries against either
// the raw tokens or their lemmas, plus a rule-specific blacklist that vetoes
// the whole category when it matches.
struct KeywordRule {
    std::string name;
    std::set<std::vector<std::string>> sequences;
    std::set<std::vector<std::string>> veto_sequences;
    std::size_t max_len = 1;
    std::size_t veto_max_len = 1;
};

// Terms and expansions (explicit derivative forms) both contribute sequences;
// every sequence is stored raw and lemmatized.
KeywordRule compile_keyword_rule(std::string name, const std::vector<std::string>& terms,
                                 const std::vector<std::string>& expansions,
                                 const std::vector<std::string>& blacklist,
                                 const preprocess::Lemmatizer& lemmatizer);

struct TrialClassification {
    std::string trial_id;
    std::set<Category> categories;
    std::map<Category, std::vector<std::string>> witnesses;  // verbatim matched text
    std::vector<std::string> drug_canonicals;                // sorted, distinct

    bool has(Category c) const { return categories.count(c) > 0; }
};

// Drug category: dictionary matches whose surface and canonical both survive
// the non-drug filter. Vaccine/biologic: ≥1 rule match and no veto match.
TrialClassification classify_trial(const Trial& trial, const dict::DrugDictionary& dict,
                                   const KeywordRule& vaccine, const KeywordRule& biologic,
                                   const std::unordered_set<std::string>& nondrug_filter,
                                   const preprocess::Lemmatizer& lemmatizer);

// One increment per (trial, canonical); count descending, name ascending.
std::vector<std::pair<std::string, std::size_t>> drug_trial_counts(
    const std::vector<TrialClassification>& classifications);

// Token frequencies over descriptions of trials holding the category,
// stopwords removed; count descending, token ascending.
std::vector<std::pair<std::string, std::size_t>> term_frequencies(
    const std::vector<Trial>& trials, const std::vector<TrialClassification>& classifications,
    Category category, const std::unordered_set<std::string>& stopwords);

nlohmann::json trial_to_json(const Trial& t);
Trial trial_from_json(const nlohmann::json& j);
nlohmann::json classification_to_json(const TrialClassification& c);
TrialClassification classification_from_json(const nlohmann::json& j);

}  // namespace litmine::trials
