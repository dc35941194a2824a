#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "litmine/corpus.hpp"
#include "litmine/dictionary.hpp"
#include "litmine/preprocess.hpp"

namespace litmine::preclinical {

enum class Assay { ec50, ic50, cc50 };

std::string_view assay_name(Assay a);                       // "ec50"
std::string assay_label(Assay a);                           // "EC50"
std::optional<Assay> assay_from_name(std::string_view name);

using AssaySet = std::set<Assay>;
AssaySet all_assays();

// Token-level keyword test with a boundary allowance for suffixed forms
// ("ic50s", "ic50:", "ic50=1.2").
std::optional<Assay> keyword_hit(std::string_view token, const AssaySet& keywords);

struct KeywordHit {
    Assay assay;
    std::size_t sentence_index = 0;
    std::size_t token_index = 0;
};

// Numeric token grammar: optional comparator (<, >, <=, >=, ~, etc.), optional
// sign, digits with optional decimal point and exponent; "key=val" tokens
// expose their right-hand side.
struct NumericValue {
    double value = 0.0;
    std::string raw;         // the number as written
    std::string comparator;  // "<", ">", ... or empty
};

std::optional<NumericValue> parse_numeric(std::string_view token);

struct Rule1Result {
    NumericValue value;
    std::size_t value_index = 0;
    std::string unit;  // raw unit token, empty if none within the window
};

// Closest numeric token to the keyword; ties break rightward. Unit is the
// first unit-vocabulary token within two tokens right of the value.
std::optional<Rule1Result> rule1_extract(const std::vector<std::string>& tokens,
                                         std::size_t keyword_index);

// Unit handling. micromolar_factor yields the multiplier into uM for molar
// units and nullopt for mass/volume or unknown units.
bool is_unit_token(std::string_view token);
std::optional<double> micromolar_factor(std::string_view unit);

struct NounChunk {
    std::size_t begin = 0;
    std::size_t end = 0;   // exclusive
    std::size_t head = 0;  // last nominal token of the span

    bool contains(std::size_t idx) const { return idx >= begin && idx < end; }
};

// Word-class lexicon behind the chunker: a closed determiner set, an excluded
// set (function words and common verbs), explicit modifiers, plus suffix
// heuristics. Digit-bearing tokens, unit tokens and registered drug terms
// count as nominal.
struct ChunkLexicon {
    std::unordered_set<std::string> determiners;
    std::unordered_set<std::string> excluded;
    std::unordered_set<std::string> modifiers;
    std::unordered_set<std::string> nominals;

    static const ChunkLexicon& defaults();
    ChunkLexicon with_nominals(const std::vector<std::string>& extra) const;
};

// Maximal [determiner][modifier*][nominal+] runs, deterministic.
std::vector<NounChunk> extract_noun_chunks(const std::vector<std::string>& tokens,
                                           const ChunkLexicon& lexicon = ChunkLexicon::defaults());

// Chunk with the smallest token gap to the keyword, excluding any chunk that
// contains the keyword itself; ties break rightward.
std::optional<NounChunk> rule2_extract(const std::vector<std::string>& tokens,
                                       std::size_t keyword_index,
                                       const ChunkLexicon& lexicon = ChunkLexicon::defaults());

enum class Correlation { direct, indirect };
enum class RuleUsed { rule1, rule2 };

struct AssayFinding {
    std::string doc_id;
    std::string doi;
    std::string drug_canonical;
    Assay assay = Assay::ic50;
    std::optional<double> value;
    std::string value_raw;
    std::string comparator;
    std::string unit_raw;
    std::optional<double> value_um;  // set when the unit converts to micromolar
    std::string chunk_text;          // rule 2 output
    Correlation correlation = Correlation::direct;
    RuleUsed rule = RuleUsed::rule1;
    std::string evidence_sentence;
};

// Subset of docs whose normalized abstract contains at least one keyword
// token.
std::vector<corpus::Document> filter_assay_abstracts(const std::vector<corpus::Document>& docs,
                                                     const AssaySet& keywords = all_assays());

// Sentence-level extraction: direct findings where a keyword and a drug share
// a sentence (rule 1, rule 2 fallback), indirect findings pairing a drugless
// keyword sentence with the nearest drug-bearing sentence of the abstract.
std::vector<AssayFinding> extract_findings(const corpus::Document& doc,
                                           const dict::DrugDictionary& dict,
                                           const AssaySet& keywords = all_assays());

struct TableRow {
    std::string drug;
    std::string assay;
    std::string value;
    std::string unit;
    std::string value_um;  // empty when not convertible
};

// Rows with values, ascending by micromolar-normalized value; rows with
// unconvertible or missing units sort after, by raw value. Stable.
std::vector<TableRow> tabulate_findings(const std::vector<AssayFinding>& findings);

// Findings file: TSV with one row per finding.
std::string findings_tsv_header();
std::string finding_to_tsv(const AssayFinding& f);
std::vector<AssayFinding> load_findings_tsv(const std::filesystem::path& p);
void append_findings_tsv(const std::filesystem::path& p, const std::vector<AssayFinding>& findings);

}  // namespace litmine::preclinical
