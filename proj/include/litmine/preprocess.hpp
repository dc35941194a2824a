#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace litmine::preprocess {

struct Sentence {
    std::string text;
    std::vector<std::string> tokens;
    std::size_t begin = 0;  // char span into the source, end exclusive
    std::size_t end = 0;
};

// Splits normalized text on '.', '!' or '?' followed by a space (or end of
// input), except after a known abbreviation. Spans partition the input;
// joining the texts with single spaces reconstructs it.
std::vector<Sentence> split_sentences(std::string_view abstract_norm);

// Whitespace split, then edge punctuation stripped per token. Internal
// hyphens, periods within numbers, '=' and '/' survive, as do comparator or
// sign prefixes directly attached to digits ("<0.01", "-0.5").
std::vector<std::string> tokenize(std::string_view text);

struct PhraseModel {
    std::map<std::pair<std::string, std::string>, double> bigram_scores;
    std::map<std::tuple<std::string, std::string, std::string>, double> trigram_scores;
    double threshold = 10.0;
    int min_count = 5;
};

// Collocation scoring: score(a,b) = (count(a,b) - min_count) * N / (count(a) *
// count(b)) with N the vocabulary size. Pairs scoring >= threshold are kept;
// trigrams come from a second pass over the bigram-merged corpus.
PhraseModel fit_phrases(const std::vector<std::vector<std::string>>& corpus, int min_count = 5,
                        double threshold = 10.0);

// Greedy left-to-right merge with '_'; a trigram merge is tried before a
// bigram at each position.
std::vector<std::string> apply_phrases(const PhraseModel& model,
                                       const std::vector<std::string>& tokens);

// Phrase model artifact (JSON), so later documents merge with the phrases the
// model was trained with.
void save_phrases(const PhraseModel& model, const std::filesystem::path& p);
PhraseModel load_phrases(const std::filesystem::path& p);

// Exception table first, then suffix rules (ies->y, sses->ss, s-drop,
// ing-drop with doubling repair, ed-drop). Deterministic and idempotent.
class Lemmatizer {
  public:
    Lemmatizer();  // built-in exception table

    std::string lemma(const std::string& token) const;

    // TSV rows (surface, lemma); later rows override built-ins.
    void load_exceptions(const std::filesystem::path& p);
    void add_exception(std::string surface, std::string lemma);

  private:
    std::unordered_map<std::string, std::string> exceptions_;
};

// Stopwords dropped first; lemmas shorter than 3 chars are dropped unless they
// contain a digit.
std::vector<std::string> lemmatize_and_filter(const std::vector<std::string>& tokens,
                                              const std::unordered_set<std::string>& stopwords,
                                              const Lemmatizer& lemmatizer);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& p);

struct BagOfWords {
    std::string doc_id;
    std::vector<std::pair<int, int>> counts;  // (vocab index, count), index-sorted

    std::size_t total() const;
};

struct VocabResult {
    std::vector<std::string> vocab;  // sorted
    std::vector<BagOfWords> bows;    // one per input doc, in order
    std::vector<std::size_t> empty_docs;  // indices whose bag came out empty
};

// Vocabulary keeps tokens present in >= min_df documents and <= max_df
// fraction of documents.
VocabResult build_vocab_and_bows(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs, int min_df = 2,
    double max_df = 0.6);

}  // namespace litmine::preprocess
