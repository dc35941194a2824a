#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "litmine/preprocess.hpp"

namespace litmine::topics {

struct LdaConfig {
    double alpha = 0.0;  // 0 means "use 1/K"
    double beta = 0.01;
    int iterations = 1000;
    int infer_iterations = 100;
    int top_n = 10;  // words per topic for coherence / reports
    std::uint64_t seed = 42;

    double alpha_for(int K) const { return alpha > 0.0 ? alpha : 1.0 / K; }
};

struct LdaModel {
    int K = 0;
    std::vector<std::string> vocab;
    std::vector<std::vector<double>> topic_word;  // K rows, each sums to 1
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;

    std::size_t vocab_size() const { return vocab.size(); }
};

struct DocTopicAssignment {
    std::string doc_id;
    std::vector<double> distribution;  // length K, sums to 1
    int top_topic = 0;
    double weight = 0.0;          // distribution[top_topic]
    bool uniform_fallback = false;  // bag was empty under the model vocab
};

struct TopicReport {
    int topic_id = 0;
    std::vector<std::string> top_words;
    std::string label;
    std::size_t paper_count = 0;
    bool kept = true;
};

// Collapsed Gibbs sampling for `iterations` full sweeps. Deterministic for a
// fixed seed. Bags must be non-empty and reference `vocab` indices.
LdaModel train_lda(const std::vector<preprocess::BagOfWords>& bows,
                   const std::vector<std::string>& vocab, int K, double alpha, double beta,
                   int iterations, std::uint64_t seed);

// Top-N words of a topic: probability descending, vocab index ascending on
// ties.
std::vector<int> top_word_indices(const LdaModel& model, int topic, int top_n);

// Intrinsic coherence over the given bags: mean over topics of
// sum_{i<j} log((D(wi, wj) + 1) / D(wj)) for the ordered top-N word list.
double coherence_umass(const LdaModel& model, const std::vector<preprocess::BagOfWords>& bows,
                       int top_n = 10);

struct GridResult {
    LdaModel best;
    std::vector<std::pair<int, double>> curve;  // (K, coherence), ascending K
};

// One model per K with the same seed; maximum coherence wins, ties toward
// smaller K.
GridResult grid_search_k(const std::vector<preprocess::BagOfWords>& bows,
                         const std::vector<std::string>& vocab, const std::vector<int>& k_grid,
                         const LdaConfig& config);

// Bag restricted to the model vocabulary for a new document.
preprocess::BagOfWords restrict_to_vocab(const std::string& doc_id,
                                         const std::vector<std::string>& lemmas,
                                         const LdaModel& model);

// Fixed-count Gibbs sweeps with topic_word held fixed; the per-document seed
// is derived from the model seed and the doc id. Empty bags get the uniform
// fallback.
DocTopicAssignment infer_doc_topics(const LdaModel& model, const preprocess::BagOfWords& bow,
                                    const LdaConfig& config = {});

// Keeps topics whose paper count is at least (N / K) / 5; strictly fewer is
// dropped.
std::set<int> filter_small_topics(const std::vector<DocTopicAssignment>& assignments, int K);

// Per kept topic: docs ranked by weight descending, doc_id ascending on ties,
// truncated to k.
std::map<int, std::vector<DocTopicAssignment>> recommend_top_papers(
    const std::vector<DocTopicAssignment>& assignments, const std::set<int>& kept_topics,
    std::size_t k = 10);

std::vector<TopicReport> topic_reports(const LdaModel& model,
                                       const std::vector<DocTopicAssignment>& assignments,
                                       const std::map<int, std::string>& labels, int top_n = 10);

// Model artifact: versioned JSON with vocab and row-major topic_word.
void save_model(const LdaModel& model, const std::filesystem::path& p);
LdaModel load_model(const std::filesystem::path& p);

// Assignments file: JSONL, one assignment per line.
void save_assignments(const std::vector<DocTopicAssignment>& assignments,
                      const std::filesystem::path& p);
std::vector<DocTopicAssignment> load_assignments(const std::filesystem::path& p);

// Labels file: TSV rows of topic_id, label.
std::map<int, std::string> load_topic_labels(const std::filesystem::path& p);

}  // namespace litmine::topics
