#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "litmine/corpus.hpp"
#include "litmine/dictionary.hpp"
#include "litmine/eval.hpp"
#include "litmine/preclinical.hpp"
#include "litmine/topics.hpp"
#include "litmine/trials.hpp"

namespace litmine::pipeline {

// Flat-section key/value config file (TOML-style): [section] headers,
// key = value lines, "quoted" strings, numbers, booleans and [a, b] arrays.
class ConfigFile {
  public:
    static ConfigFile parse_file(const std::filesystem::path& p);
    static ConfigFile parse(std::string_view text, const std::filesystem::path& base_dir);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
    // Relative paths resolve against the config file's directory; empty when
    // the key is absent.
    std::filesystem::path get_path(const std::string& key) const;

  private:
    std::map<std::string, std::string> scalars_;
    std::map<std::string, std::vector<std::string>> arrays_;
    std::filesystem::path base_;
};

struct PipelineConfig {
    std::filesystem::path config_dir;

    // incoming data (optional; stages skip silently when absent)
    std::filesystem::path corpus_records;
    std::filesystem::path trial_records;

    // persistent state and published outputs
    std::filesystem::path store_dir;
    std::filesystem::path output_dir;

    // resource files
    std::filesystem::path term_lists;
    std::filesystem::path term_blacklist;
    std::filesystem::path nondrug_filter;
    std::filesystem::path vaccine_terms;
    std::filesystem::path vaccine_blacklist;
    std::filesystem::path biologic_terms;
    std::filesystem::path biologic_blacklist;
    std::filesystem::path derivatives;
    std::filesystem::path stopwords;
    std::filesystem::path lemma_exceptions;
    std::filesystem::path topic_labels;

    corpus::Source default_source = corpus::Source::pubmed;
    preclinical::AssaySet keywords = preclinical::all_assays();

    topics::LdaConfig lda;
    std::vector<int> k_grid = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    int min_df = 2;
    double max_df = 0.6;
    int phrase_min_count = 5;
    double phrase_threshold = 10.0;

    static PipelineConfig load(const std::filesystem::path& config_path);

    // store-file locations
    std::filesystem::path corpus_file() const { return store_dir / "corpus.jsonl"; }
    std::filesystem::path ledger_file() const { return store_dir / "ledger.json"; }
    std::filesystem::path findings_file() const { return store_dir / "findings.tsv"; }
    std::filesystem::path trials_file() const { return store_dir / "trials.jsonl"; }
    std::filesystem::path classifications_file() const {
        return store_dir / "classifications.jsonl";
    }
    std::filesystem::path model_file() const { return store_dir / "model.json"; }
    std::filesystem::path phrases_file() const { return store_dir / "phrases.json"; }
    std::filesystem::path assignments_file() const { return store_dir / "assignments.jsonl"; }
    std::filesystem::path topics_meta_file() const { return store_dir / "topics_meta.json"; }
    std::filesystem::path lock_file() const { return store_dir / "update.lock"; }
};

struct StageError {
    std::string stage;
    std::string message;
};

struct RunReport {
    std::string timestamp;  // run date
    std::size_t docs_added = 0;
    std::size_t docs_skipped = 0;
    std::size_t trials_added = 0;
    std::size_t findings_added = 0;
    std::size_t topics_inferred = 0;
    bool topics_refreshed = false;  // model retrained this run
    std::vector<StageError> errors;

    nlohmann::json to_json() const;
};

struct RunOptions {
    Date run_date;  // invalid (year 0) means "today"
    bool force_retrain = false;
};

// Exists-fails lock guarding one update run at a time; removed on destruction.
class LockFile {
  public:
    explicit LockFile(const std::filesystem::path& p);
    ~LockFile();
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

  private:
    std::filesystem::path path_;
};

// The daily run: merge new corpus records, extract findings from the delta,
// merge and classify new trials, refresh topic inference (retrain on a new
// calendar month or when forced), render tables, persist a report. Stage
// failures are recorded and later stages still run.
RunReport run_update(const PipelineConfig& config, const RunOptions& options = {});

struct RetrainResult {
    int k = 0;
    std::vector<std::pair<int, double>> curve;  // grid-search coherence curve
    std::size_t docs_assigned = 0;
};

// Full retrain over the stored corpus: phrase model, vocabulary, grid search,
// fresh assignments for every document. Persists model, phrases, assignments
// and the retrain date.
RetrainResult retrain_topics(const PipelineConfig& config, const Date& run_date);

// Inference for documents that have no stored assignment yet, against the
// persisted model. Returns how many assignments were added.
std::size_t infer_new_docs(const PipelineConfig& config,
                           const std::vector<corpus::Document>& docs);

// Everything render_outputs needs, already loaded. Null model/assignments mean
// "no topic model yet"; those tables render header-only.
struct RenderInputs {
    const corpus::CorpusStore* store = nullptr;
    const std::vector<preclinical::AssayFinding>* findings = nullptr;
    const std::vector<trials::Trial>* trial_list = nullptr;
    const std::vector<trials::TrialClassification>* classifications = nullptr;
    const topics::LdaModel* model = nullptr;
    const std::vector<topics::DocTopicAssignment>* assignments = nullptr;
    std::map<int, std::string> labels;
    const std::unordered_set<std::string>* stopwords = nullptr;
};

// Writes every table twice (TSV + Markdown) into output_dir/tables via a
// staging directory swap, so readers never see partial output. Returns the
// final file paths. Byte-deterministic for fixed inputs.
std::vector<std::filesystem::path> render_outputs(const RenderInputs& inputs,
                                                  const std::filesystem::path& output_dir);

// Convenience used by run_update and the render subcommand: load all stores
// referenced by the config and render.
std::vector<std::filesystem::path> render_from_config(const PipelineConfig& config);

// Dictionary compiled from the config's term lists and blacklist; empty
// dictionary when the files are absent.
dict::DrugDictionary build_dictionary(const PipelineConfig& config,
                                      dict::CompileReport* report = nullptr);

// Classification resources assembled from the config's term, derivative and
// blacklist files.
struct TrialRules {
    trials::KeywordRule vaccine;
    trials::KeywordRule biologic;
    std::unordered_set<std::string> nondrug;
    preprocess::Lemmatizer lemmatizer;
};

TrialRules build_trial_rules(const PipelineConfig& config);

}  // namespace litmine::pipeline
