#include "litmine/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "litmine/jsonl.hpp"

namespace litmine::pipeline {

// --- config file ----------------------------------------------------------

namespace {

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(std::string_view v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) {
                ++i;
                switch (v[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += v[i];
                }
            } else {
                out += v[i];
            }
        }
        return out;
    }
    return std::string(v);
}

std::vector<std::string> split_array(std::string_view inner) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : inner) {
        if (c == '"') {
            quoted = !quoted;
            cur += c;
        } else if (c == ',' && !quoted) {
            if (!trim(cur).empty()) out.push_back(unquote(trim(cur)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(unquote(trim(cur)));
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, const std::filesystem::path& base_dir) {
    ConfigFile cfg;
    cfg.base_ = base_dir;
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string line(trim(strip_comment(raw)));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated array");
            }
            cfg.arrays_[key] = split_array(std::string_view(value).substr(1, value.size() - 2));
        } else {
            cfg.scalars_[key] = unquote(value);
        }
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& p) {
    return parse(read_file(p), std::filesystem::absolute(p).parent_path());
}

bool ConfigFile::has(const std::string& key) const {
    return scalars_.count(key) > 0 || arrays_.count(key) > 0;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    auto it = scalars_.find(key);
    return it == scalars_.end() ? fallback : it->second;
}

long long ConfigFile::get_int(const std::string& key, long long fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
    }
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw std::runtime_error("config key " + key + ": not a number: " + it->second);
    }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw std::runtime_error("config key " + key + ": expected true or false");
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
    auto it = arrays_.find(key);
    if (it != arrays_.end()) return it->second;
    auto sc = scalars_.find(key);
    if (sc == scalars_.end()) return {};
    // a scalar "a,b,c" also reads as a list
    std::vector<std::string> out;
    for (const auto& part : split(sc->second, ',')) {
        if (!trim(part).empty()) out.emplace_back(trim(part));
    }
    return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : get_list(key)) {
        try {
            out.push_back(std::stoi(s));
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + key + ": not an integer: " + s);
        }
    }
    return out;
}

std::filesystem::path ConfigFile::get_path(const std::string& key) const {
    auto v = get_string(key);
    if (v.empty()) return {};
    std::filesystem::path p = v;
    return p.is_absolute() ? p : base_ / p;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& config_path) {
    ConfigFile file = ConfigFile::parse_file(config_path);
    PipelineConfig cfg;
    cfg.config_dir = std::filesystem::absolute(config_path).parent_path();

    cfg.corpus_records = file.get_path("paths.corpus_records");
    cfg.trial_records = file.get_path("paths.trial_records");
    cfg.store_dir = file.get_path("paths.store_dir");
    if (cfg.store_dir.empty()) cfg.store_dir = cfg.config_dir / "store";
    cfg.output_dir = file.get_path("paths.output_dir");
    if (cfg.output_dir.empty()) cfg.output_dir = cfg.config_dir / "out";

    cfg.term_lists = file.get_path("paths.term_lists");
    cfg.term_blacklist = file.get_path("paths.term_blacklist");
    cfg.nondrug_filter = file.get_path("paths.nondrug_filter");
    cfg.vaccine_terms = file.get_path("paths.vaccine_terms");
    cfg.vaccine_blacklist = file.get_path("paths.vaccine_blacklist");
    cfg.biologic_terms = file.get_path("paths.biologic_terms");
    cfg.biologic_blacklist = file.get_path("paths.biologic_blacklist");
    cfg.derivatives = file.get_path("paths.derivatives");
    cfg.stopwords = file.get_path("paths.stopwords");
    cfg.lemma_exceptions = file.get_path("paths.lemma_exceptions");
    cfg.topic_labels = file.get_path("paths.topic_labels");

    cfg.default_source =
        corpus::source_from_name(file.get_string("corpus.default_source", "pubmed"));

    auto kw = file.get_list("extraction.keywords");
    if (!kw.empty()) {
        cfg.keywords.clear();
        for (const auto& k : kw) {
            auto a = preclinical::assay_from_name(to_lower(k));
            if (!a) throw std::runtime_error("config extraction.keywords: unknown assay " + k);
            cfg.keywords.insert(*a);
        }
    }

    cfg.lda.seed = static_cast<std::uint64_t>(file.get_int("topics.seed", 42));
    cfg.lda.alpha = file.get_double("topics.alpha", 0.0);
    cfg.lda.beta = file.get_double("topics.beta", 0.01);
    cfg.lda.iterations = static_cast<int>(file.get_int("topics.iterations", 1000));
    cfg.lda.infer_iterations = static_cast<int>(file.get_int("topics.infer_iterations", 100));
    cfg.lda.top_n = static_cast<int>(file.get_int("topics.top_n", 10));
    auto grid = file.get_int_list("topics.k_grid");
    if (!grid.empty()) cfg.k_grid = grid;
    cfg.min_df = static_cast<int>(file.get_int("topics.min_df", 2));
    cfg.max_df = file.get_double("topics.max_df", 0.6);
    cfg.phrase_min_count = static_cast<int>(file.get_int("topics.phrase_min_count", 5));
    cfg.phrase_threshold = file.get_double("topics.phrase_threshold", 10.0);
    return cfg;
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["timestamp"] = timestamp;
    j["docs_added"] = docs_added;
    j["docs_skipped"] = docs_skipped;
    j["trials_added"] = trials_added;
    j["findings_added"] = findings_added;
    j["topics_inferred"] = topics_inferred;
    j["topics_refreshed"] = topics_refreshed;
    nlohmann::json errs = nlohmann::json::array();
    for (const auto& e : errors) errs.push_back({{"stage", e.stage}, {"message", e.message}});
    j["errors"] = errs;
    return j;
}

LockFile::LockFile(const std::filesystem::path& p) : path_(p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::FILE* f = std::fopen(p.string().c_str(), "wx");
    if (!f) {
        throw std::runtime_error("another update appears to be running (lock file " + p.string() +
                                 " exists; remove it if that run crashed)");
    }
    std::fclose(f);
}

LockFile::~LockFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

// --- resource loading -----------------------------------------------------

namespace {

std::vector<std::string> load_word_list(const std::filesystem::path& p) {
    std::vector<std::string> out;
    if (p.empty() || !std::filesystem::exists(p)) return out;
    for (const auto& line : read_lines(p)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(to_lower(t));
    }
    return out;
}

// derivatives file: TSV rows of (base term, derivative form)
std::unordered_map<std::string, std::vector<std::string>> load_derivatives(
    const std::filesystem::path& p) {
    std::unordered_map<std::string, std::vector<std::string>> out;
    if (p.empty() || !std::filesystem::exists(p)) return out;
    for (const auto& line : read_lines(p)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cols = split(t, '\t');
        if (cols.size() < 2) continue;
        out[corpus::normalize_text(cols[0])].push_back(std::string(trim(cols[1])));
    }
    return out;
}

std::vector<std::string> expansions_for(
    const std::vector<std::string>& terms,
    const std::unordered_map<std::string, std::vector<std::string>>& derivatives) {
    std::vector<std::string> out;
    for (const auto& t : terms) {
        auto it = derivatives.find(corpus::normalize_text(t));
        if (it == derivatives.end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

preprocess::Lemmatizer make_lemmatizer(const PipelineConfig& config) {
    preprocess::Lemmatizer lem;
    if (!config.lemma_exceptions.empty() && std::filesystem::exists(config.lemma_exceptions)) {
        lem.load_exceptions(config.lemma_exceptions);
    }
    return lem;
}

std::unordered_set<std::string> make_stopwords(const PipelineConfig& config) {
    if (config.stopwords.empty() || !std::filesystem::exists(config.stopwords)) return {};
    return preprocess::load_stopwords(config.stopwords);
}

std::vector<trials::Trial> load_trials_file(const std::filesystem::path& p) {
    std::vector<trials::Trial> out;
    if (!std::filesystem::exists(p)) return out;
    for (auto& [line, j] : read_jsonl(p).records) out.push_back(trials::trial_from_json(j));
    return out;
}

void save_trials_file(const std::vector<trials::Trial>& list, const std::filesystem::path& p) {
    std::string out;
    for (const auto& t : list) {
        out += trials::trial_to_json(t).dump();
        out += '\n';
    }
    atomic_write(p, out);
}

std::vector<trials::TrialClassification> load_classifications_file(
    const std::filesystem::path& p) {
    std::vector<trials::TrialClassification> out;
    if (!std::filesystem::exists(p)) return out;
    for (auto& [line, j] : read_jsonl(p).records) {
        out.push_back(trials::classification_from_json(j));
    }
    return out;
}

void save_classifications_file(const std::vector<trials::TrialClassification>& list,
                               const std::filesystem::path& p) {
    std::string out;
    for (const auto& c : list) {
        out += trials::classification_to_json(c).dump();
        out += '\n';
    }
    atomic_write(p, out);
}

}  // namespace

dict::DrugDictionary build_dictionary(const PipelineConfig& config, dict::CompileReport* report) {
    dict::DrugDictionary d;
    if (config.term_lists.empty() || !std::filesystem::exists(config.term_lists)) {
        return d;
    }
    auto lists = dict::load_term_lists_tsv(config.term_lists);
    d = dict::compile_dictionary(lists, report);
    if (!config.term_blacklist.empty() && std::filesystem::exists(config.term_blacklist)) {
        d = dict::apply_blacklist(d, dict::load_blacklist(config.term_blacklist), report);
    }
    return d;
}

TrialRules build_trial_rules(const PipelineConfig& config) {
    TrialRules rules;
    rules.lemmatizer = make_lemmatizer(config);
    auto derivatives = load_derivatives(config.derivatives);
    auto vaccine_terms = load_word_list(config.vaccine_terms);
    auto biologic_terms = load_word_list(config.biologic_terms);
    rules.vaccine = trials::compile_keyword_rule(
        "vaccine", vaccine_terms, expansions_for(vaccine_terms, derivatives),
        load_word_list(config.vaccine_blacklist), rules.lemmatizer);
    rules.biologic = trials::compile_keyword_rule(
        "biologic", biologic_terms, expansions_for(biologic_terms, derivatives),
        load_word_list(config.biologic_blacklist), rules.lemmatizer);
    auto filter_words = load_word_list(config.nondrug_filter);
    rules.nondrug.insert(filter_words.begin(), filter_words.end());
    return rules;
}

// --- update run -----------------------------------------------------------

namespace {

std::vector<std::string> doc_lemmas(const corpus::Document& doc,
                                    const preprocess::PhraseModel& phrases,
                                    const std::unordered_set<std::string>& stopwords,
                                    const preprocess::Lemmatizer& lem) {
    auto tokens = preprocess::tokenize(doc.abstract_norm);
    return preprocess::lemmatize_and_filter(preprocess::apply_phrases(phrases, tokens), stopwords,
                                            lem);
}

std::size_t next_report_number(const std::filesystem::path& reports_dir) {
    std::size_t n = 0;
    if (std::filesystem::exists(reports_dir)) {
        for (const auto& e : std::filesystem::directory_iterator(reports_dir)) {
            if (e.is_regular_file()) ++n;
        }
    }
    return n + 1;
}

}  // namespace

RunReport run_update(const PipelineConfig& config, const RunOptions& options) {
    std::filesystem::create_directories(config.store_dir);
    std::filesystem::create_directories(config.output_dir);
    const Date run_date = options.run_date.valid() ? options.run_date : Date::today();

    LockFile lock(config.lock_file());

    RunReport report;
    report.timestamp = run_date.to_string();

    corpus::CorpusStore store;
    std::vector<corpus::Document> delta;
    try {
        store = corpus::load_store(config.corpus_file(), config.ledger_file());
        if (!config.corpus_records.empty() && std::filesystem::exists(config.corpus_records)) {
            JsonlFile in = read_jsonl(config.corpus_records);
            std::vector<nlohmann::json> records;
            records.reserve(in.records.size());
            for (auto& [line, j] : in.records) records.push_back(std::move(j));
            auto ingest = corpus::ingest_records(records, config.default_source, run_date);
            delta = corpus::merge_incremental(store, ingest.documents, run_date);
            report.docs_added = delta.size();
            report.docs_skipped = ingest.skipped.size() + in.errors.size();
            if (!store.ledger.counts.empty() &&
                store.ledger.counts.back().run_date == run_date.to_string()) {
                store.ledger.counts.back().skipped += report.docs_skipped;
            }
            corpus::save_store(store, config.corpus_file(), config.ledger_file());
        }
    } catch (const std::exception& e) {
        report.errors.push_back({"corpus", e.what()});
    }

    dict::DrugDictionary drug_dict;
    try {
        drug_dict = build_dictionary(config);
    } catch (const std::exception& e) {
        report.errors.push_back({"dictionary", e.what()});
    }

    try {
        if (!delta.empty() && !drug_dict.entries.empty()) {
            auto subset = preclinical::filter_assay_abstracts(delta, config.keywords);
            std::vector<preclinical::AssayFinding> found;
            for (const auto& doc : subset) {
                auto fs = preclinical::extract_findings(doc, drug_dict, config.keywords);
                found.insert(found.end(), fs.begin(), fs.end());
            }
            if (!found.empty()) preclinical::append_findings_tsv(config.findings_file(), found);
            report.findings_added = found.size();
        }
    } catch (const std::exception& e) {
        report.errors.push_back({"preclinical", e.what()});
    }

    try {
        if (!config.trial_records.empty() && std::filesystem::exists(config.trial_records)) {
            auto ingest = trials::ingest_trials(trials::read_trial_records(config.trial_records));
            auto existing = load_trials_file(config.trials_file());
            std::unordered_set<std::string> known;
            for (const auto& t : existing) known.insert(t.trial_id);

            std::vector<trials::Trial> fresh;
            for (auto& t : ingest.trials) {
                if (!known.count(t.trial_id)) fresh.push_back(std::move(t));
            }
            if (!fresh.empty()) {
                TrialRules rules = build_trial_rules(config);
                auto classifications = load_classifications_file(config.classifications_file());
                for (const auto& t : fresh) {
                    existing.push_back(t);
                    classifications.push_back(trials::classify_trial(t, drug_dict, rules.vaccine,
                                                                     rules.biologic, rules.nondrug,
                                                                     rules.lemmatizer));
                }
                save_trials_file(existing, config.trials_file());
                save_classifications_file(classifications, config.classifications_file());
            }
            report.trials_added = fresh.size();
        }
    } catch (const std::exception& e) {
        report.errors.push_back({"trials", e.what()});
    }

    try {
        bool have_model = std::filesystem::exists(config.model_file());
        bool month_changed = true;
        if (std::filesystem::exists(config.topics_meta_file())) {
            auto meta = nlohmann::json::parse(read_file(config.topics_meta_file()));
            if (auto d = Date::parse(meta.value("last_retrain", ""))) {
                month_changed = d->year_month() != run_date.year_month();
            }
        }
        bool retrain = options.force_retrain || !have_model || month_changed;

        if (retrain && !store.documents.empty()) {
            auto result = retrain_topics(config, run_date);
            report.topics_refreshed = true;
            report.topics_inferred = result.docs_assigned;
        } else if (have_model && !delta.empty()) {
            report.topics_inferred = infer_new_docs(config, delta);
        }
    } catch (const std::exception& e) {
        report.errors.push_back({"topics", e.what()});
    }

    try {
        render_from_config(config);
    } catch (const std::exception& e) {
        report.errors.push_back({"render", e.what()});
    }

    try {
        auto reports_dir = config.output_dir / "reports";
        std::filesystem::create_directories(reports_dir);
        char name[32];
        std::snprintf(name, sizeof(name), "run-%04zu.json", next_report_number(reports_dir));
        atomic_write(reports_dir / name, report.to_json().dump(2) + "\n");
    } catch (const std::exception& e) {
        report.errors.push_back({"report", e.what()});
    }
    return report;
}

RetrainResult retrain_topics(const PipelineConfig& config, const Date& run_date) {
    auto store = corpus::load_store(config.corpus_file(), config.ledger_file());
    if (store.documents.empty()) {
        throw std::runtime_error("corpus store is empty; nothing to train on");
    }
    preprocess::Lemmatizer lem = make_lemmatizer(config);
    auto stopwords = make_stopwords(config);

    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(store.documents.size());
    for (const auto& d : store.documents) {
        token_lists.push_back(preprocess::tokenize(d.abstract_norm));
    }
    auto phrases =
        preprocess::fit_phrases(token_lists, config.phrase_min_count, config.phrase_threshold);
    std::vector<std::pair<std::string, std::vector<std::string>>> lemmed;
    lemmed.reserve(store.documents.size());
    for (std::size_t i = 0; i < store.documents.size(); ++i) {
        lemmed.emplace_back(
            store.documents[i].doc_id,
            preprocess::lemmatize_and_filter(preprocess::apply_phrases(phrases, token_lists[i]),
                                             stopwords, lem));
    }
    auto vr = preprocess::build_vocab_and_bows(lemmed, config.min_df, config.max_df);
    std::vector<preprocess::BagOfWords> train_bows;
    for (const auto& b : vr.bows) {
        if (b.total() > 0) train_bows.push_back(b);
    }
    if (vr.vocab.empty() || train_bows.empty()) {
        throw std::runtime_error("not enough vocabulary to train a topic model");
    }
    auto grid = topics::grid_search_k(train_bows, vr.vocab, config.k_grid, config.lda);
    std::filesystem::create_directories(config.store_dir);
    topics::save_model(grid.best, config.model_file());
    preprocess::save_phrases(phrases, config.phrases_file());

    std::vector<topics::DocTopicAssignment> assignments;
    assignments.reserve(lemmed.size());
    for (const auto& [doc_id, lemmas] : lemmed) {
        auto bow = topics::restrict_to_vocab(doc_id, lemmas, grid.best);
        assignments.push_back(topics::infer_doc_topics(grid.best, bow, config.lda));
    }
    topics::save_assignments(assignments, config.assignments_file());

    nlohmann::json meta;
    meta["last_retrain"] = run_date.to_string();
    meta["k"] = grid.best.K;
    atomic_write(config.topics_meta_file(), meta.dump(2) + "\n");

    RetrainResult result;
    result.k = grid.best.K;
    result.curve = grid.curve;
    result.docs_assigned = assignments.size();
    return result;
}

std::size_t infer_new_docs(const PipelineConfig& config,
                           const std::vector<corpus::Document>& docs) {
    auto model = topics::load_model(config.model_file());
    preprocess::PhraseModel phrases;
    if (std::filesystem::exists(config.phrases_file())) {
        phrases = preprocess::load_phrases(config.phrases_file());
    }
    preprocess::Lemmatizer lem = make_lemmatizer(config);
    auto stopwords = make_stopwords(config);

    auto assignments = topics::load_assignments(config.assignments_file());
    std::unordered_set<std::string> have;
    for (const auto& a : assignments) have.insert(a.doc_id);
    std::size_t added = 0;
    for (const auto& doc : docs) {
        if (have.count(doc.doc_id)) continue;
        auto bow =
            topics::restrict_to_vocab(doc.doc_id, doc_lemmas(doc, phrases, stopwords, lem), model);
        assignments.push_back(topics::infer_doc_topics(model, bow, config.lda));
        ++added;
    }
    if (added > 0) topics::save_assignments(assignments, config.assignments_file());
    return added;
}

// --- rendering ------------------------------------------------------------

namespace {

struct Table {
    std::string name;  // file stem
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string table_tsv(const Table& t) {
    std::string out = join(t.columns, "\t") + "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += '\t';
            out += sanitize_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string md_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out += c;
    }
    return out;
}

std::string table_md(const Table& t) {
    std::string out = "# " + t.title + "\n\n|";
    for (const auto& c : t.columns) out += " " + c + " |";
    out += "\n|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += " --- |";
    out += '\n';
    for (const auto& row : t.rows) {
        out += '|';
        for (const auto& cell : row) out += " " + md_escape(sanitize_cell(cell)) + " |";
        out += '\n';
    }
    return out;
}

std::string fmt_weight(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<Table> build_tables(const RenderInputs& in) {
    std::vector<Table> tables;

    Table monthly{"monthly_counts", "Papers per month", {"month", "papers"}, {}};
    if (in.store) {
        for (const auto& [month, n] : corpus::monthly_counts(*in.store)) {
            monthly.rows.push_back({month, std::to_string(n)});
        }
    }
    tables.push_back(std::move(monthly));

    Table drugs{"trial_drug_counts", "Drugs in clinical trials", {"rank", "drug", "trials"}, {}};
    if (in.classifications) {
        std::size_t rank = 0;
        for (const auto& [drug, n] : trials::drug_trial_counts(*in.classifications)) {
            drugs.rows.push_back({std::to_string(++rank), drug, std::to_string(n)});
        }
    }
    tables.push_back(std::move(drugs));

    Table findings{"assay_findings",
                   "Assay findings",
                   {"drug", "assay", "value", "unit", "value_um"},
                   {}};
    if (in.findings) {
        for (const auto& row : preclinical::tabulate_findings(*in.findings)) {
            findings.rows.push_back({row.drug, row.assay, row.value, row.unit, row.value_um});
        }
    }
    tables.push_back(std::move(findings));

    Table keywords{"topic_keywords",
                   "Topic keywords",
                   {"topic", "label", "papers", "kept", "keywords"},
                   {}};
    Table recs{"topic_recommendations",
               "Top papers per topic",
               {"topic", "label", "rank", "doc_id", "weight", "title"},
               {}};
    if (in.model && in.assignments) {
        auto reports = topics::topic_reports(*in.model, *in.assignments, in.labels);
        for (const auto& r : reports) {
            keywords.rows.push_back({std::to_string(r.topic_id), r.label,
                                     std::to_string(r.paper_count), r.kept ? "yes" : "no",
                                     join(r.top_words, ", ")});
        }
        std::set<int> kept;
        for (const auto& r : reports) {
            if (r.kept) kept.insert(r.topic_id);
        }
        for (const auto& [topic, docs] : topics::recommend_top_papers(*in.assignments, kept)) {
            std::string label;
            if (auto it = in.labels.find(topic); it != in.labels.end()) label = it->second;
            std::size_t rank = 0;
            for (const auto& a : docs) {
                std::string title;
                if (in.store) {
                    if (const auto* d = in.store->find(a.doc_id)) title = d->title;
                }
                recs.rows.push_back({std::to_string(topic), label, std::to_string(++rank),
                                     a.doc_id, fmt_weight(a.weight), title});
            }
        }
    }
    tables.push_back(std::move(keywords));
    tables.push_back(std::move(recs));

    static const std::unordered_set<std::string> kNoStopwords;
    const auto& stopwords = in.stopwords ? *in.stopwords : kNoStopwords;
    for (auto category : {trials::Category::vaccine, trials::Category::biologic}) {
        Table freq{"term_frequency_" + std::string(trials::category_name(category)),
                   "Frequent terms in " + std::string(trials::category_name(category)) +
                       " trials",
                   {"term", "count"},
                   {}};
        if (in.trial_list && in.classifications) {
            for (const auto& [term, n] : trials::term_frequencies(
                     *in.trial_list, *in.classifications, category, stopwords)) {
                freq.rows.push_back({term, std::to_string(n)});
            }
        }
        tables.push_back(std::move(freq));
    }
    return tables;
}

}  // namespace

std::vector<std::filesystem::path> render_outputs(const RenderInputs& inputs,
                                                  const std::filesystem::path& output_dir) {
    std::filesystem::create_directories(output_dir);
    const auto tables_dir = output_dir / "tables";
    const auto staging = output_dir / "tables.staging";
    const auto old_dir = output_dir / "tables.old";
    std::filesystem::remove_all(staging);
    std::filesystem::remove_all(old_dir);
    std::filesystem::create_directories(staging);

    std::vector<std::filesystem::path> written;
    for (const auto& t : build_tables(inputs)) {
        for (const auto& [ext, content] :
             {std::pair{".tsv", table_tsv(t)}, std::pair{".md", table_md(t)}}) {
            auto name = t.name + ext;
            std::ofstream out(staging / name, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + (staging / name).string());
            out << content;
            if (!out) throw std::runtime_error("write failed: " + (staging / name).string());
            written.push_back(tables_dir / name);
        }
    }

    if (std::filesystem::exists(tables_dir)) std::filesystem::rename(tables_dir, old_dir);
    std::filesystem::rename(staging, tables_dir);
    std::filesystem::remove_all(old_dir);
    return written;
}

std::vector<std::filesystem::path> render_from_config(const PipelineConfig& config) {
    auto store = corpus::load_store(config.corpus_file(), config.ledger_file());
    auto findings = preclinical::load_findings_tsv(config.findings_file());
    auto trial_list = load_trials_file(config.trials_file());
    auto classifications = load_classifications_file(config.classifications_file());

    topics::LdaModel model;
    std::vector<topics::DocTopicAssignment> assignments;
    bool have_model = std::filesystem::exists(config.model_file());
    if (have_model) {
        model = topics::load_model(config.model_file());
        assignments = topics::load_assignments(config.assignments_file());
    }

    RenderInputs in;
    in.store = &store;
    in.findings = &findings;
    in.trial_list = &trial_list;
    in.classifications = &classifications;
    in.model = have_model ? &model : nullptr;
    in.assignments = have_model ? &assignments : nullptr;
    in.labels = topics::load_topic_labels(config.topic_labels);
    auto stopwords = make_stopwords(config);
    in.stopwords = &stopwords;
    return render_outputs(in, config.output_dir);
}

}  // namespace litmine::pipeline
