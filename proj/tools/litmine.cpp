// Command-line front end. Every subcommand is a thin wrapper over the library;
// see README.md for the config file format and the output layout.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "litmine/corpus.hpp"
#include "litmine/dictionary.hpp"
#include "litmine/eval.hpp"
#include "litmine/jsonl.hpp"
#include "litmine/pipeline.hpp"
#include "litmine/preclinical.hpp"
#include "litmine/topics.hpp"
#include "litmine/trials.hpp"
#include "litmine/util.hpp"

using namespace litmine;

namespace {

std::vector<nlohmann::json> load_records(const std::filesystem::path& p) {
    auto file = read_jsonl(p);
    for (const auto& [line, msg] : file.errors) {
        std::cerr << p.string() << ":" << line << ": skipped: " << msg << "\n";
    }
    std::vector<nlohmann::json> records;
    records.reserve(file.records.size());
    for (auto& [line, j] : file.records) records.push_back(std::move(j));
    return records;
}

Date parse_date_flag(const std::string& s) {
    if (s.empty()) return Date::today();
    auto d = Date::parse(s);
    if (!d || !d->valid()) throw std::runtime_error("bad date: " + s);
    return *d;
}

preclinical::AssaySet parse_keywords(const std::string& csv) {
    if (csv.empty()) return preclinical::all_assays();
    preclinical::AssaySet set;
    for (const auto& part : split(csv, ',')) {
        auto a = preclinical::assay_from_name(to_lower(trim(part)));
        if (!a) throw std::runtime_error("unknown assay keyword: " + std::string(trim(part)));
        set.insert(*a);
    }
    return set;
}

pipeline::PipelineConfig require_config(const std::string& config_path) {
    if (config_path.empty()) {
        throw std::runtime_error("this subcommand needs --config");
    }
    return pipeline::PipelineConfig::load(config_path);
}

void write_or_print(const std::string& content, const std::string& output) {
    if (output.empty()) {
        std::cout << content;
    } else {
        atomic_write(output, content);
        std::cerr << "wrote " << output << "\n";
    }
}

dict::DrugDictionary dict_from_flags(const std::string& config_path, const std::string& terms,
                                     const std::string& blacklist, const std::string& dict_tsv) {
    if (!dict_tsv.empty()) return dict::load_dictionary_tsv(dict_tsv);
    if (!terms.empty()) {
        auto d = dict::compile_dictionary(dict::load_term_lists_tsv(terms));
        if (!blacklist.empty()) {
            d = dict::apply_blacklist(d, dict::load_blacklist(blacklist));
        }
        return d;
    }
    auto cfg = require_config(config_path);
    auto d = pipeline::build_dictionary(cfg);
    if (d.entries.empty()) throw std::runtime_error("dictionary is empty; check paths.term_lists");
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"literature mining pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "config file (TOML-style)")->expected(1);

    int rc = 0;

    // ingest: merge new article records into the corpus store
    {
        auto* cmd = app.add_subcommand("ingest", "merge new article records into the store");
        auto input = std::make_shared<std::string>();
        auto store_dir = std::make_shared<std::string>();
        auto source = std::make_shared<std::string>("pubmed");
        auto date = std::make_shared<std::string>();
        cmd->add_option("--input", *input, "records JSONL");
        cmd->add_option("--store-dir", *store_dir, "store directory");
        cmd->add_option("--source", *source, "default source (pubmed/preprint/dimensions/other)");
        cmd->add_option("--date", *date, "run date YYYY-MM-DD (default today)");
        cmd->callback([=, &config_path]() {
            std::filesystem::path in = *input, dir = *store_dir;
            corpus::Source src = corpus::source_from_name(*source);
            if (!config_path.empty()) {
                auto cfg = pipeline::PipelineConfig::load(config_path);
                if (in.empty()) in = cfg.corpus_records;
                if (dir.empty()) dir = cfg.store_dir;
                if (*source == "pubmed") src = cfg.default_source;
            }
            if (in.empty()) throw std::runtime_error("need --input (or --config)");
            if (dir.empty()) dir = "store";
            Date run_date = parse_date_flag(*date);

            auto store = corpus::load_store(dir / "corpus.jsonl", dir / "ledger.json");
            auto ingest = corpus::ingest_records(load_records(in), src, run_date);
            auto delta = corpus::merge_incremental(store, ingest.documents, run_date);
            std::filesystem::create_directories(dir);
            corpus::save_store(store, dir / "corpus.jsonl", dir / "ledger.json");
            nlohmann::json j;
            j["added"] = delta.size();
            j["skipped"] = ingest.skipped.size();
            j["total"] = store.documents.size();
            std::cout << j.dump(2) << "\n";
        });
    }

    // dedup: standalone three-stage dedup over a JSONL batch
    {
        auto* cmd = app.add_subcommand("dedup", "deduplicate a records file");
        auto input = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        auto source = std::make_shared<std::string>("other");
        cmd->add_option("--input", *input, "records JSONL")->required();
        cmd->add_option("--output", *output, "surviving documents JSONL (default stdout)");
        cmd->add_option("--source", *source, "default source tag");
        cmd->callback([=]() {
            auto ingest = corpus::ingest_records(load_records(*input),
                                                 corpus::source_from_name(*source), Date::today());
            auto survivors = corpus::deduplicate(ingest.documents);
            std::string out;
            for (const auto& d : survivors) {
                out += corpus::document_to_json(d).dump();
                out += '\n';
            }
            write_or_print(out, *output);
            std::cerr << "kept " << survivors.size() << " of " << ingest.documents.size()
                      << " ingested (" << ingest.skipped.size() << " records skipped)\n";
        });
    }

    // dict-build: compile the drug dictionary
    {
        auto* cmd = app.add_subcommand("dict-build", "compile the drug dictionary");
        auto terms = std::make_shared<std::string>();
        auto blacklist = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        auto verbose = std::make_shared<bool>(false);
        cmd->add_option("--terms", *terms, "term lists TSV (canonical, alias, source)");
        cmd->add_option("--blacklist", *blacklist, "one filter term per line");
        cmd->add_option("--output", *output, "compiled dictionary TSV")->required();
        cmd->add_flag("--verbose", *verbose, "list dropped surfaces");
        cmd->callback([=, &config_path]() {
            dict::CompileReport report;
            dict::DrugDictionary d;
            if (!terms->empty()) {
                d = dict::compile_dictionary(dict::load_term_lists_tsv(*terms), &report);
                if (!blacklist->empty()) {
                    d = dict::apply_blacklist(d, dict::load_blacklist(*blacklist), &report);
                }
            } else {
                d = pipeline::build_dictionary(require_config(config_path), &report);
            }
            dict::save_dictionary_tsv(d, *output);
            std::cerr << "kept " << d.size() << " surfaces, dropped " << report.dropped.size()
                      << "\n";
            if (*verbose) {
                for (const auto& e : report.dropped) {
                    std::cerr << "  " << e.surface << ": " << e.reason << "\n";
                }
            }
        });
    }

    // extract: assay findings from abstracts
    {
        auto* cmd = app.add_subcommand("extract", "extract assay findings from abstracts");
        auto input = std::make_shared<std::string>();
        auto terms = std::make_shared<std::string>();
        auto blacklist = std::make_shared<std::string>();
        auto dict_tsv = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        auto keywords = std::make_shared<std::string>();
        cmd->add_option("--input", *input, "abstract records JSONL")->required();
        cmd->add_option("--terms", *terms, "term lists TSV");
        cmd->add_option("--blacklist", *blacklist, "dictionary filter terms");
        cmd->add_option("--dict", *dict_tsv, "precompiled dictionary TSV");
        cmd->add_option("--output", *output, "findings TSV (default stdout)");
        cmd->add_option("--keywords", *keywords, "comma list, default ec50,ic50,cc50");
        cmd->callback([=, &config_path]() {
            auto d = dict_from_flags(config_path, *terms, *blacklist, *dict_tsv);
            auto set = parse_keywords(*keywords);
            auto ingest = corpus::ingest_records(load_records(*input), corpus::Source::other,
                                                 Date::today());
            auto docs = corpus::deduplicate(ingest.documents);
            std::string out = preclinical::findings_tsv_header();
            std::size_t n = 0;
            for (const auto& doc : preclinical::filter_assay_abstracts(docs, set)) {
                for (const auto& f : preclinical::extract_findings(doc, d, set)) {
                    out += preclinical::finding_to_tsv(f);
                    ++n;
                }
            }
            write_or_print(out, *output);
            std::cerr << n << " findings from " << docs.size() << " documents\n";
        });
    }

    // trials: ingest + classify a trial export
    {
        auto* cmd = app.add_subcommand("trials", "classify clinical trial records");
        auto input = std::make_shared<std::string>();
        auto save = std::make_shared<bool>(false);
        cmd->add_option("--input", *input, "trial export (CSV or JSONL)");
        cmd->add_flag("--save", *save, "append to the store instead of printing counts");
        cmd->callback([=, &config_path]() {
            auto cfg = require_config(config_path);
            std::filesystem::path in =
                input->empty() ? cfg.trial_records : std::filesystem::path(*input);
            if (in.empty() || !std::filesystem::exists(in)) {
                throw std::runtime_error("no trial records file (give --input)");
            }
            if (*save) {
                auto saved = cfg;
                saved.trial_records = in;
                pipeline::RunOptions opts;
                opts.run_date = Date::today();
                // trial stage only: run update with no corpus input
                saved.corpus_records.clear();
                auto report = pipeline::run_update(saved, opts);
                std::cout << report.to_json().dump(2) << "\n";
                return;
            }
            auto ingest = trials::ingest_trials(trials::read_trial_records(in));
            auto d = pipeline::build_dictionary(cfg);
            auto rules = pipeline::build_trial_rules(cfg);
            std::vector<trials::TrialClassification> classifications;
            for (const auto& t : ingest.trials) {
                classifications.push_back(trials::classify_trial(
                    t, d, rules.vaccine, rules.biologic, rules.nondrug, rules.lemmatizer));
            }
            std::cout << "drug\ttrials\n";
            for (const auto& [drug, n] : trials::drug_trial_counts(classifications)) {
                std::cout << drug << "\t" << n << "\n";
            }
        });
    }

    // topics-train: retrain the topic model over the stored corpus
    {
        auto* cmd = app.add_subcommand("topics-train", "grid-search and train the topic model");
        auto k_grid = std::make_shared<std::string>();
        auto seed = std::make_shared<long long>(-1);
        auto iterations = std::make_shared<int>(-1);
        auto date = std::make_shared<std::string>();
        cmd->add_option("--k-grid", *k_grid, "comma list of K values");
        cmd->add_option("--seed", *seed, "sampler seed");
        cmd->add_option("--iterations", *iterations, "training sweeps");
        cmd->add_option("--date", *date, "run date YYYY-MM-DD");
        cmd->callback([=, &config_path]() {
            auto cfg = require_config(config_path);
            if (!k_grid->empty()) {
                cfg.k_grid.clear();
                for (const auto& part : split(*k_grid, ',')) {
                    cfg.k_grid.push_back(std::stoi(std::string(trim(part))));
                }
            }
            if (*seed >= 0) cfg.lda.seed = static_cast<std::uint64_t>(*seed);
            if (*iterations > 0) cfg.lda.iterations = *iterations;
            auto result = pipeline::retrain_topics(cfg, parse_date_flag(*date));
            std::cout << "k\tcoherence\n";
            for (const auto& [k, score] : result.curve) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%d\t%.6f\n", k, score);
                std::cout << buf;
            }
            std::cerr << "selected k=" << result.k << ", assigned " << result.docs_assigned
                      << " documents\n";
        });
    }

    // topics-infer: assign topics to new documents
    {
        auto* cmd = app.add_subcommand("topics-infer", "infer topics for new documents");
        auto input = std::make_shared<std::string>();
        cmd->add_option("--input", *input,
                        "records JSONL (default: stored docs without assignments)");
        cmd->callback([=, &config_path]() {
            auto cfg = require_config(config_path);
            std::vector<corpus::Document> docs;
            if (!input->empty()) {
                auto ingest = corpus::ingest_records(load_records(*input), cfg.default_source,
                                                     Date::today());
                docs = corpus::deduplicate(ingest.documents);
            } else {
                docs = corpus::load_store(cfg.corpus_file(), cfg.ledger_file()).documents;
            }
            std::size_t added = pipeline::infer_new_docs(cfg, docs);
            std::cout << "{\"inferred\": " << added << "}\n";
        });
    }

    // recommend: print per-topic top-10 lists
    {
        auto* cmd = app.add_subcommand("recommend", "top papers per kept topic");
        auto top = std::make_shared<std::size_t>(10);
        cmd->add_option("--top", *top, "papers per topic");
        cmd->callback([=, &config_path]() {
            auto cfg = require_config(config_path);
            auto model = topics::load_model(cfg.model_file());
            auto assignments = topics::load_assignments(cfg.assignments_file());
            auto labels = topics::load_topic_labels(cfg.topic_labels);
            auto kept = topics::filter_small_topics(assignments, model.K);
            std::cout << "topic\tlabel\trank\tdoc_id\tweight\n";
            for (const auto& [topic, docs] :
                 topics::recommend_top_papers(assignments, kept, *top)) {
                std::string label;
                if (auto it = labels.find(topic); it != labels.end()) label = it->second;
                std::size_t rank = 0;
                for (const auto& a : docs) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.6f", a.weight);
                    std::cout << topic << "\t" << label << "\t" << ++rank << "\t" << a.doc_id
                              << "\t" << buf << "\n";
                }
            }
        });
    }

    // eval: score findings against a gold file
    {
        auto* cmd = app.add_subcommand("eval", "score findings against gold labels");
        auto pred = std::make_shared<std::string>();
        auto gold_path = std::make_shared<std::string>();
        auto as_json = std::make_shared<bool>(false);
        cmd->add_option("--pred", *pred, "findings TSV")->required();
        cmd->add_option("--gold", *gold_path, "gold labels JSONL")->required();
        cmd->add_flag("--json", *as_json, "JSON output");
        cmd->callback([=]() {
            if (!std::filesystem::exists(*gold_path)) {
                throw std::runtime_error("gold file not found: " + *gold_path);
            }
            if (!std::filesystem::exists(*pred)) {
                throw std::runtime_error("findings file not found: " + *pred);
            }
            auto predictions = preclinical::load_findings_tsv(*pred);
            auto gold = eval::load_gold(*gold_path);
            auto m = eval::score(predictions, gold);
            if (*as_json) {
                std::cout << eval::metrics_to_json(m) << "\n";
            } else {
                std::cout << eval::metrics_table(m);
                auto drug_only = eval::score_drug_only(predictions, gold);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "drug-only  P=%.3f R=%.3f\n",
                              drug_only.precision, drug_only.recall);
                std::cout << buf;
            }
        });
    }

    // update: the daily run
    {
        auto* cmd = app.add_subcommand("update", "run the full daily update");
        auto date = std::make_shared<std::string>();
        auto force = std::make_shared<bool>(false);
        cmd->add_option("--date", *date, "run date YYYY-MM-DD (default today)");
        cmd->add_flag("--force-retrain", *force, "retrain the topic model now");
        cmd->callback([=, &config_path, &rc]() {
            auto cfg = require_config(config_path);
            pipeline::RunOptions opts;
            opts.run_date = parse_date_flag(*date);
            opts.force_retrain = *force;
            auto report = pipeline::run_update(cfg, opts);
            std::cout << report.to_json().dump(2) << "\n";
            if (!report.errors.empty()) rc = 1;
        });
    }

    // render: rebuild the published tables
    {
        auto* cmd = app.add_subcommand("render", "rebuild the output tables");
        cmd->callback([&config_path]() {
            auto cfg = require_config(config_path);
            for (const auto& p : pipeline::render_from_config(cfg)) {
                std::cout << p.string() << "\n";
            }
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
