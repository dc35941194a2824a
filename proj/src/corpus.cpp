#include "litmine/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "litmine/jsonl.hpp"

namespace litmine::corpus {

std::string_view source_name(Source s) {
    switch (s) {
        case Source::pubmed: return "pubmed";
        case Source::preprint: return "preprint";
        case Source::dimensions: return "dimensions";
        case Source::other: break;
    }
    return "other";
}

Source source_from_name(std::string_view name) {
    if (name == "pubmed") return Source::pubmed;
    if (name == "preprint") return Source::preprint;
    if (name == "dimensions") return Source::dimensions;
    return Source::other;
}

std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string normalize_doi(std::string_view raw) {
    std::string s = normalize_text(raw);
    bool stripped = true;
    while (stripped) {
        stripped = false;
        for (std::string_view prefix :
             {"https://", "http://", "dx.doi.org/", "doi.org/", "www.doi.org/", "doi:"}) {
            if (starts_with(s, prefix)) {
                s.erase(0, prefix.size());
                s = std::string(trim(s));
                stripped = true;
            }
        }
    }
    return s;
}

IngestResult ingest_records(const std::vector<nlohmann::json>& records, Source default_source,
                            const Date& ingested) {
    IngestResult result;
    auto str_field = [](const nlohmann::json& r, const char* key) -> std::string {
        auto it = r.find(key);
        if (it != r.end() && it->is_string()) return it->get<std::string>();
        return {};
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.is_object()) {
            result.skipped.push_back({i, "record is not a JSON object"});
            continue;
        }
        std::string doi = normalize_doi(str_field(r, "doi"));
        std::string title = str_field(r, "title");
        if (doi.empty() && normalize_text(title).empty()) {
            result.skipped.push_back({i, "record has neither doi nor title"});
            continue;
        }
        Document d;
        d.doi = doi;
        d.title = title;
        d.abstract_raw = str_field(r, "abstract");
        d.abstract_norm = normalize_text(d.abstract_raw);
        std::string src = str_field(r, "source");
        d.source = src.empty() ? default_source : source_from_name(normalize_text(src));
        d.date_published = Date::parse(str_field(r, "date"));
        d.date_ingested = ingested;
        d.doc_id = !d.doi.empty() ? d.doi : hex64(fnv1a64(normalize_text(d.title)));
        result.documents.push_back(std::move(d));
    }
    return result;
}

namespace {

// One dedup pass: drop later documents whose non-empty key was already seen.
std::vector<Document> dedup_pass(const std::vector<Document>& docs,
                                 std::string (*key)(const Document&)) {
    std::vector<Document> out;
    out.reserve(docs.size());
    std::unordered_set<std::string> seen;
    for (const auto& d : docs) {
        std::string k = key(d);
        if (!k.empty() && !seen.insert(k).second) continue;
        out.push_back(d);
    }
    return out;
}

}  // namespace

std::vector<Document> deduplicate(const std::vector<Document>& docs) {
    auto pass1 = dedup_pass(docs, [](const Document& d) { return d.doi; });
    auto pass2 = dedup_pass(pass1, [](const Document& d) { return d.title_norm(); });
    return dedup_pass(pass2, [](const Document& d) { return d.abstract_norm; });
}

const Document* CorpusStore::find(std::string_view doc_id) const {
    for (const auto& d : documents) {
        if (d.doc_id == doc_id) return &d;
    }
    return nullptr;
}

std::vector<Document> merge_incremental(CorpusStore& store, const std::vector<Document>& new_docs,
                                        const Date& run_date) {
    std::vector<Document> combined = store.documents;
    combined.insert(combined.end(), new_docs.begin(), new_docs.end());
    std::vector<Document> survivors = deduplicate(combined);
    // Stored documents already satisfy the store invariants, so they all survive
    // and the delta is exactly the tail.
    std::vector<Document> delta(survivors.begin() + static_cast<std::ptrdiff_t>(store.documents.size()),
                                survivors.end());

    for (const auto& d : delta) {
        if (d.date_published) {
            std::string src(source_name(d.source));
            std::string date = d.date_published->to_string();
            auto it = store.ledger.high_water.find(src);
            if (it == store.ledger.high_water.end() || it->second < date) {
                store.ledger.high_water[src] = date;
            }
        }
    }
    store.documents.insert(store.documents.end(), delta.begin(), delta.end());
    if (!new_docs.empty()) {
        store.ledger.counts.push_back({run_date.to_string(), delta.size(), new_docs.size() - delta.size()});
    }
    store.ledger.last_run = run_date.to_string();
    return delta;
}

std::vector<std::pair<std::string, std::size_t>> monthly_counts(const CorpusStore& store) {
    std::map<std::string, std::size_t> by_month;
    std::size_t unknown = 0;
    for (const auto& d : store.documents) {
        if (d.date_published && d.date_published->valid() && d.date_published->month > 0) {
            ++by_month[d.date_published->year_month()];
        } else {
            ++unknown;
        }
    }
    std::vector<std::pair<std::string, std::size_t>> out(by_month.begin(), by_month.end());
    if (unknown > 0) out.emplace_back("unknown", unknown);
    return out;
}

nlohmann::json UpdateLedger::to_json() const {
    nlohmann::json j;
    j["last_run"] = last_run;
    j["high_water"] = high_water;
    j["counts"] = nlohmann::json::array();
    for (const auto& c : counts) {
        j["counts"].push_back({{"date", c.run_date}, {"added", c.added}, {"skipped", c.skipped}});
    }
    return j;
}

UpdateLedger UpdateLedger::from_json(const nlohmann::json& j) {
    UpdateLedger l;
    l.last_run = j.value("last_run", "");
    if (j.contains("high_water")) {
        for (auto& [k, v] : j.at("high_water").items()) l.high_water[k] = v.get<std::string>();
    }
    if (j.contains("counts")) {
        for (const auto& c : j.at("counts")) {
            l.counts.push_back({c.value("date", ""), c.value("added", std::uint64_t{0}),
                                c.value("skipped", std::uint64_t{0})});
        }
    }
    return l;
}

nlohmann::json document_to_json(const Document& d) {
    nlohmann::json j;
    j["doc_id"] = d.doc_id;
    j["doi"] = d.doi;
    j["title"] = d.title;
    j["abstract"] = d.abstract_raw;
    j["source"] = std::string(source_name(d.source));
    if (d.date_published) j["date"] = d.date_published->to_string();
    j["ingested"] = d.date_ingested.to_string();
    return j;
}

Document document_from_json(const nlohmann::json& j) {
    Document d;
    d.doc_id = j.value("doc_id", "");
    d.doi = j.value("doi", "");
    d.title = j.value("title", "");
    d.abstract_raw = j.value("abstract", "");
    d.abstract_norm = normalize_text(d.abstract_raw);
    d.source = source_from_name(j.value("source", "other"));
    if (j.contains("date")) d.date_published = Date::parse(j.at("date").get<std::string>());
    if (auto i = Date::parse(j.value("ingested", ""))) d.date_ingested = *i;
    return d;
}

CorpusStore load_store(const std::filesystem::path& docs_file,
                       const std::filesystem::path& ledger_file) {
    CorpusStore store;
    if (std::filesystem::exists(docs_file)) {
        auto file = read_jsonl(docs_file);
        for (auto& [line, rec] : file.records) {
            store.documents.push_back(document_from_json(rec));
        }
    }
    if (std::filesystem::exists(ledger_file)) {
        store.ledger = UpdateLedger::from_json(nlohmann::json::parse(read_file(ledger_file)));
    }
    return store;
}

void save_store(const CorpusStore& store, const std::filesystem::path& docs_file,
                const std::filesystem::path& ledger_file) {
    std::vector<nlohmann::json> records;
    records.reserve(store.documents.size());
    for (const auto& d : store.documents) records.push_back(document_to_json(d));
    write_jsonl(docs_file, records);
    atomic_write(ledger_file, store.ledger.to_json().dump(2) + "\n");
}

}  // namespace litmine::corpus
