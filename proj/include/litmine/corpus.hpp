#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "litmine/util.hpp"

namespace litmine::corpus {

enum class Source { pubmed, preprint, dimensions, other };

std::string_view source_name(Source s);
Source source_from_name(std::string_view name);  // unknown names map to other

// Lowercase, collapse whitespace runs to a single space, strip ends.
// Idempotent; UTF-8 bytes above 0x7f pass through untouched.
std::string normalize_text(std::string_view raw);

// Lowercase and strip resolver prefixes (https://doi.org/, http://dx.doi.org/,
// doi:, ...) so the same DOI written different ways compares equal.
std::string normalize_doi(std::string_view raw);

struct Document {
    std::string doc_id;
    std::string doi;  // normalized; empty when the record had none
    std::string title;
    std::string abstract_raw;
    std::string abstract_norm;
    Source source = Source::other;
    std::optional<Date> date_published;
    Date date_ingested;

    std::string title_norm() const { return normalize_text(title); }
};

struct SkipEntry {
    std::size_t record_index = 0;  // position in the input batch
    std::string reason;
};

struct IngestResult {
    std::vector<Document> documents;
    std::vector<SkipEntry> skipped;
};

// One Document per record; records lacking both doi and title are skip-listed.
// doc_id is the normalized DOI when present, otherwise a hash of the
// normalized title.
IngestResult ingest_records(const std::vector<nlohmann::json>& records, Source default_source,
                            const Date& ingested);

// Three sequential passes: identical non-empty normalized DOI, then identical
// normalized title, then identical normalized abstract. First occurrence wins;
// input order is preserved. Empty keys never match each other.
std::vector<Document> deduplicate(const std::vector<Document>& docs);

struct UpdateLedger {
    struct RunCount {
        std::string run_date;
        std::uint64_t added = 0;
        std::uint64_t skipped = 0;
    };
    std::string last_run;
    std::map<std::string, std::string> high_water;  // source name -> last seen record date
    std::vector<RunCount> counts;                   // append-only

    nlohmann::json to_json() const;
    static UpdateLedger from_json(const nlohmann::json& j);
};

struct CorpusStore {
    std::vector<Document> documents;
    UpdateLedger ledger;

    const Document* find(std::string_view doc_id) const;
};

// Extends the store by the documents that survive the three-stage rule against
// the stored ones; returns that delta. Ledger gains a (added, skipped) row for
// run_date and high-water marks move forward.
std::vector<Document> merge_incremental(CorpusStore& store, const std::vector<Document>& new_docs,
                                        const Date& run_date);

// (year-month, count) ascending; documents without a publication date are
// grouped under "unknown" at the end.
std::vector<std::pair<std::string, std::size_t>> monthly_counts(const CorpusStore& store);

// Persistence: documents as JSONL, ledger as JSON. Both written atomically.
nlohmann::json document_to_json(const Document& d);
Document document_from_json(const nlohmann::json& j);

CorpusStore load_store(const std::filesystem::path& docs_file,
                       const std::filesystem::path& ledger_file);
void save_store(const CorpusStore& store, const std::filesystem::path& docs_file,
                const std::filesystem::path& ledger_file);

}  // namespace litmine::corpus
