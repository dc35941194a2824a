#include "litmine/trials.hpp"

#include <algorithm>

#include "litmine/corpus.hpp"
#include "litmine/jsonl.hpp"

namespace litmine::trials {

namespace {

std::string pick_field(const nlohmann::json& r, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (r.contains(k) && r[k].is_string()) {
            auto v = r[k].get<std::string>();
            if (!trim(v).empty()) return v;
        }
    }
    return "";
}

}  // namespace

TrialIngestResult ingest_trials(const std::vector<nlohmann::json>& records) {
    TrialIngestResult result;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.is_object()) {
            result.skipped.emplace_back(i, "record is not an object");
            continue;
        }
        std::string id(trim(pick_field(r, {"trial_id", "id", "nct_id"})));
        if (id.empty()) {
            result.skipped.emplace_back(i, "missing trial_id");
            continue;
        }
        if (!seen.insert(id).second) {
            result.skipped.emplace_back(i, "duplicate trial_id " + id);
            continue;
        }
        Trial t;
        t.trial_id = id;
        t.title = pick_field(r, {"title", "public_title"});
        t.description_norm =
            corpus::normalize_text(pick_field(r, {"description", "abstract", "summary"}));
        if (auto d = Date::parse(pick_field(r, {"date", "date_registered"}))) {
            t.date_registered = *d;
        }
        t.phase = pick_field(r, {"phase"});
        result.trials.push_back(std::move(t));
    }
    return result;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                if (any || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                field.clear();
                row.clear();
                any = false;
                break;
            default:
                field += c;
                any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<nlohmann::json> read_trial_records(const std::filesystem::path& p) {
    std::vector<nlohmann::json> records;
    if (to_lower(p.extension().string()) == ".csv") {
        auto rows = parse_csv(read_file(p));
        if (rows.empty()) return records;
        const auto& header = rows.front();
        for (std::size_t r = 1; r < rows.size(); ++r) {
            nlohmann::json rec = nlohmann::json::object();
            for (std::size_t c = 0; c < rows[r].size() && c < header.size(); ++c) {
                rec[to_lower(trim(header[c]))] = rows[r][c];
            }
            records.push_back(std::move(rec));
        }
        return records;
    }
    JsonlFile file = read_jsonl(p);
    for (auto& [line, j] : file.records) records.push_back(std::move(j));
    return records;
}

std::string_view category_name(Category c) {
    switch (c) {
        case Category::drug: return "drug";
        case Category::vaccine: return "vaccine";
        case Category::biologic: break;
    }
    return "biologic";
}

std::optional<Category> category_from_name(std::string_view name) {
    if (name == "drug") return Category::drug;
    if (name == "vaccine") return Category::vaccine;
    if (name == "biologic") return Category::biologic;
    return std::nullopt;
}

namespace {

void add_sequences(std::set<std::vector<std::string>>& out, std::size_t& max_len,
                   const std::string& term, const preprocess::Lemmatizer& lemmatizer) {
    auto tokens = preprocess::tokenize(corpus::normalize_text(term));
    if (tokens.empty()) return;
    std::vector<std::string> lemmas;
    for (const auto& t : tokens) lemmas.push_back(lemmatizer.lemma(t));
    max_len = std::max(max_len, tokens.size());
    out.insert(std::move(lemmas));
    out.insert(std::move(tokens));
}

struct SpanMatch {
    std::size_t begin = 0;
    std::size_t end = 0;
};

std::vector<SpanMatch> match_sequences(const std::vector<std::string>& tokens,
                                       const std::vector<std::string>& lemmas,
                                       const std::set<std::vector<std::string>>& seqs,
                                       std::size_t max_len) {
    std::vector<SpanMatch> spans;
    if (seqs.empty()) return spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        for (std::size_t len = std::min(max_len, tokens.size() - i); len >= 1 && !matched;
             --len) {
            std::vector<std::string> raw(tokens.begin() + i, tokens.begin() + i + len);
            if (seqs.count(raw)) {
                matched = true;
            } else {
                std::vector<std::string> lem(lemmas.begin() + i, lemmas.begin() + i + len);
                matched = seqs.count(lem) > 0;
            }
            if (matched) {
                spans.push_back({i, i + len});
                i += len;
            }
        }
        if (!matched) ++i;
    }
    return spans;
}

void push_unique(std::vector<std::string>& list, const std::string& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

}  // namespace

KeywordRule compile_keyword_rule(std::string name, const std::vector<std::string>& terms,
                                 const std::vector<std::string>& expansions,
                                 const std::vector<std::string>& blacklist,
                                 const preprocess::Lemmatizer& lemmatizer) {
    KeywordRule rule;
    rule.name = std::move(name);
    for (const auto& t : terms) add_sequences(rule.sequences, rule.max_len, t, lemmatizer);
    for (const auto& t : expansions) add_sequences(rule.sequences, rule.max_len, t, lemmatizer);
    for (const auto& t : blacklist) {
        add_sequences(rule.veto_sequences, rule.veto_max_len, t, lemmatizer);
    }
    return rule;
}

TrialClassification classify_trial(const Trial& trial, const dict::DrugDictionary& dict,
                                   const KeywordRule& vaccine, const KeywordRule& biologic,
                                   const std::unordered_set<std::string>& nondrug_filter,
                                   const preprocess::Lemmatizer& lemmatizer) {
    TrialClassification out;
    out.trial_id = trial.trial_id;

    auto tokens = preprocess::tokenize(trial.description_norm);
    std::vector<std::string> lemmas;
    lemmas.reserve(tokens.size());
    for (const auto& t : tokens) lemmas.push_back(lemmatizer.lemma(t));

    for (const auto& m : dict::match_terms(tokens, dict)) {
        if (nondrug_filter.count(m.surface) || nondrug_filter.count(m.canonical)) continue;
        out.categories.insert(Category::drug);
        push_unique(out.witnesses[Category::drug], m.surface);
        push_unique(out.drug_canonicals, m.canonical);
    }
    std::sort(out.drug_canonicals.begin(), out.drug_canonicals.end());

    for (const KeywordRule* rule : {&vaccine, &biologic}) {
        Category cat = rule == &vaccine ? Category::vaccine : Category::biologic;
        if (!match_sequences(tokens, lemmas, rule->veto_sequences, rule->veto_max_len).empty()) {
            continue;
        }
        for (const auto& span : match_sequences(tokens, lemmas, rule->sequences, rule->max_len)) {
            std::string text;
            for (std::size_t i = span.begin; i < span.end; ++i) {
                if (i > span.begin) text += ' ';
                text += tokens[i];
            }
            out.categories.insert(cat);
            push_unique(out.witnesses[cat], text);
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::size_t>> drug_trial_counts(
    const std::vector<TrialClassification>& classifications) {
    std::map<std::string, std::size_t> counts;
    for (const auto& c : classifications) {
        for (const auto& drug : c.drug_canonicals) ++counts[drug];
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

std::vector<std::pair<std::string, std::size_t>> term_frequencies(
    const std::vector<Trial>& trials, const std::vector<TrialClassification>& classifications,
    Category category, const std::unordered_set<std::string>& stopwords) {
    std::unordered_set<std::string> in_category;
    for (const auto& c : classifications) {
        if (c.has(category)) in_category.insert(c.trial_id);
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& t : trials) {
        if (!in_category.count(t.trial_id)) continue;
        for (const auto& tok : preprocess::tokenize(t.description_norm)) {
            if (!stopwords.count(tok)) ++counts[tok];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

nlohmann::json trial_to_json(const Trial& t) {
    nlohmann::json j;
    j["trial_id"] = t.trial_id;
    j["title"] = t.title;
    j["description"] = t.description_norm;
    if (t.date_registered) j["date"] = t.date_registered->to_string();
    if (!t.phase.empty()) j["phase"] = t.phase;
    return j;
}

Trial trial_from_json(const nlohmann::json& j) {
    Trial t;
    t.trial_id = j.at("trial_id").get<std::string>();
    t.title = j.value("title", "");
    t.description_norm = corpus::normalize_text(j.value("description", ""));
    if (j.contains("date")) {
        if (auto d = Date::parse(j["date"].get<std::string>())) t.date_registered = *d;
    }
    t.phase = j.value("phase", "");
    return t;
}

nlohmann::json classification_to_json(const TrialClassification& c) {
    nlohmann::json j;
    j["trial_id"] = c.trial_id;
    nlohmann::json cats = nlohmann::json::array();
    nlohmann::json wits = nlohmann::json::object();
    for (Category cat : c.categories) {
        cats.push_back(std::string(category_name(cat)));
        auto it = c.witnesses.find(cat);
        wits[std::string(category_name(cat))] =
            it == c.witnesses.end() ? std::vector<std::string>{} : it->second;
    }
    j["categories"] = cats;
    j["witnesses"] = wits;
    j["drug_canonicals"] = c.drug_canonicals;
    return j;
}

TrialClassification classification_from_json(const nlohmann::json& j) {
    TrialClassification c;
    c.trial_id = j.at("trial_id").get<std::string>();
    for (const auto& name : j.value("categories", std::vector<std::string>{})) {
        if (auto cat = category_from_name(name)) {
            c.categories.insert(*cat);
            if (j.contains("witnesses") && j["witnesses"].contains(name)) {
                c.witnesses[*cat] = j["witnesses"][name].get<std::vector<std::string>>();
            }
        }
    }
    c.drug_canonicals = j.value("drug_canonicals", std::vector<std::string>{});
    return c;
}

}  // namespace litmine::trials
