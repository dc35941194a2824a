#include "litmine/preclinical.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "litmine/util.hpp"

namespace litmine::preclinical {

std::string_view assay_name(Assay a) {
    switch (a) {
        case Assay::ec50: return "ec50";
        case Assay::ic50: return "ic50";
        case Assay::cc50: break;
    }
    return "cc50";
}

std::string assay_label(Assay a) {
    std::string s(assay_name(a));
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    s[1] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[1])));
    return s;
}

std::optional<Assay> assay_from_name(std::string_view name) {
    if (name == "ec50" || name == "EC50") return Assay::ec50;
    if (name == "ic50" || name == "IC50") return Assay::ic50;
    if (name == "cc50" || name == "CC50") return Assay::cc50;
    return std::nullopt;
}

AssaySet all_assays() { return {Assay::ec50, Assay::ic50, Assay::cc50}; }

std::optional<Assay> keyword_hit(std::string_view token, const AssaySet& keywords) {
    for (Assay a : keywords) {
        std::string_view name = assay_name(a);
        if (!starts_with(token, name)) continue;
        std::string_view rest = token.substr(name.size());
        if (rest.empty() || rest == "s" || rest[0] == '=' || rest[0] == ':') return a;
    }
    return std::nullopt;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Plain number: optional sign, digits with one optional '.', optional e-exponent.
std::optional<double> parse_plain_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    if (i >= s.size() || (!is_digit(s[i]) && s[i] != '.')) return std::nullopt;
    bool any_digit = false, seen_dot = false;
    while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) {
        if (s[i] == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else {
            any_digit = true;
        }
        ++i;
    }
    if (!any_digit) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        if (i >= s.size() || !is_digit(s[i])) return std::nullopt;
        while (i < s.size() && is_digit(s[i])) ++i;
    }
    if (i != s.size()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

const std::vector<std::string>& comparator_prefixes() {
    static const std::vector<std::string> kPrefixes = {
        "<=", ">=", "≤", "≥", "≈", "±", "<", ">", "~",
    };
    return kPrefixes;
}

}  // namespace

std::optional<NumericValue> parse_numeric(std::string_view token) {
    std::string comparator;
    for (const auto& p : comparator_prefixes()) {
        if (starts_with(token, p)) {
            comparator = p;
            token = token.substr(p.size());
            break;
        }
    }
    if (auto v = parse_plain_number(token)) {
        return NumericValue{*v, std::string(token), comparator};
    }
    // "key=val" exposes its right-hand side.
    auto eq = token.find('=');
    if (eq != std::string_view::npos && eq + 1 < token.size()) {
        std::string_view lhs = token.substr(0, eq);
        std::string_view rhs = token.substr(eq + 1);
        if (!parse_plain_number(lhs)) {
            if (auto v = parse_plain_number(rhs)) {
                return NumericValue{*v, std::string(rhs), comparator};
            }
        }
    }
    return std::nullopt;
}

bool is_unit_token(std::string_view token) {
    static const std::unordered_set<std::string> kUnits = {
        "um", "µm", "μm", "micromolar", "micro", "nm", "nanomolar", "nano",
        "mm", "millimolar", "ng/ml", "ug/ml", "mg/ml",
    };
    return kUnits.count(std::string(token)) > 0;
}

std::optional<double> micromolar_factor(std::string_view unit) {
    static const std::unordered_set<std::string> kMicro = {"um", "µm", "μm",
                                                          "micromolar", "micro"};
    static const std::unordered_set<std::string> kNano = {"nm", "nanomolar", "nano"};
    static const std::unordered_set<std::string> kMilli = {"mm", "millimolar"};
    std::string u(unit);
    if (kMicro.count(u)) return 1.0;
    if (kNano.count(u)) return 1e-3;
    if (kMilli.count(u)) return 1e3;
    return std::nullopt;
}

std::optional<Rule1Result> rule1_extract(const std::vector<std::string>& tokens,
                                         std::size_t keyword_index) {
    std::optional<Rule1Result> best;
    std::size_t best_dist = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::optional<NumericValue> v;
        if (i == keyword_index) {
            // Only the keyword's own "=value" suffix counts, never its "50".
            if (tokens[i].find('=') != std::string::npos) v = parse_numeric(tokens[i]);
        } else {
            v = parse_numeric(tokens[i]);
        }
        if (!v) continue;
        std::size_t dist = i >= keyword_index ? i - keyword_index : keyword_index - i;
        bool better = !best || dist < best_dist ||
                      (dist == best_dist && i > keyword_index && best->value_index < keyword_index);
        if (better) {
            best = Rule1Result{*v, i, ""};
            best_dist = dist;
        }
    }
    if (!best) return std::nullopt;
    for (std::size_t off = 1; off <= 2; ++off) {
        std::size_t idx = best->value_index + off;
        if (idx >= tokens.size()) break;
        if (is_unit_token(tokens[idx])) {
            best->unit = tokens[idx];
            break;
        }
    }
    return best;
}

const ChunkLexicon& ChunkLexicon::defaults() {
    static const ChunkLexicon kDefault = [] {
        ChunkLexicon lex;
        for (const char* w :
             {"a", "an", "the", "this", "that", "these", "those", "its", "their", "our",
              "your", "his", "her", "each", "every", "all", "both", "several", "some",
              "any", "no", "another"}) {
            lex.determiners.insert(w);
        }
        for (const char* w :
             {// prepositions, conjunctions, pronouns
              "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "during",
              "against", "among", "between", "through", "over", "under", "after", "before",
              "above", "below", "up", "down", "off", "out", "about", "than", "as", "per",
              "via", "and", "or", "but", "nor", "so", "yet", "while", "although", "because",
              "if", "when", "where", "which", "who", "whom", "whose", "it", "they", "them",
              "we", "us", "you", "he", "she", "i", "not", "also", "only", "very", "more",
              "most", "less", "least", "such", "here", "there", "then", "thus", "however",
              "respectively",
              // copulas, auxiliaries and common verbs
              "is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
              "had", "do", "does", "did", "can", "could", "may", "might", "must", "shall",
              "should", "will", "would", "show", "shows", "showed", "shown", "inhibit",
              "inhibits", "inhibited", "demonstrate", "demonstrates", "demonstrated",
              "suggest", "suggests", "suggested", "indicate", "indicates", "indicated",
              "exhibit", "exhibits", "exhibited", "display", "displays", "displayed",
              "reveal", "reveals", "revealed", "remain", "remains", "remained", "appear",
              "appears", "appeared", "occur", "occurs", "occurred", "found", "find",
              "finds", "yield", "yields", "yielded", "block", "blocks", "blocked",
              "prevent", "prevents", "prevented", "reduce", "reduces", "reduced",
              "increase", "increases", "increased", "decrease", "decreases", "decreased",
              "report", "reports", "reported", "observe", "observes", "observed"}) {
            lex.excluded.insert(w);
        }
        for (const char* w :
             {"high", "low", "new", "novel", "strong", "weak", "small", "large", "good",
              "poor", "best", "potent", "severe", "mild", "acute", "major", "minor", "key",
              "main", "first", "second", "third", "other", "same", "different", "late",
              "early", "free", "human", "safe"}) {
            lex.modifiers.insert(w);
        }
        return lex;
    }();
    return kDefault;
}

ChunkLexicon ChunkLexicon::with_nominals(const std::vector<std::string>& extra) const {
    ChunkLexicon lex = *this;
    for (const auto& t : extra) lex.nominals.insert(t);
    return lex;
}

namespace {

enum class WordClass { det, mod, nom, other };

WordClass classify(const std::string& t, const ChunkLexicon& lex) {
    if (lex.determiners.count(t)) return WordClass::det;
    if (lex.excluded.count(t)) return WordClass::other;
    if (std::any_of(t.begin(), t.end(), is_digit)) return WordClass::nom;
    if (is_unit_token(t)) return WordClass::nom;
    if (lex.nominals.count(t)) return WordClass::nom;
    if (lex.modifiers.count(t)) return WordClass::mod;
    const std::size_t n = t.size();
    if (n >= 4 && ends_with(t, "ly")) return WordClass::other;
    if (n >= 5 && (ends_with(t, "ing") || ends_with(t, "ed"))) return WordClass::other;
    for (std::string_view suf :
         {"al", "ic", "ive", "ous", "ful", "less", "ent", "ant", "ary", "ory", "able", "ible"}) {
        if (n >= 5 && ends_with(t, suf)) return WordClass::mod;
    }
    return WordClass::nom;
}

}  // namespace

std::vector<NounChunk> extract_noun_chunks(const std::vector<std::string>& tokens,
                                           const ChunkLexicon& lexicon) {
    std::vector<WordClass> cls(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) cls[i] = classify(tokens[i], lexicon);

    std::vector<NounChunk> chunks;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t j = i;
        if (cls[j] == WordClass::det) ++j;
        while (j < tokens.size() && cls[j] == WordClass::mod) ++j;
        std::size_t k = j;
        while (k < tokens.size() && cls[k] == WordClass::nom) ++k;
        if (k > j) {
            chunks.push_back({i, k, k - 1});
            i = k;
        } else {
            ++i;
        }
    }
    return chunks;
}

std::optional<NounChunk> rule2_extract(const std::vector<std::string>& tokens,
                                       std::size_t keyword_index, const ChunkLexicon& lexicon) {
    auto chunks = extract_noun_chunks(tokens, lexicon);
    std::optional<NounChunk> best;
    std::size_t best_gap = 0;
    for (const auto& c : chunks) {
        if (c.contains(keyword_index)) continue;
        std::size_t gap = c.begin > keyword_index ? c.begin - keyword_index - 1
                                                  : keyword_index - c.end;
        bool right = c.begin > keyword_index;
        bool best_right = best && best->begin > keyword_index;
        if (!best || gap < best_gap || (gap == best_gap && right && !best_right)) {
            best = c;
            best_gap = gap;
        }
    }
    return best;
}

std::vector<corpus::Document> filter_assay_abstracts(const std::vector<corpus::Document>& docs,
                                                     const AssaySet& keywords) {
    std::vector<corpus::Document> subset;
    for (const auto& d : docs) {
        auto tokens = preprocess::tokenize(d.abstract_norm);
        bool hit = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
            return keyword_hit(t, keywords).has_value();
        });
        if (hit) subset.push_back(d);
    }
    return subset;
}

namespace {

std::size_t span_distance(std::size_t keyword, std::size_t begin, std::size_t end) {
    if (keyword < begin) return begin - keyword;
    if (keyword >= end) return keyword - end + 1;
    return 0;
}

std::string join_span(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct SentenceScan {
    preprocess::Sentence sentence;
    std::vector<KeywordHit> hits;
    std::vector<dict::TermMatch> drugs;
};

}  // namespace

std::vector<AssayFinding> extract_findings(const corpus::Document& doc,
                                           const dict::DrugDictionary& dict,
                                           const AssaySet& keywords) {
    std::vector<std::string> dict_tokens;
    for (const auto& e : dict.entries) {
        for (auto& t : split(e.surface, ' ')) dict_tokens.push_back(t);
    }
    ChunkLexicon lexicon = ChunkLexicon::defaults().with_nominals(dict_tokens);

    std::vector<SentenceScan> scans;
    auto sentences = preprocess::split_sentences(doc.abstract_norm);
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        SentenceScan scan;
        scan.sentence = sentences[si];
        for (std::size_t ti = 0; ti < scan.sentence.tokens.size(); ++ti) {
            if (auto a = keyword_hit(scan.sentence.tokens[ti], keywords)) {
                scan.hits.push_back({*a, si, ti});
            }
        }
        scan.drugs = dict::match_terms(scan.sentence.tokens, dict);
        scans.push_back(std::move(scan));
    }

    std::vector<AssayFinding> findings;
    std::unordered_set<std::string> emitted;
    auto emit = [&](AssayFinding f) {
        std::string key = f.drug_canonical + "\x1f" + std::string(assay_name(f.assay)) + "\x1f" +
                          (f.value_raw.empty() ? f.chunk_text : f.value_raw);
        if (emitted.insert(key).second) findings.push_back(std::move(f));
    };

    auto fill_value = [](AssayFinding& f, const Rule1Result& r) {
        f.value = r.value.value;
        f.value_raw = r.value.raw;
        f.comparator = r.value.comparator;
        f.unit_raw = r.unit;
        if (!r.unit.empty()) {
            if (auto factor = micromolar_factor(r.unit)) f.value_um = r.value.value * *factor;
        }
    };

    // Direct: keyword and drug in one sentence.
    for (const auto& scan : scans) {
        if (scan.hits.empty() || scan.drugs.empty()) continue;
        const auto& tokens = scan.sentence.tokens;
        for (const auto& hit : scan.hits) {
            const dict::TermMatch* nearest = nullptr;
            std::size_t nearest_dist = 0;
            for (const auto& m : scan.drugs) {
                std::size_t dist = span_distance(hit.token_index, m.token_start, m.token_end);
                bool right = m.token_start > hit.token_index;
                bool cur_right = nearest && nearest->token_start > hit.token_index;
                if (!nearest || dist < nearest_dist ||
                    (dist == nearest_dist && right && !cur_right)) {
                    nearest = &m;
                    nearest_dist = dist;
                }
            }
            AssayFinding f;
            f.doc_id = doc.doc_id;
            f.doi = doc.doi;
            f.drug_canonical = nearest->canonical;
            f.assay = hit.assay;
            f.correlation = Correlation::direct;
            f.evidence_sentence = scan.sentence.text;
            if (auto r1 = rule1_extract(tokens, hit.token_index)) {
                f.rule = RuleUsed::rule1;
                fill_value(f, *r1);
                emit(std::move(f));
            } else if (auto r2 = rule2_extract(tokens, hit.token_index, lexicon)) {
                f.rule = RuleUsed::rule2;
                f.chunk_text = join_span(tokens, r2->begin, r2->end);
                emit(std::move(f));
            }
        }
    }

    // Indirect: keyword sentence without a drug pairs with the nearest
    // drug-bearing sentence; ties go to the earlier sentence.
    for (std::size_t si = 0; si < scans.size(); ++si) {
        const auto& scan = scans[si];
        if (scan.hits.empty() || !scan.drugs.empty()) continue;
        const dict::TermMatch* drug = nullptr;
        std::size_t best_gap = 0;
        for (std::size_t sj = 0; sj < scans.size(); ++sj) {
            if (sj == si || scans[sj].drugs.empty()) continue;
            std::size_t gap = sj > si ? sj - si : si - sj;
            if (!drug || gap < best_gap) {
                drug = &scans[sj].drugs.front();
                best_gap = gap;
            }
        }
        if (!drug) continue;
        for (const auto& hit : scan.hits) {
            auto r1 = rule1_extract(scan.sentence.tokens, hit.token_index);
            if (!r1) continue;
            AssayFinding f;
            f.doc_id = doc.doc_id;
            f.doi = doc.doi;
            f.drug_canonical = drug->canonical;
            f.assay = hit.assay;
            f.correlation = Correlation::indirect;
            f.rule = RuleUsed::rule1;
            f.evidence_sentence = scan.sentence.text;
            fill_value(f, *r1);
            emit(std::move(f));
        }
    }
    return findings;
}

std::vector<TableRow> tabulate_findings(const std::vector<AssayFinding>& findings) {
    struct Sortable {
        TableRow row;
        bool known_unit;
        double key;
    };
    std::vector<Sortable> rows;
    for (const auto& f : findings) {
        if (!f.value) continue;
        TableRow row;
        row.drug = f.drug_canonical;
        row.assay = assay_label(f.assay);
        row.value = f.comparator + f.value_raw;
        row.unit = f.unit_raw;
        if (f.value_um) row.value_um = fmt_double(*f.value_um);
        rows.push_back({std::move(row), f.value_um.has_value(),
                        f.value_um ? *f.value_um : *f.value});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Sortable& a, const Sortable& b) {
        if (a.known_unit != b.known_unit) return a.known_unit;
        return a.key < b.key;
    });
    std::vector<TableRow> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(std::move(r.row));
    return out;
}

std::string findings_tsv_header() {
    return "doc_id\tdoi\tdrug\tassay\tvalue_raw\tunit_raw\tvalue_um\tcorrelation\trule\t"
           "evidence_sentence\tchunk_text\n";
}

std::string finding_to_tsv(const AssayFinding& f) {
    std::string line;
    auto add = [&](std::string_view cell, bool last = false) {
        line += sanitize_cell(cell);
        line += last ? '\n' : '\t';
    };
    add(f.doc_id);
    add(f.doi);
    add(f.drug_canonical);
    add(assay_label(f.assay));
    add(f.comparator + f.value_raw);
    add(f.unit_raw);
    add(f.value_um ? fmt_double(*f.value_um) : "");
    add(f.correlation == Correlation::direct ? "direct" : "indirect");
    add(f.rule == RuleUsed::rule1 ? "rule1" : "rule2");
    add(f.evidence_sentence);
    add(f.chunk_text, true);
    return line;
}

std::vector<AssayFinding> load_findings_tsv(const std::filesystem::path& p) {
    std::vector<AssayFinding> findings;
    if (!std::filesystem::exists(p)) return findings;
    bool first = true;
    for (const auto& line : read_lines(p)) {
        if (trim(line).empty()) continue;
        if (first) {
            first = false;
            if (starts_with(line, "doc_id\t")) continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() < 11) continue;
        AssayFinding f;
        f.doc_id = cols[0];
        f.doi = cols[1];
        f.drug_canonical = cols[2];
        if (auto a = assay_from_name(cols[3])) f.assay = *a;
        if (auto v = parse_numeric(cols[4])) {
            f.value = v->value;
            f.value_raw = v->raw;
            f.comparator = v->comparator;
        }
        f.unit_raw = cols[5];
        if (auto v = parse_numeric(cols[6])) f.value_um = v->value;
        f.correlation = cols[7] == "indirect" ? Correlation::indirect : Correlation::direct;
        f.rule = cols[8] == "rule2" ? RuleUsed::rule2 : RuleUsed::rule1;
        f.evidence_sentence = cols[9];
        f.chunk_text = cols[10];
        findings.push_back(std::move(f));
    }
    return findings;
}

void append_findings_tsv(const std::filesystem::path& p,
                         const std::vector<AssayFinding>& findings) {
    const bool fresh = !std::filesystem::exists(p);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::app);
    if (!out) throw std::runtime_error("cannot open findings file: " + p.string());
    if (fresh) out << findings_tsv_header();
    for (const auto& f : findings) out << finding_to_tsv(f);
}

}  // namespace litmine::preclinical
