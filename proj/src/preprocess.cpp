#include "litmine/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "json.hpp"
#include "litmine/util.hpp"

namespace litmine::preprocess {

namespace {

const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> kAbbrevs = {
        "e.g.", "i.e.", "etc.", "vs.", "al.", "et.", "fig.", "figs.", "eq.", "eqs.",
        "ref.", "refs.", "no.", "approx.", "ca.", "resp.", "cf.", "inc.", "sp.", "spp.",
    };
    return kAbbrevs;
}

bool is_abbreviation_at(std::string_view s, std::size_t dot, std::size_t sent_start) {
    std::size_t word_start = sent_start;
    for (std::size_t k = dot; k > sent_start; --k) {
        if (s[k - 1] == ' ') {
            word_start = k;
            break;
        }
    }
    std::string word(s.substr(word_start, dot - word_start + 1));
    return abbreviations().count(word) > 0;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view s) {
    std::vector<Sentence> sentences;
    auto emit = [&](std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        Sentence sent;
        sent.begin = begin;
        sent.end = end;
        sent.text = std::string(s.substr(begin, end - begin));
        sent.tokens = tokenize(sent.text);
        sentences.push_back(std::move(sent));
    };

    std::size_t start = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        char c = s[j];
        if (c != '.' && c != '!' && c != '?') continue;
        bool at_end = (j + 1 == s.size());
        if (!at_end && s[j + 1] != ' ') continue;
        if (c == '.') {
            bool decimal = j > 0 && j + 1 < s.size() &&
                           std::isdigit(static_cast<unsigned char>(s[j - 1])) &&
                           std::isdigit(static_cast<unsigned char>(s[j + 1]));
            if (decimal || is_abbreviation_at(s, j, start)) continue;
        }
        emit(start, j + 1);
        start = j + 2;  // past the single separator space
        if (at_end) start = s.size();
    }
    if (start < s.size()) emit(start, s.size());
    return sentences;
}

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Edge punctuation; multibyte entries are UTF-8 quotes and dashes.
const std::vector<std::string>& edge_punct() {
    static const std::vector<std::string> kPunct = {
        "(", ")", "[", "]", "{", "}", "\"", "'", "`", ",", ";", ":", "!", "?", "=",
        "/", "%", "…", "“", "”", "‘", "’", "«", "»",
        "–", "—",
    };
    return kPunct;
}

bool strip_front(std::string& t) {
    for (const auto& p : edge_punct()) {
        if (starts_with(t, p)) {
            t.erase(0, p.size());
            return true;
        }
    }
    // Leading '.' or '-' go unless they prefix a number.
    if (!t.empty() && (t[0] == '.' || t[0] == '-') && !(t.size() > 1 && is_ascii_digit(t[1]))) {
        t.erase(0, 1);
        return true;
    }
    return false;
}

bool strip_back(std::string& t) {
    for (const auto& p : edge_punct()) {
        if (ends_with(t, p)) {
            t.erase(t.size() - p.size());
            return true;
        }
    }
    if (!t.empty() && (t.back() == '.' || t.back() == '-')) {
        t.pop_back();
        return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) break;
        std::string tok(text.substr(start, i - start));
        while (strip_front(tok)) {}
        while (strip_back(tok)) {}
        if (!tok.empty()) tokens.push_back(std::move(tok));
    }
    return tokens;
}

namespace {

std::size_t part_count(const std::string& token) {
    return static_cast<std::size_t>(std::count(token.begin(), token.end(), '_')) + 1;
}

struct PairCounts {
    std::unordered_map<std::string, long long> unigrams;
    std::map<std::pair<std::string, std::string>, long long> pairs;

    void add(const std::vector<std::string>& tokens) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ++unigrams[tokens[i]];
            if (i + 1 < tokens.size()) ++pairs[{tokens[i], tokens[i + 1]}];
        }
    }
};

std::vector<std::string> merge_bigrams(const PhraseModel& model,
                                       const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (i + 1 < tokens.size() && model.bigram_scores.count({tokens[i], tokens[i + 1]})) {
            out.push_back(tokens[i] + "_" + tokens[i + 1]);
            i += 2;
        } else {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

}  // namespace

PhraseModel fit_phrases(const std::vector<std::vector<std::string>>& corpus, int min_count,
                        double threshold) {
    if (corpus.empty()) throw std::invalid_argument("fit_phrases: empty corpus");

    PhraseModel model;
    model.min_count = min_count;
    model.threshold = threshold;

    PairCounts first;
    for (const auto& doc : corpus) first.add(doc);
    const double vocab_size = static_cast<double>(first.unigrams.size());
    for (const auto& [pair, count] : first.pairs) {
        if (count < min_count) continue;
        double score = static_cast<double>(count - min_count) * vocab_size /
                       (static_cast<double>(first.unigrams.at(pair.first)) *
                        static_cast<double>(first.unigrams.at(pair.second)));
        if (score >= threshold) model.bigram_scores[pair] = score;
    }

    // Second pass over the bigram-merged corpus picks up trigrams.
    PairCounts second;
    for (const auto& doc : corpus) second.add(merge_bigrams(model, doc));
    const double merged_vocab = static_cast<double>(second.unigrams.size());
    for (const auto& [pair, count] : second.pairs) {
        if (part_count(pair.first) + part_count(pair.second) != 3) continue;
        if (count < min_count) continue;
        double score = static_cast<double>(count - min_count) * merged_vocab /
                       (static_cast<double>(second.unigrams.at(pair.first)) *
                        static_cast<double>(second.unigrams.at(pair.second)));
        if (score < threshold) continue;
        auto parts = split(pair.first + "_" + pair.second, '_');
        model.trigram_scores[{parts[0], parts[1], parts[2]}] = score;
    }
    return model;
}

std::vector<std::string> apply_phrases(const PhraseModel& model,
                                       const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (i + 2 < tokens.size() &&
            model.trigram_scores.count({tokens[i], tokens[i + 1], tokens[i + 2]})) {
            out.push_back(tokens[i] + "_" + tokens[i + 1] + "_" + tokens[i + 2]);
            i += 3;
        } else if (i + 1 < tokens.size() &&
                   model.bigram_scores.count({tokens[i], tokens[i + 1]})) {
            out.push_back(tokens[i] + "_" + tokens[i + 1]);
            i += 2;
        } else {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

void save_phrases(const PhraseModel& model, const std::filesystem::path& p) {
    nlohmann::json j;
    j["min_count"] = model.min_count;
    j["threshold"] = model.threshold;
    nlohmann::json bigrams = nlohmann::json::array();
    for (const auto& [pair, score] : model.bigram_scores) {
        bigrams.push_back({pair.first, pair.second, score});
    }
    nlohmann::json trigrams = nlohmann::json::array();
    for (const auto& [triple, score] : model.trigram_scores) {
        trigrams.push_back({std::get<0>(triple), std::get<1>(triple), std::get<2>(triple), score});
    }
    j["bigrams"] = bigrams;
    j["trigrams"] = trigrams;
    atomic_write(p, j.dump(2) + "\n");
}

PhraseModel load_phrases(const std::filesystem::path& p) {
    nlohmann::json j = nlohmann::json::parse(read_file(p));
    PhraseModel model;
    model.min_count = j.value("min_count", 5);
    model.threshold = j.value("threshold", 10.0);
    for (const auto& e : j.value("bigrams", nlohmann::json::array())) {
        model.bigram_scores[{e.at(0).get<std::string>(), e.at(1).get<std::string>()}] =
            e.at(2).get<double>();
    }
    for (const auto& e : j.value("trigrams", nlohmann::json::array())) {
        model.trigram_scores[{e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                              e.at(2).get<std::string>()}] = e.at(3).get<double>();
    }
    return model;
}

Lemmatizer::Lemmatizer() {
    static const std::pair<const char*, const char*> kBuiltins[] = {
        {"viruses", "virus"},       {"coronaviruses", "coronavirus"},
        {"analyses", "analysis"},   {"diagnoses", "diagnosis"},
        {"hypotheses", "hypothesis"}, {"prognoses", "prognosis"},
        {"crises", "crisis"},       {"statuses", "status"},
        {"children", "child"},      {"women", "woman"},
        {"men", "man"},             {"mice", "mouse"},
        {"feet", "foot"},           {"criteria", "criterion"},
        {"species", "species"},     {"series", "series"},
        {"sars", "sars"},           {"mers", "mers"},
        {"aids", "aids"},           {"news", "news"},
        {"based", "base"},          {"used", "use"},
        {"using", "use"},           {"caused", "cause"},
        {"causing", "cause"},       {"increased", "increase"},
        {"increasing", "increase"}, {"reduced", "reduce"},
        {"reducing", "reduce"},     {"decreased", "decrease"},
        {"decreasing", "decrease"}, {"changed", "change"},
        {"changing", "change"},     {"compared", "compare"},
        {"comparing", "compare"},   {"improved", "improve"},
        {"improving", "improve"},   {"observed", "observe"},
        {"observing", "observe"},   {"required", "require"},
        {"requiring", "require"},   {"measured", "measure"},
        {"measuring", "measure"},   {"died", "die"},
        {"dying", "die"},
    };
    for (const auto& [k, v] : kBuiltins) exceptions_[k] = v;
}

void Lemmatizer::add_exception(std::string surface, std::string lemma) {
    exceptions_[std::move(surface)] = std::move(lemma);
}

void Lemmatizer::load_exceptions(const std::filesystem::path& p) {
    for (const auto& line : read_lines(p)) {
        if (trim(line).empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() < 2) continue;
        add_exception(std::string(trim(cols[0])), std::string(trim(cols[1])));
    }
}

namespace {

bool has_vowel(std::string_view s) {
    return s.find_first_of("aeiouy") != std::string_view::npos;
}

// running -> runn -> run; falling -> fall (l is never undoubled)
void undouble(std::string& s) {
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) {
        char c = s.back();
        if (c != 'l' && c != 's' && c != 'z') s.pop_back();
    }
}

}  // namespace

std::string Lemmatizer::lemma(const std::string& token) const {
    auto it = exceptions_.find(token);
    if (it != exceptions_.end()) return it->second;

    const std::size_t n = token.size();
    if (n >= 5 && ends_with(token, "ies")) {
        return token.substr(0, n - 3) + "y";
    }
    if (n >= 5 && ends_with(token, "sses")) {
        return token.substr(0, n - 2);
    }
    if (n >= 4 && token.back() == 's' && !ends_with(token, "ss") && !ends_with(token, "us") &&
        !ends_with(token, "is")) {
        return token.substr(0, n - 1);
    }
    if (n >= 6 && ends_with(token, "ing")) {
        std::string stem = token.substr(0, n - 3);
        undouble(stem);
        if (has_vowel(stem)) return stem;
        return token;
    }
    if (n >= 5 && ends_with(token, "ed")) {
        std::string stem = token.substr(0, n - 2);
        undouble(stem);
        if (has_vowel(stem)) return stem;
        return token;
    }
    return token;
}

std::vector<std::string> lemmatize_and_filter(const std::vector<std::string>& tokens,
                                              const std::unordered_set<std::string>& stopwords,
                                              const Lemmatizer& lemmatizer) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (stopwords.count(tok)) continue;
        std::string lemma = lemmatizer.lemma(tok);
        if (lemma.size() < 3 &&
            std::none_of(lemma.begin(), lemma.end(), [](char c) { return is_ascii_digit(c); })) {
            continue;
        }
        out.push_back(std::move(lemma));
    }
    return out;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& p) {
    std::unordered_set<std::string> words;
    for (const auto& line : read_lines(p)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        words.emplace(t);
    }
    return words;
}

std::size_t BagOfWords::total() const {
    std::size_t sum = 0;
    for (const auto& [idx, count] : counts) sum += static_cast<std::size_t>(count);
    return sum;
}

VocabResult build_vocab_and_bows(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs, int min_df,
    double max_df) {
    VocabResult result;
    const double n_docs = static_cast<double>(docs.size());

    std::map<std::string, int> df;
    for (const auto& [id, tokens] : docs) {
        std::unordered_set<std::string> uniq(tokens.begin(), tokens.end());
        for (const auto& t : uniq) ++df[t];
    }
    std::unordered_map<std::string, int> index;
    for (const auto& [token, count] : df) {
        if (count < min_df) continue;
        if (static_cast<double>(count) > max_df * n_docs) continue;
        index.emplace(token, static_cast<int>(result.vocab.size()));
        result.vocab.push_back(token);
    }

    for (std::size_t d = 0; d < docs.size(); ++d) {
        BagOfWords bow;
        bow.doc_id = docs[d].first;
        std::map<int, int> counts;
        for (const auto& t : docs[d].second) {
            auto it = index.find(t);
            if (it != index.end()) ++counts[it->second];
        }
        bow.counts.assign(counts.begin(), counts.end());
        if (bow.counts.empty()) result.empty_docs.push_back(d);
        result.bows.push_back(std::move(bow));
    }
    return result;
}

}  // namespace litmine::preprocess
