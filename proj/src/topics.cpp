#include "litmine/topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "litmine/util.hpp"

namespace litmine::topics {

namespace {

using preprocess::BagOfWords;

struct TokenInstance {
    int doc = 0;
    int word = 0;
};

std::vector<TokenInstance> expand_instances(const std::vector<BagOfWords>& bows) {
    std::vector<TokenInstance> instances;
    for (std::size_t d = 0; d < bows.size(); ++d) {
        for (auto [w, c] : bows[d].counts) {
            for (int i = 0; i < c; ++i) instances.push_back({static_cast<int>(d), w});
        }
    }
    return instances;
}

int sample_from(const std::vector<double>& weights, double total, DetRng& rng) {
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

LdaModel train_lda(const std::vector<BagOfWords>& bows, const std::vector<std::string>& vocab,
                   int K, double alpha, double beta, int iterations, std::uint64_t seed) {
    if (K < 2) throw std::invalid_argument("topic count must be at least 2");
    if (bows.empty()) throw std::runtime_error("cannot train on an empty corpus");
    for (const auto& b : bows) {
        if (b.total() == 0) {
            throw std::runtime_error("empty bag of words for doc '" + b.doc_id + "'");
        }
    }

    const int D = static_cast<int>(bows.size());
    const int V = static_cast<int>(vocab.size());
    auto instances = expand_instances(bows);

    std::vector<int> n_dk(static_cast<std::size_t>(D) * K, 0);
    std::vector<int> n_kw(static_cast<std::size_t>(K) * V, 0);
    std::vector<int> n_k(K, 0);
    std::vector<int> z(instances.size());

    DetRng rng(seed);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        int k = static_cast<int>(rng.below(K));
        z[i] = k;
        ++n_dk[instances[i].doc * static_cast<std::size_t>(K) + k];
        ++n_kw[static_cast<std::size_t>(k) * V + instances[i].word];
        ++n_k[k];
    }

    const double vbeta = V * beta;
    std::vector<double> p(K);
    for (int sweep = 0; sweep < iterations; ++sweep) {
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const int d = instances[i].doc;
            const int w = instances[i].word;
            int k = z[i];
            --n_dk[d * static_cast<std::size_t>(K) + k];
            --n_kw[static_cast<std::size_t>(k) * V + w];
            --n_k[k];

            double total = 0.0;
            for (int t = 0; t < K; ++t) {
                p[t] = (n_dk[d * static_cast<std::size_t>(K) + t] + alpha) *
                       (n_kw[static_cast<std::size_t>(t) * V + w] + beta) / (n_k[t] + vbeta);
                total += p[t];
            }
            k = sample_from(p, total, rng);
            z[i] = k;
            ++n_dk[d * static_cast<std::size_t>(K) + k];
            ++n_kw[static_cast<std::size_t>(k) * V + w];
            ++n_k[k];
        }
    }

    LdaModel model;
    model.K = K;
    model.vocab = vocab;
    model.alpha = alpha;
    model.beta = beta;
    model.seed = seed;
    model.iterations = iterations;
    model.topic_word.assign(K, std::vector<double>(V, 0.0));
    for (int k = 0; k < K; ++k) {
        const double denom = n_k[k] + vbeta;
        for (int w = 0; w < V; ++w) {
            model.topic_word[k][w] = (n_kw[static_cast<std::size_t>(k) * V + w] + beta) / denom;
        }
    }
    return model;
}

std::vector<int> top_word_indices(const LdaModel& model, int topic, int top_n) {
    const auto& row = model.topic_word[topic];
    std::vector<int> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    });
    if (static_cast<int>(order.size()) > top_n) order.resize(top_n);
    return order;
}

double coherence_umass(const LdaModel& model, const std::vector<preprocess::BagOfWords>& bows,
                       int top_n) {
    if (top_n < 2) throw std::invalid_argument("coherence needs at least 2 top words");

    // Sorted doc lists per word make pair co-occurrence a merge.
    std::unordered_map<int, std::vector<int>> docs_with;
    for (std::size_t d = 0; d < bows.size(); ++d) {
        for (auto [w, c] : bows[d].counts) {
            if (c > 0) docs_with[w].push_back(static_cast<int>(d));
        }
    }
    auto co_count = [&](int a, int b) {
        auto ia = docs_with.find(a), ib = docs_with.find(b);
        if (ia == docs_with.end() || ib == docs_with.end()) return 0;
        const auto &va = ia->second, &vb = ib->second;
        std::size_t i = 0, j = 0;
        int n = 0;
        while (i < va.size() && j < vb.size()) {
            if (va[i] == vb[j]) ++n, ++i, ++j;
            else if (va[i] < vb[j]) ++i;
            else ++j;
        }
        return n;
    };

    double sum = 0.0;
    for (int k = 0; k < model.K; ++k) {
        auto words = top_word_indices(model, k, top_n);
        double topic_score = 0.0;
        for (std::size_t i = 0; i < words.size(); ++i) {
            for (std::size_t j = i + 1; j < words.size(); ++j) {
                auto it = docs_with.find(words[j]);
                int dj = it == docs_with.end() ? 0 : static_cast<int>(it->second.size());
                if (dj == 0) continue;  // word absent from these bags
                topic_score += std::log((co_count(words[i], words[j]) + 1.0) / dj);
            }
        }
        sum += topic_score;
    }
    return sum / model.K;
}

GridResult grid_search_k(const std::vector<preprocess::BagOfWords>& bows,
                         const std::vector<std::string>& vocab, const std::vector<int>& k_grid,
                         const LdaConfig& config) {
    if (k_grid.empty()) throw std::invalid_argument("empty K grid");
    std::vector<int> grid = k_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    GridResult result;
    bool have_best = false;
    double best_score = 0.0;
    for (int K : grid) {
        LdaModel model = train_lda(bows, vocab, K, config.alpha_for(K), config.beta,
                                   config.iterations, config.seed);
        double score = coherence_umass(model, bows, config.top_n);
        result.curve.emplace_back(K, score);
        if (!have_best || score > best_score) {
            have_best = true;
            best_score = score;
            result.best = std::move(model);
        }
    }
    return result;
}

preprocess::BagOfWords restrict_to_vocab(const std::string& doc_id,
                                         const std::vector<std::string>& lemmas,
                                         const LdaModel& model) {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < model.vocab.size(); ++i) index[model.vocab[i]] = static_cast<int>(i);
    std::map<int, int> counts;
    for (const auto& t : lemmas) {
        auto it = index.find(t);
        if (it != index.end()) ++counts[it->second];
    }
    preprocess::BagOfWords bow;
    bow.doc_id = doc_id;
    bow.counts.assign(counts.begin(), counts.end());
    return bow;
}

DocTopicAssignment infer_doc_topics(const LdaModel& model, const preprocess::BagOfWords& bow,
                                    const LdaConfig& config) {
    const int K = model.K;
    DocTopicAssignment out;
    out.doc_id = bow.doc_id;

    if (bow.total() == 0) {
        out.distribution.assign(K, 1.0 / K);
        out.top_topic = 0;
        out.weight = 1.0 / K;
        out.uniform_fallback = true;
        return out;
    }

    std::vector<int> words;
    for (auto [w, c] : bow.counts) {
        for (int i = 0; i < c; ++i) words.push_back(w);
    }

    const double alpha = model.alpha;
    DetRng rng(model.seed ^ fnv1a64(bow.doc_id));
    std::vector<int> n_k(K, 0);
    std::vector<int> z(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        int k = static_cast<int>(rng.below(K));
        z[i] = k;
        ++n_k[k];
    }

    std::vector<double> p(K);
    for (int sweep = 0; sweep < config.infer_iterations; ++sweep) {
        for (std::size_t i = 0; i < words.size(); ++i) {
            int k = z[i];
            --n_k[k];
            double total = 0.0;
            for (int t = 0; t < K; ++t) {
                p[t] = (n_k[t] + alpha) * model.topic_word[t][words[i]];
                total += p[t];
            }
            k = sample_from(p, total, rng);
            z[i] = k;
            ++n_k[k];
        }
    }

    out.distribution.resize(K);
    const double denom = static_cast<double>(words.size()) + K * alpha;
    for (int k = 0; k < K; ++k) out.distribution[k] = (n_k[k] + alpha) / denom;
    out.top_topic = static_cast<int>(
        std::max_element(out.distribution.begin(), out.distribution.end()) -
        out.distribution.begin());
    out.weight = out.distribution[out.top_topic];
    return out;
}

std::set<int> filter_small_topics(const std::vector<DocTopicAssignment>& assignments, int K) {
    std::vector<std::size_t> counts(K, 0);
    for (const auto& a : assignments) {
        if (a.top_topic >= 0 && a.top_topic < K) ++counts[a.top_topic];
    }
    const double cutoff = static_cast<double>(assignments.size()) / K / 5.0;
    std::set<int> kept;
    for (int k = 0; k < K; ++k) {
        if (static_cast<double>(counts[k]) >= cutoff) kept.insert(k);
    }
    return kept;
}

std::map<int, std::vector<DocTopicAssignment>> recommend_top_papers(
    const std::vector<DocTopicAssignment>& assignments, const std::set<int>& kept_topics,
    std::size_t k) {
    std::map<int, std::vector<DocTopicAssignment>> by_topic;
    for (const auto& a : assignments) {
        if (kept_topics.count(a.top_topic)) by_topic[a.top_topic].push_back(a);
    }
    for (auto& [topic, docs] : by_topic) {
        std::sort(docs.begin(), docs.end(), [](const DocTopicAssignment& a,
                                               const DocTopicAssignment& b) {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.doc_id < b.doc_id;
        });
        if (docs.size() > k) docs.resize(k);
    }
    return by_topic;
}

std::vector<TopicReport> topic_reports(const LdaModel& model,
                                       const std::vector<DocTopicAssignment>& assignments,
                                       const std::map<int, std::string>& labels, int top_n) {
    std::vector<std::size_t> counts(model.K, 0);
    for (const auto& a : assignments) {
        if (a.top_topic >= 0 && a.top_topic < model.K) ++counts[a.top_topic];
    }
    auto kept = filter_small_topics(assignments, model.K);

    std::vector<TopicReport> reports;
    for (int k = 0; k < model.K; ++k) {
        TopicReport r;
        r.topic_id = k;
        for (int w : top_word_indices(model, k, top_n)) r.top_words.push_back(model.vocab[w]);
        if (auto it = labels.find(k); it != labels.end()) r.label = it->second;
        r.paper_count = counts[k];
        r.kept = kept.count(k) > 0;
        reports.push_back(std::move(r));
    }
    return reports;
}

void save_model(const LdaModel& model, const std::filesystem::path& p) {
    nlohmann::json j;
    j["version"] = 1;
    j["k"] = model.K;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["iterations"] = model.iterations;
    j["seed"] = model.seed;
    j["vocab"] = model.vocab;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(model.K) * model.vocab.size());
    for (const auto& row : model.topic_word) flat.insert(flat.end(), row.begin(), row.end());
    j["topic_word"] = flat;
    atomic_write(p, j.dump(2) + "\n");
}

LdaModel load_model(const std::filesystem::path& p) {
    nlohmann::json j = nlohmann::json::parse(read_file(p));
    LdaModel model;
    model.K = j.at("k").get<int>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.iterations = j.at("iterations").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.vocab = j.at("vocab").get<std::vector<std::string>>();
    auto flat = j.at("topic_word").get<std::vector<double>>();
    const std::size_t V = model.vocab.size();
    if (flat.size() != static_cast<std::size_t>(model.K) * V) {
        throw std::runtime_error("model artifact is inconsistent: " + p.string());
    }
    model.topic_word.assign(model.K, std::vector<double>(V));
    for (int k = 0; k < model.K; ++k) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(k * V),
                  flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * V),
                  model.topic_word[k].begin());
    }
    return model;
}

void save_assignments(const std::vector<DocTopicAssignment>& assignments,
                      const std::filesystem::path& p) {
    std::string out;
    for (const auto& a : assignments) {
        nlohmann::json j;
        j["doc_id"] = a.doc_id;
        j["distribution"] = a.distribution;
        j["top_topic"] = a.top_topic;
        j["weight"] = a.weight;
        if (a.uniform_fallback) j["uniform_fallback"] = true;
        out += j.dump();
        out += '\n';
    }
    atomic_write(p, out);
}

std::vector<DocTopicAssignment> load_assignments(const std::filesystem::path& p) {
    std::vector<DocTopicAssignment> assignments;
    if (!std::filesystem::exists(p)) return assignments;
    for (const auto& line : read_lines(p)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        DocTopicAssignment a;
        a.doc_id = j.at("doc_id").get<std::string>();
        a.distribution = j.at("distribution").get<std::vector<double>>();
        a.top_topic = j.at("top_topic").get<int>();
        a.weight = j.at("weight").get<double>();
        a.uniform_fallback = j.value("uniform_fallback", false);
        assignments.push_back(std::move(a));
    }
    return assignments;
}

std::map<int, std::string> load_topic_labels(const std::filesystem::path& p) {
    std::map<int, std::string> labels;
    if (!std::filesystem::exists(p)) return labels;
    for (const auto& line : read_lines(p)) {
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cols = split(t, '\t');
        if (cols.size() < 2) continue;
        try {
            labels[std::stoi(cols[0])] = std::string(trim(cols[1]));
        } catch (const std::exception&) {
            // non-numeric id (header row); skip
        }
    }
    return labels;
}

}  // namespace litmine::topics
