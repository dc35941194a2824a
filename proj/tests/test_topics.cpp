#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "litmine/topics.hpp"
#include "litmine/util.hpp"
#include "support/oracles.hpp"

using namespace litmine;
using preprocess::BagOfWords;
using topics::DocTopicAssignment;
using topics::LdaConfig;
using topics::LdaModel;

namespace {

BagOfWords bag(std::string doc_id, std::vector<std::pair<int, int>> counts) {
    BagOfWords b;
    b.doc_id = std::move(doc_id);
    b.counts = std::move(counts);
    return b;
}

// Two disjoint three-word clusters; doc i draws 30 tokens from its own side.
struct ClusterCorpus {
    std::vector<std::string> vocab = {"c0a", "c0b", "c0c", "c1a", "c1b", "c1c"};
    std::vector<BagOfWords> bows;
    std::vector<int> truth;

    ClusterCorpus() {
        for (int i = 0; i < 30; ++i) {
            int side = i % 2;
            int base = side * 3;
            bows.push_back(bag("doc" + std::to_string(i),
                               {{base, 10}, {base + 1, 10}, {base + 2, 10}}));
            truth.push_back(side);
        }
    }
};

}  // namespace

TEST_CASE("alpha defaults to one over K") {
    LdaConfig c;
    CHECK(c.alpha_for(4) == doctest::Approx(0.25));
    c.alpha = 0.3;
    CHECK(c.alpha_for(4) == doctest::Approx(0.3));
}

TEST_CASE("training rejects bad input") {
    ClusterCorpus cc;
    CHECK_THROWS_AS(topics::train_lda(cc.bows, cc.vocab, 1, 0.5, 0.01, 5, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(topics::train_lda({}, cc.vocab, 2, 0.5, 0.01, 5, 1), std::runtime_error);

    auto with_empty = cc.bows;
    with_empty.push_back(bag("hollow", {}));
    CHECK_THROWS_WITH_AS(topics::train_lda(with_empty, cc.vocab, 2, 0.5, 0.01, 5, 1),
                         "empty bag of words for doc 'hollow'", std::runtime_error);
}

TEST_CASE("topic-word rows are distributions and training is reproducible") {
    ClusterCorpus cc;
    auto m1 = topics::train_lda(cc.bows, cc.vocab, 3, 0.5, 0.01, 60, 1234);
    auto m2 = topics::train_lda(cc.bows, cc.vocab, 3, 0.5, 0.01, 60, 1234);

    REQUIRE(m1.K == 3);
    REQUIRE(m1.topic_word.size() == 3);
    for (const auto& row : m1.topic_word) {
        REQUIRE(row.size() == cc.vocab.size());
        double sum = 0.0;
        for (double v : row) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }

    // bit-identical across reruns with the same seed
    for (int k = 0; k < 3; ++k) {
        for (std::size_t w = 0; w < cc.vocab.size(); ++w) {
            CHECK(m1.topic_word[k][w] == m2.topic_word[k][w]);
        }
    }

    auto m3 = topics::train_lda(cc.bows, cc.vocab, 3, 0.5, 0.01, 60, 4321);
    bool all_equal = true;
    for (int k = 0; k < 3; ++k) {
        for (std::size_t w = 0; w < cc.vocab.size(); ++w) {
            all_equal &= m1.topic_word[k][w] == m3.topic_word[k][w];
        }
    }
    CHECK(!all_equal);
}

TEST_CASE("two clean clusters separate under K=2") {
    ClusterCorpus cc;
    auto model = topics::train_lda(cc.bows, cc.vocab, 2, 0.5, 0.01, 150, 7);

    // each topic's top three words come from a single cluster
    std::vector<int> topic_side(2, -1);
    for (int k = 0; k < 2; ++k) {
        auto top = topics::top_word_indices(model, k, 3);
        int side = top[0] / 3;
        for (int w : top) CHECK(w / 3 == side);
        topic_side[k] = side;
    }
    CHECK(topic_side[0] != topic_side[1]);

    LdaConfig cfg;
    cfg.infer_iterations = 50;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < cc.bows.size(); ++i) {
        auto a = topics::infer_doc_topics(model, cc.bows[i], cfg);
        if (topic_side[a.top_topic] == cc.truth[i]) ++agree;
    }
    CHECK(agree == cc.bows.size());
}

TEST_CASE("top words order by probability then vocab index") {
    LdaModel m;
    m.K = 1;
    m.vocab = {"a", "b", "c", "d"};
    m.topic_word = {{0.2, 0.4, 0.2, 0.2}};
    auto top = topics::top_word_indices(m, 0, 4);
    REQUIRE(top.size() == 4);
    CHECK(top[0] == 1);       // highest probability
    CHECK(top[1] == 0);       // 0.2 tie resolves to the smaller index
    CHECK(top[2] == 2);
    CHECK(top[3] == 3);
    CHECK(topics::top_word_indices(m, 0, 2).size() == 2);
    CHECK(topics::top_word_indices(m, 0, 99).size() == 4);
}

TEST_CASE("coherence matches a hand-computed example") {
    // docs_with: a -> {d0,d1}, b -> {d0,d2}, c -> {d2}
    std::vector<BagOfWords> bows = {
        bag("d0", {{0, 1}, {1, 1}}),
        bag("d1", {{0, 1}}),
        bag("d2", {{1, 1}, {2, 1}}),
    };

    LdaModel one;
    one.K = 1;
    one.vocab = {"a", "b", "c"};
    one.topic_word = {{0.5, 0.3, 0.2}};  // top order a, b, c
    // pairs: (a,b) log(2/2)=0, (a,c) log(1/1)=0, (b,c) log(2/1)=log 2
    CHECK(topics::coherence_umass(one, bows, 3) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    LdaModel two = one;
    two.K = 2;
    two.topic_word.push_back({0.2, 0.3, 0.5});  // top order c, b, a
    // second topic: (c,b) 0, (c,a) log(1/2), (b,a) 0 -> topics cancel exactly
    CHECK(topics::coherence_umass(two, bows, 3) == doctest::Approx(0.0).epsilon(1e-12));

    // a word absent from every bag contributes nothing
    LdaModel ghost;
    ghost.K = 1;
    ghost.vocab = {"a", "b", "c", "zzz"};
    ghost.topic_word = {{0.4, 0.3, 0.2, 0.1}};
    CHECK(topics::coherence_umass(ghost, bows, 4) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(topics::coherence_umass(one, bows, 1), std::invalid_argument);
}

TEST_CASE("grid search reports one deterministic score per distinct K") {
    ClusterCorpus cc;
    LdaConfig cfg;
    cfg.iterations = 60;
    cfg.top_n = 3;
    cfg.seed = 99;

    auto result = topics::grid_search_k(cc.bows, cc.vocab, {3, 2, 2, 3}, cfg);
    REQUIRE(result.curve.size() == 2);
    CHECK(result.curve[0].first == 2);
    CHECK(result.curve[1].first == 3);

    // every curve point reproduces from scratch, and the winner is the
    // smallest K among the maxima
    double best_score = result.curve[0].second;
    int best_k = result.curve[0].first;
    for (auto [K, score] : result.curve) {
        auto m = topics::train_lda(cc.bows, cc.vocab, K, cfg.alpha_for(K), cfg.beta,
                                   cfg.iterations, cfg.seed);
        CHECK(topics::coherence_umass(m, cc.bows, cfg.top_n) ==
              doctest::Approx(score).epsilon(1e-12));
        if (score > best_score) {
            best_score = score;
            best_k = K;
        }
    }
    CHECK(result.best.K == best_k);

    CHECK_THROWS_AS(topics::grid_search_k(cc.bows, cc.vocab, {}, cfg), std::invalid_argument);
}

TEST_CASE("new documents restrict to the model vocabulary") {
    LdaModel m;
    m.K = 2;
    m.vocab = {"alpha", "beta", "gamma"};

    auto bow = topics::restrict_to_vocab("doc9", {"beta", "delta", "beta", "alpha"}, m);
    CHECK(bow.doc_id == "doc9");
    REQUIRE(bow.counts.size() == 2);
    CHECK(bow.counts[0] == std::pair<int, int>{0, 1});
    CHECK(bow.counts[1] == std::pair<int, int>{1, 2});
    CHECK(bow.total() == 3);

    CHECK(topics::restrict_to_vocab("none", {"unknown", "words"}, m).counts.empty());
}

TEST_CASE("inference is deterministic and sums to one; empty bags fall back to uniform") {
    ClusterCorpus cc;
    auto model = topics::train_lda(cc.bows, cc.vocab, 2, 0.5, 0.01, 100, 5);

    LdaConfig cfg;
    cfg.infer_iterations = 40;
    auto a = topics::infer_doc_topics(model, cc.bows[0], cfg);
    auto b = topics::infer_doc_topics(model, cc.bows[0], cfg);
    REQUIRE(a.distribution.size() == 2);
    CHECK(a.distribution == b.distribution);
    CHECK(a.top_topic == b.top_topic);
    double sum = a.distribution[0] + a.distribution[1];
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(a.weight == doctest::Approx(std::max(a.distribution[0], a.distribution[1])));
    CHECK(!a.uniform_fallback);

    auto empty = topics::infer_doc_topics(model, bag("void", {}), cfg);
    CHECK(empty.uniform_fallback);
    CHECK(empty.top_topic == 0);
    CHECK(empty.weight == doctest::Approx(0.5));
    CHECK(empty.distribution == std::vector<double>{0.5, 0.5});
}

TEST_CASE("topics below a fifth of the even share are dropped") {
    auto with_counts = [](std::vector<std::size_t> counts) {
        std::vector<DocTopicAssignment> as;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            for (std::size_t i = 0; i < counts[k]; ++i) {
                DocTopicAssignment a;
                a.doc_id = "d" + std::to_string(as.size());
                a.top_topic = static_cast<int>(k);
                as.push_back(a);
            }
        }
        return as;
    };

    // N=30, K=3: cutoff is exactly 2 papers
    auto kept = topics::filter_small_topics(with_counts({1, 2, 27}), 3);
    CHECK(kept == std::set<int>{1, 2});

    // N=25, K=5: cutoff 1, so only unused topics drop
    kept = topics::filter_small_topics(with_counts({1, 0, 10, 14, 0}), 5);
    CHECK(kept == std::set<int>{0, 2, 3});

    // no assignments: cutoff 0 keeps everything
    kept = topics::filter_small_topics({}, 3);
    CHECK(kept == std::set<int>{0, 1, 2});
}

TEST_CASE("recommendations rank by weight, break ties by doc id, truncate") {
    auto mk = [](const char* id, int topic, double w) {
        DocTopicAssignment a;
        a.doc_id = id;
        a.top_topic = topic;
        a.weight = w;
        return a;
    };
    std::vector<DocTopicAssignment> as = {
        mk("c", 0, 0.5), mk("b", 0, 0.9), mk("a", 0, 0.9),
        mk("d", 1, 0.8), mk("e", 2, 0.99),
    };
    auto rec = topics::recommend_top_papers(as, {0, 1}, 2);
    REQUIRE(rec.size() == 2);
    REQUIRE(rec[0].size() == 2);
    CHECK(rec[0][0].doc_id == "a");  // 0.9 tie: lexicographic doc id
    CHECK(rec[0][1].doc_id == "b");
    REQUIRE(rec[1].size() == 1);
    CHECK(rec[1][0].doc_id == "d");
    CHECK(rec.count(2) == 0);  // not a kept topic
}

TEST_CASE("reports carry labels, counts and the kept flag") {
    ClusterCorpus cc;
    auto model = topics::train_lda(cc.bows, cc.vocab, 2, 0.5, 0.01, 100, 5);
    std::vector<DocTopicAssignment> as;
    LdaConfig cfg;
    cfg.infer_iterations = 40;
    for (const auto& b : cc.bows) as.push_back(topics::infer_doc_topics(model, b, cfg));

    auto reports = topics::topic_reports(model, as, {{0, "first"}}, 3);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].topic_id == 0);
    CHECK(reports[0].label == "first");
    CHECK(reports[1].label.empty());
    CHECK(reports[0].paper_count + reports[1].paper_count == cc.bows.size());
    REQUIRE(reports[0].top_words.size() == 3);
    auto kept = topics::filter_small_topics(as, 2);
    CHECK(reports[0].kept == (kept.count(0) > 0));
    CHECK(reports[1].kept == (kept.count(1) > 0));
}

TEST_CASE("model artifacts round-trip exactly") {
    ClusterCorpus cc;
    auto model = topics::train_lda(cc.bows, cc.vocab, 3, 0.4, 0.02, 40, 77);

    testsupport::TempDir tmp;
    auto p = tmp.path() / "model.json";
    topics::save_model(model, p);
    auto back = topics::load_model(p);

    CHECK(back.K == model.K);
    CHECK(back.vocab == model.vocab);
    CHECK(back.alpha == model.alpha);
    CHECK(back.beta == model.beta);
    CHECK(back.seed == model.seed);
    CHECK(back.iterations == model.iterations);
    REQUIRE(back.topic_word.size() == model.topic_word.size());
    for (std::size_t k = 0; k < model.topic_word.size(); ++k) {
        CHECK(back.topic_word[k] == model.topic_word[k]);
    }

    // a truncated weight matrix is rejected
    nlohmann::json j = nlohmann::json::parse(read_file(p));
    auto flat = j["topic_word"].get<std::vector<double>>();
    flat.pop_back();
    j["topic_word"] = flat;
    auto bad = tmp.path() / "bad.json";
    atomic_write(bad, j.dump());
    CHECK_THROWS_AS(topics::load_model(bad), std::runtime_error);
}

TEST_CASE("assignment files round-trip including the fallback flag") {
    DocTopicAssignment a;
    a.doc_id = "doc1";
    a.distribution = {0.75, 0.25};
    a.top_topic = 0;
    a.weight = 0.75;
    DocTopicAssignment b;
    b.doc_id = "doc2";
    b.distribution = {0.5, 0.5};
    b.top_topic = 0;
    b.weight = 0.5;
    b.uniform_fallback = true;

    testsupport::TempDir tmp;
    auto p = tmp.path() / "assignments.jsonl";
    topics::save_assignments({a, b}, p);
    auto back = topics::load_assignments(p);
    REQUIRE(back.size() == 2);
    CHECK(back[0].doc_id == "doc1");
    CHECK(back[0].distribution == a.distribution);
    CHECK(!back[0].uniform_fallback);
    CHECK(back[1].uniform_fallback);
    CHECK(back[1].weight == doctest::Approx(0.5));

    CHECK(topics::load_assignments(tmp.path() / "missing.jsonl").empty());
}

TEST_CASE("label files tolerate headers, comments and short rows") {
    testsupport::TempDir tmp;
    auto p = tmp.path() / "labels.tsv";
    std::ofstream out(p);
    out << "topic\tlabel\n";
    out << "# handwritten labels\n";
    out << "\n";
    out << "0\tantiviral screens\n";
    out << "2\tvaccine development\n";
    out << "loner\n";
    out.close();

    auto labels = topics::load_topic_labels(p);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0] == "antiviral screens");
    CHECK(labels[2] == "vaccine development");
    CHECK(topics::load_topic_labels(tmp.path() / "none.tsv").empty());
}
