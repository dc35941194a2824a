#include "litmine/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "litmine/jsonl.hpp"
#include "litmine/util.hpp"

namespace litmine::eval {

Metrics make_metrics(std::size_t n_correct, std::size_t n_extracted, std::size_t n_possible) {
    Metrics m;
    m.n_correct = n_correct;
    m.n_extracted = n_extracted;
    m.n_possible = n_possible;
    m.precision = n_extracted ? static_cast<double>(n_correct) / n_extracted : 0.0;
    m.recall = n_possible ? static_cast<double>(n_correct) / n_possible : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

std::vector<std::string> sample_docs(const std::vector<std::string>& doc_ids, std::size_t n,
                                     std::uint64_t seed) {
    if (n > doc_ids.size()) {
        throw std::invalid_argument("sample size exceeds corpus size");
    }
    std::vector<std::string> pool = doc_ids;
    DetRng rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

namespace {

bool close_rel(double a, double b) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= 1e-6 * std::max(scale, 1e-300);
}

}  // namespace

bool values_match(double predicted, const std::string& pred_unit, double gold,
                  const std::string& gold_unit) {
    if (gold_unit.empty()) return close_rel(predicted, gold);
    auto pf = preclinical::micromolar_factor(pred_unit);
    auto gf = preclinical::micromolar_factor(gold_unit);
    if (pf && gf) return close_rel(predicted * *pf, gold * *gf);
    if (pred_unit == gold_unit) return close_rel(predicted, gold);
    return false;
}

namespace {

Metrics score_impl(const std::vector<preclinical::AssayFinding>& predictions,
                   const std::vector<GoldLabel>& gold, bool drug_only) {
    std::unordered_map<std::string, std::vector<std::pair<const GoldItem*, bool>>> by_doc;
    std::size_t n_possible = 0;
    for (const auto& g : gold) {
        for (const auto& item : g.items) {
            by_doc[g.doc_id].emplace_back(&item, false);
            ++n_possible;
        }
    }

    std::size_t n_correct = 0;
    for (const auto& p : predictions) {
        auto it = by_doc.find(p.doc_id);
        if (it == by_doc.end()) continue;
        for (auto& [item, used] : it->second) {
            if (used) continue;
            if (to_lower(item->drug) != to_lower(p.drug_canonical)) continue;
            if (!drug_only) {
                if (to_lower(item->assay) != preclinical::assay_name(p.assay)) continue;
                if (item->value) {
                    if (!p.value) continue;
                    if (!values_match(*p.value, p.unit_raw, *item->value, item->unit)) continue;
                }
            }
            used = true;
            ++n_correct;
            break;
        }
    }
    return make_metrics(n_correct, predictions.size(), n_possible);
}

}  // namespace

Metrics score(const std::vector<preclinical::AssayFinding>& predictions,
              const std::vector<GoldLabel>& gold) {
    return score_impl(predictions, gold, false);
}

Metrics score_drug_only(const std::vector<preclinical::AssayFinding>& predictions,
                        const std::vector<GoldLabel>& gold) {
    return score_impl(predictions, gold, true);
}

std::vector<GoldLabel> load_gold(const std::filesystem::path& p) {
    std::vector<GoldLabel> gold;
    JsonlFile file = read_jsonl(p);
    if (!file.errors.empty()) {
        throw std::runtime_error("gold file " + p.string() + " line " +
                                 std::to_string(file.errors.front().first) + ": " +
                                 file.errors.front().second);
    }
    for (auto& [line, j] : file.records) {
        GoldLabel g;
        g.doc_id = j.at("doc_id").get<std::string>();
        for (const auto& item : j.value("items", nlohmann::json::array())) {
            GoldItem gi;
            gi.drug = item.at("drug").get<std::string>();
            gi.assay = to_lower(item.at("assay").get<std::string>());
            if (item.contains("value") && !item["value"].is_null()) {
                gi.value = item["value"].get<double>();
            }
            gi.unit = item.value("unit", "");
            g.items.push_back(std::move(gi));
        }
        gold.push_back(std::move(g));
    }
    return gold;
}

void save_gold(const std::vector<GoldLabel>& gold, const std::filesystem::path& p) {
    std::string out;
    for (const auto& g : gold) {
        nlohmann::json j;
        j["doc_id"] = g.doc_id;
        nlohmann::json items = nlohmann::json::array();
        for (const auto& item : g.items) {
            nlohmann::json ji;
            ji["drug"] = item.drug;
            ji["assay"] = item.assay;
            if (item.value) ji["value"] = *item.value;
            if (!item.unit.empty()) ji["unit"] = item.unit;
            items.push_back(std::move(ji));
        }
        j["items"] = items;
        out += j.dump();
        out += '\n';
    }
    atomic_write(p, out);
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["n_correct"] = m.n_correct;
    j["n_extracted"] = m.n_extracted;
    j["n_possible"] = m.n_possible;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    return j.dump(2);
}

std::string metrics_table(const Metrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "correct    %zu\nextracted  %zu\npossible   %zu\nprecision  %.3f\n"
                  "recall     %.3f\nf1         %.3f\n",
                  m.n_correct, m.n_extracted, m.n_possible, m.precision, m.recall, m.f1);
    return buf;
}

}  // namespace litmine::eval
