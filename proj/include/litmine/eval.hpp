#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "litmine/preclinical.hpp"

namespace litmine::eval {

struct GoldItem {
    std::string drug;
    std::string assay;  // "ic50" etc.
    std::optional<double> value;
    std::string unit;
};

struct GoldLabel {
    std::string doc_id;
    std::vector<GoldItem> items;
};

struct Metrics {
    std::size_t n_correct = 0;
    std::size_t n_extracted = 0;
    std::size_t n_possible = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Metrics make_metrics(std::size_t n_correct, std::size_t n_extracted, std::size_t n_possible);

// Uniform sample without replacement, deterministic for a fixed seed.
std::vector<std::string> sample_docs(const std::vector<std::string>& doc_ids, std::size_t n,
                                     std::uint64_t seed);

// A prediction is correct iff an unused gold item of the same doc matches on
// drug and assay and — when the gold item carries a value — on value within
// relative tolerance 1e-6 with a compatible unit. Greedy in prediction order;
// each gold item matches at most one prediction.
Metrics score(const std::vector<preclinical::AssayFinding>& predictions,
              const std::vector<GoldLabel>& gold);

// Diagnostic variant that only requires the drug to match.
Metrics score_drug_only(const std::vector<preclinical::AssayFinding>& predictions,
                        const std::vector<GoldLabel>& gold);

// Units compatible when equal strings, both empty, or both convertible to
// micromolar (values then compared on the converted scale).
bool values_match(double predicted, const std::string& pred_unit, double gold,
                  const std::string& gold_unit);

std::vector<GoldLabel> load_gold(const std::filesystem::path& p);
void save_gold(const std::vector<GoldLabel>& gold, const std::filesystem::path& p);

std::string metrics_to_json(const Metrics& m);
std::string metrics_table(const Metrics& m);  // human-readable, aligned

}  // namespace litmine::eval
