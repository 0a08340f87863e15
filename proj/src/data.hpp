#ifndef MISBOOST_DATA_HPP
#define MISBOOST_DATA_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace misboost {

enum class DatasetFormat { MilCsv, MilSparse };

DatasetFormat parse_format(const std::string& name);

Dataset load_dataset(const std::string& path, DatasetFormat format);
Dataset parse_dataset(const std::string& text, DatasetFormat format,
                      const std::string& origin = "<string>");

// Dense CSV writer; floats printed with round-trip precision.
void save_dataset(const Dataset& ds, const std::string& path);
std::string format_dataset(const Dataset& ds);

NormalizationStats fit_normalization(const Dataset& ds);
Dataset apply_normalization(const Dataset& ds, const NormalizationStats& stats);
void apply_normalization_inplace(Bag& bag, const NormalizationStats& stats);

struct Split {
    Dataset train;
    Dataset held_out;
};

// Stratified k-fold: per-class shuffle then round-robin deal, so class
// proportions per fold stay within one bag of the global proportions.
std::vector<Split> stratified_split(const Dataset& ds, int folds,
                                    std::uint64_t seed);

// Single stratified holdout with the given held-out fraction; fallback used
// when a class has fewer bags than the requested fold count.
Split stratified_holdout(const Dataset& ds, double held_fraction,
                         std::uint64_t seed);

}  // namespace misboost

#endif
