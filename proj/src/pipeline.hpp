#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "table.hpp"

namespace attrikit {

struct CompositeDef {
    std::string name;
    std::vector<std::string> sources; // replaced by their per-row arithmetic mean
};

// The preprocessing recipe: drop constants/ids, log1p the right-skewed
// features, fold the experience/satisfaction groups into composites, label
// encode, stratified split, then standardize with train-fitted parameters.
struct PipelineSpec {
    std::vector<std::string> drop_columns;
    double skew_threshold = 0.5;
    std::vector<CompositeDef> composites;
    std::string target = "Attrition";
    double test_fraction = 0.2;
    bool standardize = true;

    static PipelineSpec defaults(); // the experiment's settings
    void validate() const;
};

struct ScalerParams {
    double mean = 0;
    double std_dev = 0; // population convention (n denominator), fitted on train only
};

// Everything needed to replay the fitted transform on a fresh raw-schema
// table. Serializes to a versioned JSON document.
struct FittedPipeline {
    int version = 1;
    std::vector<std::string> dropped;
    std::vector<std::string> log1p_applied;
    std::vector<CompositeDef> composite_defs;
    std::map<std::string, std::map<std::string, int>> encoder_maps; // column -> value -> code
    std::map<std::string, ScalerParams> scaler_params;              // feature -> (mean, std)
    std::vector<std::string> feature_names;                         // column order of the matrices
    std::string target;
    std::vector<std::string> target_classes; // sorted; label i encodes as i
    double test_fraction = 0.2;
    uint64_t seed = 0;

    std::string to_json() const;
    static FittedPipeline from_json(const std::string& text);
};

struct SplitResult {
    std::vector<size_t> train_indices; // ascending positions into the input table
    std::vector<size_t> test_indices;
    uint64_t seed = 0;
};

struct PreparedData {
    FittedPipeline pipeline;
    Matrix x_train, x_test;
    std::vector<int> y_train, y_test;
    std::vector<size_t> train_indices, test_indices; // rows of the raw table
    std::vector<std::string> feature_names;
};

// --- individual pipeline operations -----------------------------------------

Table drop_columns(const Table& table, const std::vector<std::string>& names);

// Adjusted Fisher-Pearson coefficient: g1 * sqrt(n(n-1)) / (n-2).
double skewness(const std::vector<double>& values);

// Replaces every numeric feature column with skewness > threshold by
// ln(1 + x). Returns the transformed table and the affected column names.
std::pair<Table, std::vector<std::string>> apply_log1p_where_skewed(
    const Table& table, double threshold, const std::string& target);

Table engineer_composites(const Table& table, const std::vector<CompositeDef>& composites);

// Sorted-unique label encoding of every categorical column.
std::pair<Table, std::map<std::string, std::map<std::string, int>>> encode_categoricals(
    const Table& table);

// Replays fitted maps on a possibly unseen table; raises UnseenCategory.
Table apply_encoders(const Table& table,
                     const std::map<std::string, std::map<std::string, int>>& maps);

// Deterministic stratified split: per-class test counts from round(count *
// fraction), reconciled to round(n * fraction) by largest remainder; shuffle
// within class is seed-driven. Returned index lists are ascending.
SplitResult stratified_split(const std::vector<int>& labels, double test_fraction, uint64_t seed);

struct StandardizeResult {
    Matrix train, test;
    std::map<std::string, ScalerParams> params;
};
StandardizeResult standardize(const Matrix& train, const Matrix& test,
                              const std::vector<std::string>& feature_names);

// --- whole-pipeline driver ---------------------------------------------------

// Runs drop -> log1p -> composites -> encode -> split -> scale on a raw table.
PreparedData fit_pipeline(const Table& raw, const PipelineSpec& spec, uint64_t seed);

// Replays a fitted pipeline on a raw-schema table; byte-identical matrices
// for identical inputs. Returns the same PreparedData shape.
PreparedData replay_pipeline(const Table& raw, const FittedPipeline& fitted);

// The cleaned (post-drop, pre-encoding) view used for LLM prompt building.
Table cleaned_view(const Table& raw, const FittedPipeline& fitted);

} // namespace attrikit
