#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace attrikit {

// Positive class is 1 throughout.
struct ConfusionMatrix {
    size_t tp = 0, fp = 0, fn = 0, tn = 0;
    size_t total() const { return tp + fp + fn + tn; }
};

struct ClassReport {
    int label = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    size_t support = 0;
};

struct WeightedReport {
    std::vector<ClassReport> per_class;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    size_t support = 0;
};

struct PrecisionRecallF1 {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Zero denominators yield 0 rather than an error.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm);

// Per-class reports for both classes (0 and 1), each scored as the positive
// class of its own confusion matrix, plus the support-weighted average.
WeightedReport classification_report(const std::vector<int>& y_true,
                                     const std::vector<int>& y_pred);

WeightedReport weighted_average(const std::vector<ClassReport>& reports);

// Aligned text table: Model | Precision | Recall | F1-score, two decimals.
std::string render_report(const std::vector<std::pair<std::string, WeightedReport>>& rows);

// Machine-readable twin: model,precision,recall,f1,support with full-precision values.
std::string render_report_csv(const std::vector<std::pair<std::string, WeightedReport>>& rows);

} // namespace attrikit
