#include "metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "errors.hpp"
#include "util.hpp"

namespace attrikit {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        raise(Errc::LengthMismatch, "label vectors differ in length");
    ConfusionMatrix cm;
    for (size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            raise(Errc::NonBinaryLabel, "labels must be 0 or 1");
        if (t == 1 && p == 1)
            ++cm.tp;
        else if (t == 0 && p == 1)
            ++cm.fp;
        else if (t == 1 && p == 0)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm) {
    PrecisionRecallF1 out;
    double tp = static_cast<double>(cm.tp);
    double pd = tp + static_cast<double>(cm.fp);
    double rd = tp + static_cast<double>(cm.fn);
    out.precision = pd == 0 ? 0.0 : tp / pd;
    out.recall = rd == 0 ? 0.0 : tp / rd;
    double sum = out.precision + out.recall;
    out.f1 = sum == 0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
    return out;
}

WeightedReport classification_report(const std::vector<int>& y_true,
                                     const std::vector<int>& y_pred) {
    ConfusionMatrix pos = confusion(y_true, y_pred);
    // Class 0 scored as the positive class of the flipped matrix.
    ConfusionMatrix neg{pos.tn, pos.fn, pos.fp, pos.tp};

    std::vector<ClassReport> per_class;
    for (int label : {0, 1}) {
        const ConfusionMatrix& cm = label == 1 ? pos : neg;
        auto prf = precision_recall_f1(cm);
        per_class.push_back({label, prf.precision, prf.recall, prf.f1, cm.tp + cm.fn});
    }
    return weighted_average(per_class);
}

WeightedReport weighted_average(const std::vector<ClassReport>& reports) {
    if (reports.empty()) raise(Errc::EmptyReport, "no per-class reports to average");
    WeightedReport out;
    out.per_class = reports;
    for (const auto& r : reports) out.support += r.support;
    if (out.support == 0) raise(Errc::EmptyReport, "total support is zero");
    double w = static_cast<double>(out.support);
    for (const auto& r : reports) {
        double s = static_cast<double>(r.support);
        out.precision += s * r.precision / w;
        out.recall += s * r.recall / w;
        out.f1 += s * r.f1 / w;
    }
    return out;
}

std::string render_report(const std::vector<std::pair<std::string, WeightedReport>>& rows) {
    size_t name_width = 5; // "Model"
    for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());

    std::string out;
    out += "Model";
    out.append(name_width - 5, ' ');
    out += "  Precision  Recall  F1-score\n";
    char buf[64];
    for (const auto& [name, report] : rows) {
        out += name;
        out.append(name_width - name.size(), ' ');
        std::snprintf(buf, sizeof buf, "  %9.2f  %6.2f  %8.2f\n", report.precision, report.recall,
                      report.f1);
        out += buf;
    }
    return out;
}

std::string render_report_csv(const std::vector<std::pair<std::string, WeightedReport>>& rows) {
    std::string out = "model,precision,recall,f1,support\n";
    for (const auto& [name, report] : rows) {
        out += name;
        out += ',';
        out += format_double(report.precision);
        out += ',';
        out += format_double(report.recall);
        out += ',';
        out += format_double(report.f1);
        out += ',';
        out += std::to_string(report.support);
        out += '\n';
    }
    return out;
}

} // namespace attrikit
