#include <doctest.h>

#include <random>

#include "metrics.hpp"
#include "test_helpers.hpp"

using namespace attrikit;

namespace {

// Brute-force counting oracle: no shared code with the library implementation.
struct OracleCounts {
    size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

OracleCounts count_pairs(const std::vector<int>& t, const std::vector<int>& p) {
    OracleCounts c;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] == 1 && p[i] == 1) ++c.tp;
        if (t[i] == 0 && p[i] == 1) ++c.fp;
        if (t[i] == 1 && p[i] == 0) ++c.fn;
        if (t[i] == 0 && p[i] == 0) ++c.tn;
    }
    return c;
}

double safe_div(double a, double b) { return b == 0 ? 0.0 : a / b; }

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion and scores on a hand-worked example") {
    std::vector<int> t{1, 1, 0, 0, 1};
    std::vector<int> p{1, 0, 0, 1, 1};
    ConfusionMatrix cm = confusion(t, p);
    CHECK(cm.tp == 2);
    CHECK(cm.fn == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.tn == 1);

    PrecisionRecallF1 s = precision_recall_f1(cm);
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(2.0 / 3.0));
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));

    WeightedReport report = classification_report(t, p);
    REQUIRE(report.per_class.size() == 2);
    CHECK(report.per_class[0].label == 0);
    CHECK(report.per_class[0].precision == doctest::Approx(0.5));
    CHECK(report.per_class[0].support == 2);
    CHECK(report.per_class[1].support == 3);
    CHECK(report.precision == doctest::Approx((2 * 0.5 + 3 * 2.0 / 3.0) / 5.0));
    CHECK(report.support == 5);
}

TEST_CASE("zero denominators yield zero, never NaN") {
    std::vector<int> t{1, 1, 0};
    std::vector<int> p{0, 0, 0};
    WeightedReport report = classification_report(t, p);
    CHECK(report.per_class[1].precision == 0.0);
    CHECK(report.per_class[1].recall == 0.0);
    CHECK(report.per_class[1].f1 == 0.0);
    CHECK(report.f1 == report.f1); // not NaN
}

TEST_CASE("validation of inputs") {
    CHECK_RAISES_CODE(confusion({1, 0}, {1}), Errc::LengthMismatch);
    CHECK_RAISES_CODE(confusion({1, 2}, {1, 0}), Errc::NonBinaryLabel);
    CHECK_RAISES_CODE(confusion({1, 0}, {1, -1}), Errc::NonBinaryLabel);
    CHECK(confusion({}, {}).total() == 0);
    CHECK_RAISES_CODE(classification_report({}, {}), Errc::EmptyReport);
    CHECK_RAISES_CODE(weighted_average({}), Errc::EmptyReport);
}

TEST_CASE("library agrees with the counting oracle on random vectors") {
    std::mt19937 gen(42);
    std::uniform_int_distribution<size_t> len_dist(1, 200);
    for (int trial = 0; trial < 1000; ++trial) {
        size_t n = len_dist(gen);
        std::vector<int> t = testutil::random_labels(gen, n);
        std::vector<int> p = testutil::random_labels(gen, n);
        t[0] = 1; // guarantee both classes appear across (t, p) handling below

        OracleCounts oc = count_pairs(t, p);
        ConfusionMatrix cm = confusion(t, p);
        CHECK(cm.tp == oc.tp);
        CHECK(cm.fp == oc.fp);
        CHECK(cm.fn == oc.fn);
        CHECK(cm.tn == oc.tn);

        double prec1 = safe_div(oc.tp, oc.tp + oc.fp);
        double rec1 = safe_div(oc.tp, oc.tp + oc.fn);
        double f1_1 = safe_div(2 * prec1 * rec1, prec1 + rec1);
        double prec0 = safe_div(oc.tn, oc.tn + oc.fn);
        double rec0 = safe_div(oc.tn, oc.tn + oc.fp);
        double f1_0 = safe_div(2 * prec0 * rec0, prec0 + rec0);
        size_t sup1 = oc.tp + oc.fn, sup0 = oc.tn + oc.fp;

        WeightedReport report = classification_report(t, p);
        CHECK(report.per_class[1].precision == prec1);
        CHECK(report.per_class[1].recall == rec1);
        CHECK(report.per_class[1].f1 == f1_1);
        CHECK(report.per_class[0].precision == prec0);
        CHECK(report.per_class[0].f1 == f1_0);
        double nd = static_cast<double>(n);
        double wf1 = static_cast<double>(sup0) * f1_0 / nd + static_cast<double>(sup1) * f1_1 / nd;
        CHECK(report.f1 == wf1);
        CHECK(report.support == n);
    }
}

TEST_CASE("rendered table lines up and keeps row order") {
    WeightedReport a;
    a.precision = 0.84;
    a.recall = 0.76;
    a.f1 = 0.78;
    a.support = 294;
    WeightedReport b = a;
    b.f1 = 0.7149;
    std::string text = render_report({{"Logistic Regression", a}, {"KNN", b}});
    CHECK(text.find("Model                Precision  Recall  F1-score\n") == 0);
    CHECK(text.find("Logistic Regression       0.84    0.76      0.78\n") != std::string::npos);
    CHECK(text.find("KNN ") != std::string::npos);
    CHECK(text.find("0.71") != std::string::npos);
    CHECK(text.find("Logistic") < text.find("KNN"));
}

TEST_CASE("csv rendering is full precision") {
    WeightedReport a;
    a.precision = 0.5;
    a.recall = 1.0 / 3.0;
    a.f1 = 0.4;
    a.support = 10;
    std::string csv = render_report_csv({{"m", a}});
    CHECK(csv == "model,precision,recall,f1,support\nm,0.5,0.3333333333333333,0.4,10\n");
}

} // TEST_SUITE
