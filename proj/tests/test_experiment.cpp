#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "experiment.hpp"
#include "llm/mock_service.hpp"
#include "test_helpers.hpp"
#include "util.hpp"

using namespace attrikit;
using nlohmann::json;

namespace {

const char* kDataset = "data/ibm_hr_attrition.csv";

ExperimentConfig quick_config(const std::string& out_dir) {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.output_dir = out_dir;
    c.learners = {{"decision_tree", DecisionTreeSpec{}}, {"logistic_regression", []{
                       LogisticRegressionSpec s;
                       s.max_iter = 200;
                       return s;
                   }()}};
    return c;
}

// A small self-contained dataset so the llm stages stay cheap.
std::string write_mini_dataset(const testutil::TempDir& dir) {
    std::ostringstream csv;
    csv << "Age,Dept,Score,Attrition\n";
    const char* depts[3] = {"Sales", "Lab", "HR"};
    for (int i = 0; i < 40; ++i) {
        bool leaver = i % 10 < 3; // 12 of 40
        csv << (22 + (i * 7) % 37) << ',' << depts[i % 3] << ',' << (i % 13) + (leaver ? 8 : 0)
            << ',' << (leaver ? "Yes" : "No") << '\n';
    }
    std::string path = dir.sub("mini.csv");
    write_text_file(path, csv.str());
    return path;
}

ExperimentConfig mini_config(const std::string& dataset, const std::string& out_dir) {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.dataset = dataset;
    c.output_dir = out_dir;
    c.pipeline.drop_columns.clear();
    c.pipeline.composites.clear();
    c.smote.k_neighbors = 5;
    c.learners = {{"decision_tree", DecisionTreeSpec{3}}};
    return c;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("defaults validate and survive a json round trip") {
    ExperimentConfig c = ExperimentConfig::defaults();
    c.validate();
    CHECK(c.learners.size() == 7);
    CHECK(c.seed == 42);
    CHECK_FALSE(c.llm.enabled);
    ExperimentConfig back = ExperimentConfig::from_json_text(c.to_json());
    CHECK(back.to_json() == c.to_json());
}

TEST_CASE("display names cover every learner") {
    CHECK(display_name("logistic_regression") == "Logistic Regression");
    CHECK(display_name("knn") == "KNN");
    CHECK(display_name("svm") == "SVM");
    CHECK(display_name("decision_tree") == "Decision Tree");
    CHECK(display_name("random_forest") == "Random Forest");
    CHECK(display_name("adaboost") == "AdaBoost");
    CHECK(display_name("gradient_boost") == "Gradient Boosting");
    CHECK(learner_names().size() == 7);
}

TEST_CASE("config parsing rejects unknown keys with a hint") {
    try {
        ExperimentConfig::from_json_text("{\"seeed\": 1}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigUnknownKey);
        CHECK(e.message().find("did you mean 'seed'") != std::string::npos);
    }

    try {
        ExperimentConfig::from_json_text(
            "{\"seed\": 1, \"learners\": [{\"name\": \"random_forrest\"}]}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.message().find("random_forest") != std::string::npos);
    }
}

TEST_CASE("config parsing requires a seed and valid json") {
    CHECK_RAISES_CODE(ExperimentConfig::from_json_text("{\"dataset\": \"x.csv\"}"),
                      Errc::ConfigMissingRequired);
    CHECK_RAISES_CODE(ExperimentConfig::from_json_text("not json at all"), Errc::ConfigParse);
    CHECK_RAISES_CODE(ExperimentConfig::from_json_text("{\"seed\": 1, \"learners\": []}"),
                      Errc::ConfigMissingRequired);
    CHECK_RAISES_CODE(
        ExperimentConfig::from_json_text("{\"seed\": 1, \"smote\": {\"k_neighbors\": 0}}"),
        Errc::ConfigMissingRequired);
}

TEST_CASE("learner overrides parse and unknown hyperparameters fail") {
    ExperimentConfig c = ExperimentConfig::from_json_text(
        "{\"seed\": 3, \"learners\": [{\"name\": \"svm\", \"C\": 50, \"gamma\": \"scale\"},"
        "{\"name\": \"knn\", \"k\": 3}]}");
    REQUIRE(c.learners.size() == 2);
    auto* svm = std::get_if<SvmSpec>(&c.learners[0].spec);
    REQUIRE(svm != nullptr);
    CHECK(svm->c == 50.0);
    CHECK(svm->gamma == 0.0);
    CHECK(std::get<KnnSpec>(c.learners[1].spec).k == 3);

    CHECK_RAISES_CODE(ExperimentConfig::from_json_text(
                          "{\"seed\": 1, \"learners\": [{\"name\": \"knn\", \"kk\": 3}]}"),
                      Errc::ConfigUnknownKey);
    CHECK_RAISES_CODE(ExperimentConfig::from_json_text(
                          "{\"seed\": 1, \"learners\": [{\"name\": \"svm\", \"gamma\": \"auto\"}]}"),
                      Errc::ConfigParse);
}

TEST_CASE("prepare writes the full artifact set with the documented counts") {
    testutil::TempDir dir("prep");
    ExperimentConfig c = quick_config(dir.str());
    c.dataset = kDataset;
    run_prepare(c);

    json counts = json::parse(read_text_file(artifact_path(c, "prepared/counts.json")));
    CHECK(counts.at("raw_rows") == 1470);
    CHECK(counts.at("raw_cols") == 35);
    CHECK(counts.at("cleaned_cols") == 31);
    CHECK(counts.at("n_features") == 23);
    CHECK(counts.at("train_rows") == 1176);
    CHECK(counts.at("test_rows") == 294);
    CHECK(counts.at("train_class_counts").at("No") == 986);
    CHECK(counts.at("train_class_counts").at("Yes") == 190);
    CHECK(counts.at("test_class_counts").at("No") == 247);
    CHECK(counts.at("test_class_counts").at("Yes") == 47);
    CHECK(counts.at("synthetic_rows") == 796);
    CHECK(counts.at("balanced_class_counts").at("No") == 986);
    CHECK(counts.at("balanced_class_counts").at("Yes") == 986);

    Matrix x = read_matrix_csv(artifact_path(c, "prepared/X_train_balanced.csv"));
    CHECK(x.rows == 1972);
    CHECK(x.cols == 23);
    auto y = read_label_csv(artifact_path(c, "prepared/y_train_balanced.csv"));
    CHECK(y.size() == 1972);

    FittedPipeline fitted =
        FittedPipeline::from_json(read_text_file(artifact_path(c, "prepared/pipeline.json")));
    CHECK(fitted.feature_names.size() == 23);
    CHECK(fitted.target_classes == std::vector<std::string>{"No", "Yes"});
}

TEST_CASE("prepare is byte-identical across repeated runs") {
    testutil::TempDir a("prep-a"), b("prep-b");
    ExperimentConfig ca = quick_config(a.str());
    ExperimentConfig cb = quick_config(b.str());
    run_prepare(ca);
    run_prepare(cb);
    for (const char* name : {"prepared/X_train_balanced.csv", "prepared/X_test.csv",
                             "prepared/y_train_balanced.csv", "prepared/pipeline.json",
                             "prepared/counts.json"}) {
        CHECK(read_text_file(artifact_path(ca, name)) == read_text_file(artifact_path(cb, name)));
    }
}

TEST_CASE("train, evaluate and report compose over artifacts") {
    testutil::TempDir dir("flow");
    ExperimentConfig c = quick_config(dir.str());
    run_prepare(c);
    run_train(c);
    CHECK(std::filesystem::exists(artifact_path(c, "models/decision_tree.json")));
    CHECK(std::filesystem::exists(artifact_path(c, "models/logistic_regression.json")));

    auto model = load_model(read_text_file(artifact_path(c, "models/decision_tree.json")));
    CHECK(model->variant() == "decision_tree");
    CHECK(model->n_features() == 23);

    run_evaluate(c);
    json metrics = json::parse(read_text_file(artifact_path(c, "eval/metrics.json")));
    REQUIRE(metrics.contains("decision_tree"));
    CHECK(metrics.at("decision_tree").at("support") == 294);
    CHECK(metrics.at("decision_tree").at("f1").get<double>() > 0.5);
    CHECK(metrics.at("decision_tree").contains("per_class"));

    run_report(c);
    std::string text = read_text_file(artifact_path(c, "report.txt"));
    CHECK(text.find("Model") == 0);
    CHECK(text.find("Decision Tree") != std::string::npos);
    CHECK(text.find("Logistic Regression") != std::string::npos);
    // config order defines row order
    CHECK(text.find("Decision Tree") < text.find("Logistic Regression"));
    std::string csv = read_text_file(artifact_path(c, "report.csv"));
    CHECK(csv.rfind("model,precision,recall,f1,support\n", 0) == 0);
}

TEST_CASE("stage failures carry the stage name") {
    testutil::TempDir dir("stage-err");
    ExperimentConfig c = quick_config(dir.str());
    try {
        run_train(c); // prepare never ran, artifacts are missing
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.message().rfind("stage train:", 0) == 0);
    }
}

TEST_CASE("full experiment returns a manifest and is reproducible") {
    testutil::TempDir a("run-a"), b("run-b");
    ExperimentConfig ca = quick_config(a.str());
    ExperimentConfig cb = quick_config(b.str());
    RunSummary ra = run_experiment(ca);
    RunSummary rb = run_experiment(cb);

    CHECK(read_text_file(artifact_path(ca, "report.csv")) ==
          read_text_file(artifact_path(cb, "report.csv")));

    json ma = json::parse(ra.manifest_json);
    json mb = json::parse(rb.manifest_json);
    CHECK(ma.at("toolkit_version") == kToolkitVersion);
    CHECK(ma.at("seed") == 42);
    CHECK(ma.at("counts") == mb.at("counts"));
    CHECK(ma.at("models") == mb.at("models"));
    CHECK(ma.at("dataset_hash") == mb.at("dataset_hash"));
    CHECK(ma.at("config_hash") != ""); // present and stable
    CHECK(ma.at("models").contains("decision_tree"));
    CHECK(ra.model_reports.at("decision_tree").support == 294);
    CHECK(ra.stage_seconds.count("prepare") == 1);
    CHECK(ra.stage_seconds.count("report") == 1);

    // output dirs differ, so the config hashes differ; everything else matches
    CHECK(ma.at("counts").at("synthetic_rows") == 796);
}

TEST_CASE("llm stages run against the in-process service") {
    setenv(kApiKeyEnvVar, "unit-test-key", 1);
    MockService service;
    service.start();

    testutil::TempDir dir("llm-flow");
    std::string dataset = write_mini_dataset(dir);
    ExperimentConfig c = mini_config(dataset, dir.sub("out"));
    c.llm.enabled = true;
    c.llm.base_url = service.url();
    c.llm.fast_poll = true;

    RunSummary summary = run_experiment(c);
    CHECK(std::filesystem::exists(artifact_path(c, "llm/corpus.jsonl")));
    CHECK(std::filesystem::exists(artifact_path(c, "llm/job.json")));
    CHECK(std::filesystem::exists(artifact_path(c, "llm/predictions.csv")));

    json job = json::parse(read_text_file(artifact_path(c, "llm/job.json")));
    CHECK(job.at("status") == "succeeded");
    CHECK(job.at("fine_tuned_model").get<std::string>().rfind("ft:", 0) == 0);

    std::string log = read_text_file(artifact_path(c, "llm/predictions.csv"));
    CHECK(log.rfind("row_index,raw_completion,parsed,true_label\n", 0) == 0);
    size_t lines = std::count(log.begin(), log.end(), '\n');
    CHECK(lines == 9); // header + one row per test instance

    std::string report = read_text_file(artifact_path(c, "report.txt"));
    CHECK(report.find("LLM (fine-tuned)") != std::string::npos);
    CHECK(summary.model_reports.count("LLM (fine-tuned)") == 0); // classical rows only

    // test prompts never entered the training corpus, so the echo service
    // has no stored completion for them: every prediction is Unparseable
    CHECK(log.find("Maybe,Unparseable") != std::string::npos);
}

TEST_CASE("corpus serialization uses raw pre-encoding values") {
    testutil::TempDir dir("corpus");
    std::string dataset = write_mini_dataset(dir);
    ExperimentConfig c = mini_config(dataset, dir.sub("out"));
    run_prepare(c);
    run_llm_prepare(c);

    std::string jsonl = read_text_file(artifact_path(c, "llm/corpus.jsonl"));
    size_t lines = std::count(jsonl.begin(), jsonl.end(), '\n');
    CHECK(lines == 32); // one per training row

    std::istringstream in(jsonl);
    std::string line;
    REQUIRE(std::getline(in, line));
    auto first = json::parse(line);
    std::string prompt = first.at("prompt").get<std::string>();
    CHECK(prompt.rfind(kPromptPrefix, 0) == 0);
    CHECK(prompt.find("Dept=") != std::string::npos);   // categorical stays raw
    CHECK(prompt.find("Age=") != std::string::npos);
    CHECK(prompt.find("Attrition=") == std::string::npos); // target never leaks
    std::string completion = first.at("completion").get<std::string>();
    CHECK((completion == "Yes" || completion == "No"));
}

TEST_CASE("synthetic rows can be folded into the corpus") {
    testutil::TempDir dir("corpus-syn");
    std::string dataset = write_mini_dataset(dir);
    ExperimentConfig c = mini_config(dataset, dir.sub("out"));
    c.llm.include_synthetic = true;
    run_prepare(c);
    run_llm_prepare(c);
    std::string jsonl = read_text_file(artifact_path(c, "llm/corpus.jsonl"));
    size_t lines = std::count(jsonl.begin(), jsonl.end(), '\n');
    CHECK(lines == 44); // 32 real + 12 synthetic
    // every synthetic completion is the minority label
    std::istringstream in(jsonl);
    std::string line;
    size_t yes = 0;
    while (std::getline(in, line)) {
        if (json::parse(line).at("completion") == "Yes") ++yes;
    }
    CHECK(yes == 22); // 10 real train leavers + 12 synthetic
}

} // TEST_SUITE
