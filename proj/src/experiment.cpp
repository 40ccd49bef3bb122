#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "rng.hpp"
#include "util.hpp"

namespace attrikit {

using nlohmann::json;

const std::vector<std::string>& learner_names() {
    static const std::vector<std::string> names{
        "logistic_regression", "knn",      "svm",           "decision_tree",
        "random_forest",       "adaboost", "gradient_boost"};
    return names;
}

std::string display_name(const std::string& learner_name) {
    if (learner_name == "logistic_regression") return "Logistic Regression";
    if (learner_name == "knn") return "KNN";
    if (learner_name == "svm") return "SVM";
    if (learner_name == "decision_tree") return "Decision Tree";
    if (learner_name == "random_forest") return "Random Forest";
    if (learner_name == "adaboost") return "AdaBoost";
    if (learner_name == "gradient_boost") return "Gradient Boosting";
    return learner_name;
}

// ---- config ----------------------------------------------------------------

namespace {

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        std::string best;
        size_t best_dist = 4; // suggestions only within edit distance 3
        for (const auto& candidate : allowed) {
            size_t d = levenshtein(key, candidate);
            if (d < best_dist) {
                best_dist = d;
                best = candidate;
            }
        }
        std::string msg = "unknown key '" + key + "' in " + where;
        if (!best.empty()) msg += " (did you mean '" + best + "'?)";
        raise(Errc::ConfigUnknownKey, msg);
    }
}

LearnerSpec default_spec(const std::string& name) {
    if (name == "logistic_regression") return LogisticRegressionSpec{};
    if (name == "knn") return KnnSpec{};
    if (name == "svm") return SvmSpec{};
    if (name == "decision_tree") return DecisionTreeSpec{};
    if (name == "random_forest") return RandomForestSpec{};
    if (name == "adaboost") return AdaBoostSpec{};
    if (name == "gradient_boost") return GradientBoostSpec{};
    std::string msg = "unknown learner '" + name + "'";
    std::string best;
    size_t best_dist = 4;
    for (const auto& candidate : learner_names()) {
        size_t d = levenshtein(name, candidate);
        if (d < best_dist) {
            best_dist = d;
            best = candidate;
        }
    }
    if (!best.empty()) msg += " (did you mean '" + best + "'?)";
    raise(Errc::ConfigUnknownKey, msg);
}

json spec_to_json(const LearnerEntry& entry) {
    json j{{"name", entry.name}};
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LogisticRegressionSpec>) {
                j["C"] = s.l2_c;
                j["tol"] = s.tol;
                j["max_iter"] = s.max_iter;
            } else if constexpr (std::is_same_v<S, KnnSpec>) {
                j["k"] = s.k;
                j["leaf_size"] = s.leaf_size;
            } else if constexpr (std::is_same_v<S, SvmSpec>) {
                j["C"] = s.c;
                if (s.gamma == 0.0)
                    j["gamma"] = "scale";
                else
                    j["gamma"] = s.gamma;
                j["tol"] = s.tol;
                j["max_iter"] = s.max_iter;
            } else if constexpr (std::is_same_v<S, DecisionTreeSpec>) {
                j["max_depth"] = s.max_depth;
            } else if constexpr (std::is_same_v<S, RandomForestSpec>) {
                j["n_trees"] = s.n_trees;
                j["max_depth"] = s.max_depth;
                j["bootstrap"] = s.bootstrap;
                j["max_features"] = s.sqrt_features ? "sqrt" : "all";
            } else if constexpr (std::is_same_v<S, AdaBoostSpec>) {
                j["n_estimators"] = s.n_estimators;
                j["learning_rate"] = s.learning_rate;
            } else {
                j["learning_rate"] = s.learning_rate;
                j["n_estimators"] = s.n_estimators;
                j["max_depth"] = s.max_depth;
                j["lambda"] = s.lambda;
                j["col_subsample"] = s.sqrt_features ? "sqrt" : "all";
            }
        },
        entry.spec);
    return j;
}

LearnerEntry spec_from_json(const json& j) {
    if (!j.contains("name"))
        raise(Errc::ConfigMissingRequired, "learner entry needs a 'name'");
    LearnerEntry entry;
    entry.name = j.at("name").get<std::string>();
    entry.spec = default_spec(entry.name);

    auto subsample_flag = [&](const char* key) {
        std::string v = j.at(key).get<std::string>();
        if (v != "sqrt" && v != "all")
            raise(Errc::ConfigParse, std::string(key) + " must be 'sqrt' or 'all'");
        return v == "sqrt";
    };

    std::visit(
        [&](auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LogisticRegressionSpec>) {
                check_keys(j, {"name", "C", "tol", "max_iter"}, "learner '" + entry.name + "'");
                if (j.contains("C")) s.l2_c = j.at("C").get<double>();
                if (j.contains("tol")) s.tol = j.at("tol").get<double>();
                if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<size_t>();
            } else if constexpr (std::is_same_v<S, KnnSpec>) {
                check_keys(j, {"name", "k", "leaf_size"}, "learner '" + entry.name + "'");
                if (j.contains("k")) s.k = j.at("k").get<size_t>();
                if (j.contains("leaf_size")) s.leaf_size = j.at("leaf_size").get<size_t>();
            } else if constexpr (std::is_same_v<S, SvmSpec>) {
                check_keys(j, {"name", "C", "gamma", "tol", "max_iter"},
                           "learner '" + entry.name + "'");
                if (j.contains("C")) s.c = j.at("C").get<double>();
                if (j.contains("gamma")) {
                    if (j.at("gamma").is_string()) {
                        if (j.at("gamma").get<std::string>() != "scale")
                            raise(Errc::ConfigParse, "gamma must be a number or 'scale'");
                        s.gamma = 0.0;
                    } else {
                        s.gamma = j.at("gamma").get<double>();
                    }
                }
                if (j.contains("tol")) s.tol = j.at("tol").get<double>();
                if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<size_t>();
            } else if constexpr (std::is_same_v<S, DecisionTreeSpec>) {
                check_keys(j, {"name", "max_depth"}, "learner '" + entry.name + "'");
                if (j.contains("max_depth")) s.max_depth = j.at("max_depth").get<size_t>();
            } else if constexpr (std::is_same_v<S, RandomForestSpec>) {
                check_keys(j, {"name", "n_trees", "max_depth", "bootstrap", "max_features"},
                           "learner '" + entry.name + "'");
                if (j.contains("n_trees")) s.n_trees = j.at("n_trees").get<size_t>();
                if (j.contains("max_depth")) s.max_depth = j.at("max_depth").get<size_t>();
                if (j.contains("bootstrap")) s.bootstrap = j.at("bootstrap").get<bool>();
                if (j.contains("max_features")) s.sqrt_features = subsample_flag("max_features");
            } else if constexpr (std::is_same_v<S, AdaBoostSpec>) {
                check_keys(j, {"name", "n_estimators", "learning_rate"},
                           "learner '" + entry.name + "'");
                if (j.contains("n_estimators")) s.n_estimators = j.at("n_estimators").get<size_t>();
                if (j.contains("learning_rate"))
                    s.learning_rate = j.at("learning_rate").get<double>();
            } else {
                check_keys(j,
                           {"name", "learning_rate", "n_estimators", "max_depth", "lambda",
                            "col_subsample"},
                           "learner '" + entry.name + "'");
                if (j.contains("learning_rate"))
                    s.learning_rate = j.at("learning_rate").get<double>();
                if (j.contains("n_estimators")) s.n_estimators = j.at("n_estimators").get<size_t>();
                if (j.contains("max_depth")) s.max_depth = j.at("max_depth").get<size_t>();
                if (j.contains("lambda")) s.lambda = j.at("lambda").get<double>();
                if (j.contains("col_subsample")) s.sqrt_features = subsample_flag("col_subsample");
            }
        },
        entry.spec);
    return entry;
}

} // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.pipeline = PipelineSpec::defaults();
    c.smote = SmoteConfig{};
    for (const auto& name : learner_names()) c.learners.push_back({name, default_spec(name)});
    return c;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["dataset"] = dataset;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    json comps = json::array();
    for (const auto& comp : pipeline.composites)
        comps.push_back({{"name", comp.name}, {"sources", comp.sources}});
    j["pipeline"] = {{"drop_columns", pipeline.drop_columns},
                     {"skew_threshold", pipeline.skew_threshold},
                     {"composites", comps},
                     {"target", pipeline.target},
                     {"test_fraction", pipeline.test_fraction},
                     {"standardize", pipeline.standardize}};
    j["smote"] = {{"k_neighbors", smote.k_neighbors}, {"target_ratio", smote.target_ratio}};
    json entries = json::array();
    for (const auto& entry : learners) entries.push_back(spec_to_json(entry));
    j["learners"] = entries;
    j["llm"] = {{"enabled", llm.enabled},
                {"base_url", llm.base_url},
                {"corpus_path", llm.corpus_path},
                {"include_synthetic", llm.include_synthetic},
                {"max_parallel", llm.max_parallel},
                {"fast_poll", llm.fast_poll}};
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::ConfigParse, std::string("config: ") + e.what());
    }

    try {
        check_keys(j, {"dataset", "output_dir", "seed", "pipeline", "smote", "learners", "llm"},
                   "config");
        ExperimentConfig c = defaults();
        if (!j.contains("seed"))
            raise(Errc::ConfigMissingRequired, "config needs an explicit 'seed'");
        c.seed = j.at("seed").get<uint64_t>();
        if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();

        if (j.contains("pipeline")) {
            const json& p = j.at("pipeline");
            check_keys(p,
                       {"drop_columns", "skew_threshold", "composites", "target", "test_fraction",
                        "standardize"},
                       "pipeline");
            if (p.contains("drop_columns"))
                c.pipeline.drop_columns = p.at("drop_columns").get<std::vector<std::string>>();
            if (p.contains("skew_threshold"))
                c.pipeline.skew_threshold = p.at("skew_threshold").get<double>();
            if (p.contains("composites")) {
                c.pipeline.composites.clear();
                for (const auto& comp : p.at("composites")) {
                    check_keys(comp, {"name", "sources"}, "composite");
                    c.pipeline.composites.push_back(
                        {comp.at("name").get<std::string>(),
                         comp.at("sources").get<std::vector<std::string>>()});
                }
            }
            if (p.contains("target")) c.pipeline.target = p.at("target").get<std::string>();
            if (p.contains("test_fraction"))
                c.pipeline.test_fraction = p.at("test_fraction").get<double>();
            if (p.contains("standardize")) c.pipeline.standardize = p.at("standardize").get<bool>();
        }

        if (j.contains("smote")) {
            const json& s = j.at("smote");
            check_keys(s, {"k_neighbors", "target_ratio"}, "smote");
            if (s.contains("k_neighbors")) c.smote.k_neighbors = s.at("k_neighbors").get<size_t>();
            if (s.contains("target_ratio"))
                c.smote.target_ratio = s.at("target_ratio").get<double>();
        }

        if (j.contains("learners")) {
            c.learners.clear();
            for (const auto& entry : j.at("learners")) c.learners.push_back(spec_from_json(entry));
        }

        if (j.contains("llm")) {
            const json& l = j.at("llm");
            check_keys(l,
                       {"enabled", "base_url", "corpus_path", "include_synthetic", "max_parallel",
                        "fast_poll"},
                       "llm");
            if (l.contains("enabled")) c.llm.enabled = l.at("enabled").get<bool>();
            if (l.contains("base_url")) c.llm.base_url = l.at("base_url").get<std::string>();
            if (l.contains("corpus_path"))
                c.llm.corpus_path = l.at("corpus_path").get<std::string>();
            if (l.contains("include_synthetic"))
                c.llm.include_synthetic = l.at("include_synthetic").get<bool>();
            if (l.contains("max_parallel")) c.llm.max_parallel = l.at("max_parallel").get<int>();
            if (l.contains("fast_poll")) c.llm.fast_poll = l.at("fast_poll").get<bool>();
        }

        c.validate();
        return c;
    } catch (const json::exception& e) {
        raise(Errc::ConfigParse, std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    ExperimentConfig c = from_json_text(read_text_file(path));
    if (!std::filesystem::exists(c.dataset))
        raise(Errc::ConfigMissingRequired, "dataset file '" + c.dataset + "' does not exist");
    return c;
}

void ExperimentConfig::validate() const {
    pipeline.validate();
    if (dataset.empty()) raise(Errc::ConfigMissingRequired, "dataset path is required");
    if (output_dir.empty()) raise(Errc::ConfigMissingRequired, "output_dir is required");
    if (smote.k_neighbors < 1) raise(Errc::ConfigMissingRequired, "k_neighbors must be >= 1");
    if (!(smote.target_ratio > 0.0 && smote.target_ratio <= 1.0))
        raise(Errc::ConfigMissingRequired, "target_ratio must be in (0, 1]");
    if (learners.empty()) raise(Errc::ConfigMissingRequired, "at least one learner is required");
    if (llm.max_parallel < 1) raise(Errc::ConfigMissingRequired, "max_parallel must be >= 1");
}

LlmClientConfig ExperimentConfig::client_config() const {
    LlmClientConfig c;
    c.base_url = llm.base_url;
    c.max_parallel = llm.max_parallel;
    if (llm.fast_poll) {
        c.initial_backoff_ms = 10;
        c.max_backoff_ms = 100;
        c.budget_ms = 10000;
    }
    return c;
}

// ---- stage helpers ----------------------------------------------------------

std::string artifact_path(const ExperimentConfig& config, const std::string& relative) {
    return (std::filesystem::path(config.output_dir) / relative).string();
}

Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* names) {
    Table t = Table::load_csv(path);
    Matrix m(t.n_rows(), t.n_cols());
    for (size_t c = 0; c < t.n_cols(); ++c) {
        const auto& col = t.column(c);
        if (col.schema.kind != ColumnKind::Numeric)
            raise(Errc::NonNumericColumn, "matrix csv column '" + col.schema.name + "'");
        for (size_t r = 0; r < t.n_rows(); ++r) m.at(r, c) = col.nums[r];
        if (names) names->push_back(col.schema.name);
    }
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& names) {
    if (names.size() != m.cols) raise(Errc::DimensionMismatch, "header width mismatch");
    std::string out;
    for (size_t c = 0; c < names.size(); ++c) {
        if (c > 0) out += ',';
        out += names[c];
    }
    out += '\n';
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t c = 0; c < m.cols; ++c) {
            if (c > 0) out += ',';
            out += format_double(m.at(r, c));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<int> read_label_csv(const std::string& path) {
    Table t = Table::load_csv(path);
    const auto& nums = t.numeric("label");
    std::vector<int> labels(nums.size());
    for (size_t i = 0; i < nums.size(); ++i) labels[i] = static_cast<int>(nums[i]);
    return labels;
}

void write_label_csv(const std::string& path, const std::vector<int>& labels) {
    std::string out = "label\n";
    for (int v : labels) {
        out += std::to_string(v);
        out += '\n';
    }
    write_text_file(path, out);
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage ") + name + ": " + e.message());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json load_json_artifact(const std::string& path, const char* what) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        raise(Errc::CorruptPayload, std::string(what) + ": " + e.what());
    }
}

std::map<std::string, size_t> class_count_map(const std::vector<int>& labels,
                                              const std::vector<std::string>& classes) {
    std::map<std::string, size_t> counts;
    for (const auto& name : classes) counts[name] = 0;
    for (int label : labels) ++counts[classes[static_cast<size_t>(label)]];
    return counts;
}

} // namespace

// ---- stages ------------------------------------------------------------------

void run_prepare(const ExperimentConfig& config) {
    stage("prepare", [&] {
        Table raw = Table::load_csv(config.dataset);
        PreparedData prep = fit_pipeline(raw, config.pipeline, derive_seed(config.seed, "split"));

        SmoteConfig smote = config.smote;
        smote.seed = derive_seed(config.seed, "smote");
        ResampledData balanced = smote_oversample(prep.x_train, prep.y_train, smote);

        write_text_file(artifact_path(config, "prepared/pipeline.json"),
                        prep.pipeline.to_json());
        write_matrix_csv(artifact_path(config, "prepared/X_train.csv"), prep.x_train,
                         prep.feature_names);
        write_matrix_csv(artifact_path(config, "prepared/X_test.csv"), prep.x_test,
                         prep.feature_names);
        write_label_csv(artifact_path(config, "prepared/y_train.csv"), prep.y_train);
        write_label_csv(artifact_path(config, "prepared/y_test.csv"), prep.y_test);
        write_matrix_csv(artifact_path(config, "prepared/X_train_balanced.csv"), balanced.x,
                         prep.feature_names);
        write_label_csv(artifact_path(config, "prepared/y_train_balanced.csv"), balanced.y);

        Table cleaned = cleaned_view(raw, prep.pipeline);
        write_text_file(artifact_path(config, "prepared/train_raw.csv"),
                        cleaned.select_rows(prep.train_indices).to_csv_text());
        write_text_file(artifact_path(config, "prepared/test_raw.csv"),
                        cleaned.select_rows(prep.test_indices).to_csv_text());

        json counts;
        counts["raw_rows"] = raw.n_rows();
        counts["raw_cols"] = raw.n_cols();
        counts["cleaned_cols"] = cleaned.n_cols();
        counts["n_features"] = prep.feature_names.size();
        counts["train_rows"] = prep.x_train.rows;
        counts["test_rows"] = prep.x_test.rows;
        counts["train_class_counts"] =
            class_count_map(prep.y_train, prep.pipeline.target_classes);
        counts["test_class_counts"] = class_count_map(prep.y_test, prep.pipeline.target_classes);
        counts["synthetic_rows"] = balanced.synthetic_count;
        counts["balanced_class_counts"] =
            class_count_map(balanced.y, prep.pipeline.target_classes);
        counts["log1p_columns"] = prep.pipeline.log1p_applied;
        write_text_file(artifact_path(config, "prepared/counts.json"), counts.dump(2));
        return 0;
    });
}

void run_train(const ExperimentConfig& config) {
    stage("train", [&] {
        Matrix x = read_matrix_csv(artifact_path(config, "prepared/X_train_balanced.csv"));
        std::vector<int> y = read_label_csv(artifact_path(config, "prepared/y_train_balanced.csv"));
        for (const auto& entry : config.learners) {
            auto model = fit(entry.spec, x, y, derive_seed(config.seed, "learner:" + entry.name));
            write_text_file(artifact_path(config, "models/" + entry.name + ".json"),
                            save_model(*model));
        }
        return 0;
    });
}

void run_evaluate(const ExperimentConfig& config) {
    stage("evaluate", [&] {
        Matrix x_test = read_matrix_csv(artifact_path(config, "prepared/X_test.csv"));
        std::vector<int> y_test = read_label_csv(artifact_path(config, "prepared/y_test.csv"));

        json metrics;
        for (const auto& entry : config.learners) {
            auto model =
                load_model(read_text_file(artifact_path(config, "models/" + entry.name + ".json")));
            WeightedReport report = classification_report(y_test, model->predict(x_test));
            json per_class = json::array();
            for (const auto& c : report.per_class)
                per_class.push_back({{"label", c.label},
                                     {"precision", c.precision},
                                     {"recall", c.recall},
                                     {"f1", c.f1},
                                     {"support", c.support}});
            metrics[entry.name] = {{"precision", report.precision},
                                   {"recall", report.recall},
                                   {"f1", report.f1},
                                   {"support", report.support},
                                   {"converged", model->converged()},
                                   {"per_class", per_class}};
        }
        write_text_file(artifact_path(config, "eval/metrics.json"), metrics.dump(2));
        return 0;
    });
}

namespace {

WeightedReport report_from_json(const json& j) {
    WeightedReport report;
    report.precision = j.at("precision").get<double>();
    report.recall = j.at("recall").get<double>();
    report.f1 = j.at("f1").get<double>();
    report.support = j.at("support").get<size_t>();
    for (const auto& c : j.at("per_class"))
        report.per_class.push_back({c.at("label").get<int>(), c.at("precision").get<double>(),
                                    c.at("recall").get<double>(), c.at("f1").get<double>(),
                                    c.at("support").get<size_t>()});
    return report;
}

// Prediction log rows: row_index,raw_completion,parsed,true_label.
// Unparseable completions count as "No" (the majority class) for scoring.
WeightedReport llm_report_from_log(const std::string& csv_text) {
    Table t = Table::from_csv_text(csv_text);
    std::vector<int> y_true, y_pred;
    const auto& parsed_col = t.column("parsed");
    const auto& true_col = t.column("true_label");
    auto cell = [](const Table::Column& col, size_t r) {
        return col.schema.kind == ColumnKind::Categorical ? col.cats[r]
                                                          : format_double(col.nums[r]);
    };
    for (size_t r = 0; r < t.n_rows(); ++r) {
        y_true.push_back(cell(true_col, r) == "Yes" ? 1 : 0);
        y_pred.push_back(cell(parsed_col, r) == "Yes" ? 1 : 0);
    }
    return classification_report(y_true, y_pred);
}

} // namespace

void run_report(const ExperimentConfig& config) {
    stage("report", [&] {
        json metrics = load_json_artifact(artifact_path(config, "eval/metrics.json"),
                                          "evaluation metrics");
        std::vector<std::pair<std::string, WeightedReport>> rows;
        for (const auto& entry : config.learners) {
            if (!metrics.contains(entry.name))
                raise(Errc::MissingValue, "no metrics for learner '" + entry.name + "'");
            rows.push_back({display_name(entry.name), report_from_json(metrics.at(entry.name))});
        }

        std::string predictions_path = artifact_path(config, "llm/predictions.csv");
        if (std::filesystem::exists(predictions_path))
            rows.push_back(
                {"LLM (fine-tuned)", llm_report_from_log(read_text_file(predictions_path))});

        write_text_file(artifact_path(config, "report.txt"), render_report(rows));
        write_text_file(artifact_path(config, "report.csv"), render_report_csv(rows));
        return 0;
    });
}

// ---- llm stages ---------------------------------------------------------------

namespace {

// train_raw.csv keeps the target column; split it off for corpus building.
std::pair<Table, std::vector<std::string>> split_target(const Table& raw_rows,
                                                        const std::string& target) {
    std::vector<std::string> labels = raw_rows.categorical(target);
    return {raw_rows.without_columns({target}), labels};
}

// Readable reconstruction of synthetic rows: undo scaling, decode categorical
// codes by nearest integer and invert log1p on transformed columns.
Table synthetic_view(const Matrix& x, size_t first_synthetic, const FittedPipeline& fitted) {
    std::vector<Table::Column> cols;
    for (size_t c = 0; c < fitted.feature_names.size(); ++c) {
        const std::string& name = fitted.feature_names[c];
        bool encoded = fitted.encoder_maps.count(name) > 0;
        bool logged = std::find(fitted.log1p_applied.begin(), fitted.log1p_applied.end(), name) !=
                      fitted.log1p_applied.end();

        std::vector<std::string> decode;
        if (encoded) {
            decode.resize(fitted.encoder_maps.at(name).size());
            for (const auto& [value, code] : fitted.encoder_maps.at(name))
                decode[static_cast<size_t>(code)] = value;
        }

        Table::Column col;
        col.schema.name = name;
        col.schema.kind = encoded ? ColumnKind::Categorical : ColumnKind::Numeric;
        for (size_t r = first_synthetic; r < x.rows; ++r) {
            double v = x.at(r, c);
            auto it = fitted.scaler_params.find(name);
            if (it != fitted.scaler_params.end()) v = v * it->second.std_dev + it->second.mean;
            if (encoded) {
                long code = std::lround(v);
                code = std::clamp(code, 0l, static_cast<long>(decode.size()) - 1);
                col.cats.push_back(decode[static_cast<size_t>(code)]);
            } else {
                if (logged) v = std::expm1(v);
                col.nums.push_back(v);
            }
        }
        cols.push_back(std::move(col));
    }
    return Table(std::move(cols));
}

} // namespace

void run_llm_prepare(const ExperimentConfig& config) {
    stage("llm-prepare", [&] {
        Table train_raw =
            Table::load_csv(artifact_path(config, "prepared/train_raw.csv"));
        auto [features, labels] = split_target(train_raw, config.pipeline.target);
        std::string corpus = build_jsonl(features, labels);

        if (config.llm.include_synthetic) {
            FittedPipeline fitted = FittedPipeline::from_json(
                read_text_file(artifact_path(config, "prepared/pipeline.json")));
            Matrix balanced =
                read_matrix_csv(artifact_path(config, "prepared/X_train_balanced.csv"));
            std::vector<int> y =
                read_label_csv(artifact_path(config, "prepared/y_train_balanced.csv"));
            size_t first_synthetic = train_raw.n_rows();
            Table synth = synthetic_view(balanced, first_synthetic, fitted);
            std::vector<std::string> synth_labels;
            for (size_t r = first_synthetic; r < balanced.rows; ++r)
                synth_labels.push_back(fitted.target_classes[static_cast<size_t>(y[r])]);
            corpus += build_jsonl(synth, synth_labels);
        }

        write_text_file(artifact_path(config, config.llm.corpus_path), corpus);
        return 0;
    });
}

FineTuneJob run_llm_finetune(const ExperimentConfig& config) {
    return stage("llm-finetune", [&] {
        std::string corpus = read_text_file(artifact_path(config, config.llm.corpus_path));
        FineTuneJob job = run_finetune(config.client_config(), corpus);
        json j{{"job_id", job.job_id},
               {"status", job_status_name(job.status)},
               {"fine_tuned_model", job.fine_tuned_model}};
        write_text_file(artifact_path(config, "llm/job.json"), j.dump(2));
        return job;
    });
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void run_llm_predict(const ExperimentConfig& config, const std::string& model_id) {
    stage("llm-predict", [&] {
        std::string model = model_id;
        if (model.empty()) {
            json job = load_json_artifact(artifact_path(config, "llm/job.json"), "fine-tune job");
            if (job.at("status").get<std::string>() != "succeeded")
                raise(Errc::Service, "fine-tune job did not succeed; no model to query");
            model = job.at("fine_tuned_model").get<std::string>();
        }

        Table test_raw = Table::load_csv(artifact_path(config, "prepared/test_raw.csv"));
        auto [features, labels] = split_target(test_raw, config.pipeline.target);
        std::vector<std::string> prompts;
        for (size_t r = 0; r < features.n_rows(); ++r) prompts.push_back(build_prompt(features, r));

        std::vector<LlmPrediction> predictions =
            llm_predict_batch(config.client_config(), model, prompts);

        std::string log = "row_index,raw_completion,parsed,true_label\n";
        for (size_t r = 0; r < predictions.size(); ++r) {
            log += std::to_string(r);
            log += ',';
            log += csv_quote(predictions[r].raw_completion);
            log += ',';
            log += parsed_label_name(predictions[r].parsed);
            log += ',';
            log += labels[r];
            log += '\n';
        }
        write_text_file(artifact_path(config, "llm/predictions.csv"), log);
        return 0;
    });
}

// ---- full run -------------------------------------------------------------------

RunSummary run_experiment(const ExperimentConfig& config) {
    RunSummary summary;
    auto timed = [&](const char* name, auto&& f) {
        auto start = std::chrono::steady_clock::now();
        f();
        summary.stage_seconds[name] = seconds_since(start);
    };

    timed("prepare", [&] { run_prepare(config); });
    timed("train", [&] { run_train(config); });
    timed("evaluate", [&] { run_evaluate(config); });
    if (config.llm.enabled) {
        timed("llm-prepare", [&] { run_llm_prepare(config); });
        timed("llm-finetune", [&] { run_llm_finetune(config); });
        timed("llm-predict", [&] { run_llm_predict(config, ""); });
    }
    timed("report", [&] { run_report(config); });

    json metrics =
        load_json_artifact(artifact_path(config, "eval/metrics.json"), "evaluation metrics");
    for (const auto& entry : config.learners)
        summary.model_reports[entry.name] = report_from_json(metrics.at(entry.name));

    json manifest;
    manifest["toolkit_version"] = kToolkitVersion;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = hex64(fnv1a64(config.to_json()));
    manifest["dataset_hash"] = hex64(fnv1a64(read_text_file(config.dataset)));
    manifest["counts"] =
        load_json_artifact(artifact_path(config, "prepared/counts.json"), "prepare counts");
    json models;
    for (const auto& [name, report] : summary.model_reports)
        models[name] = {{"precision", report.precision},
                        {"recall", report.recall},
                        {"f1", report.f1},
                        {"support", report.support}};
    manifest["models"] = models;
    json stage_seconds;
    for (const auto& [name, secs] : summary.stage_seconds) stage_seconds[name] = secs;
    manifest["stage_seconds"] = stage_seconds;
    summary.manifest_json = manifest.dump(2);
    write_text_file(artifact_path(config, "manifest.json"), summary.manifest_json);
    return summary;
}

} // namespace attrikit
