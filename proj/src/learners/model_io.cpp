#include "../errors.hpp"
#include "internal.hpp"
#include "learner.hpp"

namespace attrikit {

using nlohmann::json;

std::string save_model(const Model& model) {
    json j;
    j["format_version"] = 1;
    j["variant"] = model.variant();
    j["hyperparameters"] = model.hyperparameters_json();
    j["parameters"] = model.parameters_json();
    j["seed"] = model.seed();
    j["converged"] = model.converged();
    j["n_features"] = model.n_features();
    return j.dump(2);
}

namespace {

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<size_t>(), j.at("cols").get<size_t>());
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows * m.cols)
        raise(Errc::CorruptPayload, "matrix payload size mismatch");
    m.data = std::move(data);
    return m;
}

std::unique_ptr<Model> load_variant(const std::string& variant, const json& hyper,
                                    const json& params) {
    if (variant == "logistic_regression") {
        auto m = std::make_unique<LogisticModel>();
        m->spec.l2_c = hyper.at("C").get<double>();
        m->spec.tol = hyper.at("tol").get<double>();
        m->spec.max_iter = hyper.at("max_iter").get<size_t>();
        m->w = params.at("weights").get<std::vector<double>>();
        m->b = params.at("bias").get<double>();
        return m;
    }
    if (variant == "knn") {
        auto m = std::make_unique<KnnModel>();
        m->spec.k = hyper.at("k").get<size_t>();
        m->spec.leaf_size = hyper.at("leaf_size").get<size_t>();
        m->train_x = matrix_from_json(params.at("train_x"));
        m->train_y = params.at("train_y").get<std::vector<int>>();
        m->index = KdTree::build(m->train_x, m->spec.leaf_size);
        return m;
    }
    if (variant == "svm") {
        auto m = std::make_unique<SvmModel>();
        m->spec.c = hyper.at("C").get<double>();
        m->spec.tol = hyper.at("tol").get<double>();
        m->spec.max_iter = hyper.at("max_iter").get<size_t>();
        if (!hyper.at("gamma").is_string()) m->spec.gamma = hyper.at("gamma").get<double>();
        m->gamma = params.at("gamma").get<double>();
        m->bias = params.at("bias").get<double>();
        m->dual_coef = params.at("dual_coef").get<std::vector<double>>();
        m->support_vectors = matrix_from_json(params.at("support_vectors"));
        return m;
    }
    if (variant == "decision_tree") {
        auto m = std::make_unique<DecisionTreeModel>();
        m->spec.max_depth = hyper.at("max_depth").get<size_t>();
        m->nodes = tree_nodes_from_json(params.at("nodes"));
        return m;
    }
    if (variant == "random_forest") {
        auto m = std::make_unique<RandomForestModel>();
        m->spec.n_trees = hyper.at("n_trees").get<size_t>();
        m->spec.max_depth = hyper.at("max_depth").get<size_t>();
        m->spec.bootstrap = hyper.at("bootstrap").get<bool>();
        m->spec.sqrt_features = hyper.at("max_features").get<std::string>() == "sqrt";
        for (const auto& tree : params.at("trees")) m->trees.push_back(tree_nodes_from_json(tree));
        return m;
    }
    if (variant == "adaboost") {
        auto m = std::make_unique<AdaBoostModel>();
        m->spec.n_estimators = hyper.at("n_estimators").get<size_t>();
        m->spec.learning_rate = hyper.at("learning_rate").get<double>();
        for (const auto& stump : params.at("stumps"))
            m->stumps.push_back(tree_nodes_from_json(stump));
        m->alphas = params.at("alphas").get<std::vector<double>>();
        m->fallback_score = params.at("fallback_score").get<double>();
        return m;
    }
    if (variant == "gradient_boost") {
        auto m = std::make_unique<GradientBoostModel>();
        m->spec.learning_rate = hyper.at("learning_rate").get<double>();
        m->spec.n_estimators = hyper.at("n_estimators").get<size_t>();
        m->spec.max_depth = hyper.at("max_depth").get<size_t>();
        m->spec.lambda = hyper.at("lambda").get<double>();
        m->spec.sqrt_features = hyper.at("col_subsample").get<std::string>() == "sqrt";
        m->f0 = params.at("f0").get<double>();
        for (const auto& tree : params.at("trees")) m->trees.push_back(tree_nodes_from_json(tree));
        m->loss_history = params.at("loss_history").get<std::vector<double>>();
        return m;
    }
    raise(Errc::CorruptPayload, "unknown model variant '" + variant + "'");
}

} // namespace

std::unique_ptr<Model> load_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::CorruptPayload, std::string("model payload: ") + e.what());
    }
    try {
        int version = j.at("format_version").get<int>();
        if (version != 1)
            raise(Errc::VersionMismatch,
                  "model format version " + std::to_string(version) + ", expected 1");
        auto model = load_variant(j.at("variant").get<std::string>(), j.at("hyperparameters"),
                                  j.at("parameters"));
        model->seed_ = j.at("seed").get<uint64_t>();
        model->converged_ = j.at("converged").get<bool>();
        model->n_features_ = j.at("n_features").get<size_t>();
        return model;
    } catch (const json::exception& e) {
        raise(Errc::CorruptPayload, std::string("model payload: ") + e.what());
    }
}

} // namespace attrikit
