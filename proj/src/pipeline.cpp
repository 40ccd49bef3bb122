#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "rng.hpp"

namespace attrikit {

using nlohmann::json;

PipelineSpec PipelineSpec::defaults() {
    PipelineSpec spec;
    spec.drop_columns = {"EmployeeCount", "StandardHours", "Over18", "EmployeeNumber"};
    spec.skew_threshold = 0.5;
    spec.composites = {
        {"WorkExperience",
         {"TotalWorkingYears", "YearsAtCompany", "YearsInCurrentRole", "YearsSinceLastPromotion",
          "YearsWithCurrManager"}},
        {"OverallSatisfaction",
         {"JobSatisfaction", "EnvironmentSatisfaction", "RelationshipSatisfaction",
          "WorkLifeBalance"}},
    };
    spec.target = "Attrition";
    spec.test_fraction = 0.2;
    spec.standardize = true;
    return spec;
}

void PipelineSpec::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(Errc::ConfigMissingRequired, "test_fraction must be in (0, 1)");
    if (skew_threshold < 0.0)
        raise(Errc::ConfigMissingRequired, "skew_threshold must be >= 0");
    if (target.empty()) raise(Errc::ConfigMissingRequired, "target column name is required");
    for (const auto& comp : composites)
        for (const auto& src : comp.sources)
            if (std::find(drop_columns.begin(), drop_columns.end(), src) != drop_columns.end())
                raise(Errc::ConfigMissingRequired,
                      "composite source '" + src + "' is also listed in drop_columns");
}

Table drop_columns(const Table& table, const std::vector<std::string>& names) {
    return table.without_columns(names);
}

double skewness(const std::vector<double>& values) {
    const size_t n = values.size();
    if (n < 3) raise(Errc::DegenerateColumn, "skewness needs at least 3 values");
    double mean = 0;
    for (double x : values) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0, m3 = 0;
    for (double x : values) {
        double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (m2 == 0.0) raise(Errc::DegenerateColumn, "skewness undefined for zero variance");
    double g1 = m3 / std::pow(m2, 1.5);
    double nd = static_cast<double>(n);
    return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
}

namespace {

bool column_is_skewed(const std::vector<double>& v, double threshold) {
    if (v.size() < 3) return false;
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    (void)mean;
    if (constant) return false;
    return skewness(v) > threshold;
}

Table log1p_columns(const Table& table, const std::vector<std::string>& names) {
    auto cols = table.columns();
    for (auto& col : cols) {
        if (std::find(names.begin(), names.end(), col.schema.name) == names.end()) continue;
        for (size_t r = 0; r < col.nums.size(); ++r) {
            if (col.nums[r] < 0.0)
                raise(Errc::NegativeValue, "column '" + col.schema.name + "', row " +
                                               std::to_string(r) + " is negative; log1p needs x >= 0");
            col.nums[r] = std::log1p(col.nums[r]);
        }
    }
    return Table(std::move(cols));
}

} // namespace

std::pair<Table, std::vector<std::string>> apply_log1p_where_skewed(const Table& table,
                                                                    double threshold,
                                                                    const std::string& target) {
    std::vector<std::string> transformed;
    for (const auto& col : table.columns()) {
        if (col.schema.kind != ColumnKind::Numeric) continue;
        if (col.schema.name == target) continue;
        if (column_is_skewed(col.nums, threshold)) transformed.push_back(col.schema.name);
    }
    return {log1p_columns(table, transformed), transformed};
}

Table engineer_composites(const Table& table, const std::vector<CompositeDef>& composites) {
    Table current = table;
    for (const auto& comp : composites) {
        std::vector<const std::vector<double>*> sources;
        sources.reserve(comp.sources.size());
        for (const auto& name : comp.sources) sources.push_back(&current.numeric(name));

        Table::Column fresh;
        fresh.schema.name = comp.name;
        fresh.schema.kind = ColumnKind::Numeric;
        fresh.nums.resize(current.n_rows());
        for (size_t r = 0; r < current.n_rows(); ++r) {
            double sum = 0;
            for (const auto* src : sources) sum += (*src)[r];
            fresh.nums[r] = sum / static_cast<double>(sources.size());
        }

        auto cols = current.without_columns(comp.sources).columns();
        cols.push_back(std::move(fresh)); // composites land after the surviving columns
        current = Table(std::move(cols));
    }
    return current;
}

std::pair<Table, std::map<std::string, std::map<std::string, int>>> encode_categoricals(
    const Table& table) {
    std::map<std::string, std::map<std::string, int>> maps;
    for (const auto& col : table.columns()) {
        if (col.schema.kind != ColumnKind::Categorical) continue;
        std::set<std::string> uniq(col.cats.begin(), col.cats.end());
        std::map<std::string, int> m;
        int code = 0;
        for (const auto& v : uniq) m[v] = code++;
        maps[col.schema.name] = std::move(m);
    }
    return {apply_encoders(table, maps), maps};
}

Table apply_encoders(const Table& table,
                     const std::map<std::string, std::map<std::string, int>>& maps) {
    auto cols = table.columns();
    for (auto& col : cols) {
        auto it = maps.find(col.schema.name);
        if (it == maps.end()) continue;
        if (col.schema.kind != ColumnKind::Categorical)
            raise(Errc::NonNumericColumn, "encoder map for numeric column '" + col.schema.name + "'");
        col.nums.resize(col.cats.size());
        for (size_t r = 0; r < col.cats.size(); ++r) {
            auto hit = it->second.find(col.cats[r]);
            if (hit == it->second.end())
                raise(Errc::UnseenCategory,
                      "column '" + col.schema.name + "': value '" + col.cats[r] + "' not in fitted map");
            col.nums[r] = static_cast<double>(hit->second);
        }
        col.cats.clear();
        col.schema.kind = ColumnKind::Numeric;
    }
    return Table(std::move(cols));
}

SplitResult stratified_split(const std::vector<int>& labels, double test_fraction, uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(Errc::ConfigMissingRequired, "test_fraction must be in (0, 1)");
    const size_t n = labels.size();

    std::map<int, std::vector<size_t>> by_class;
    for (size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
    for (const auto& [label, members] : by_class)
        if (members.size() < 2)
            raise(Errc::ClassTooSmall,
                  "class " + std::to_string(label) + " has fewer than 2 members");

    const long long total_test = std::llround(static_cast<double>(n) * test_fraction);

    // Largest-remainder allocation so per-class counts sum to the rounded total.
    struct Alloc {
        int label;
        size_t take;
        double remainder;
    };
    std::vector<Alloc> alloc;
    long long assigned = 0;
    for (const auto& [label, members] : by_class) {
        double exact = static_cast<double>(members.size()) * test_fraction;
        size_t base = static_cast<size_t>(std::floor(exact));
        alloc.push_back({label, base, exact - std::floor(exact)});
        assigned += static_cast<long long>(base);
    }
    long long deficit = total_test - assigned;
    std::stable_sort(alloc.begin(), alloc.end(),
                     [](const Alloc& a, const Alloc& b) { return a.remainder > b.remainder; });
    for (auto& a : alloc) {
        if (deficit <= 0) break;
        ++a.take;
        --deficit;
    }

    Rng rng(seed);
    SplitResult result;
    result.seed = seed;
    for (const auto& [label, members] : by_class) {
        size_t take = 0;
        for (const auto& a : alloc)
            if (a.label == label) take = a.take;
        std::vector<size_t> shuffled = members;
        rng.shuffle(shuffled);
        for (size_t i = 0; i < shuffled.size(); ++i)
            (i < take ? result.test_indices : result.train_indices).push_back(shuffled[i]);
    }
    std::sort(result.train_indices.begin(), result.train_indices.end());
    std::sort(result.test_indices.begin(), result.test_indices.end());
    return result;
}

StandardizeResult standardize(const Matrix& train, const Matrix& test,
                              const std::vector<std::string>& feature_names) {
    if (train.cols != test.cols && test.rows != 0)
        raise(Errc::DimensionMismatch, "train/test column counts differ");
    if (feature_names.size() != train.cols)
        raise(Errc::DimensionMismatch, "feature name count does not match matrix width");

    StandardizeResult out;
    out.train = train;
    out.test = test;
    std::vector<double> means(train.cols, 0.0), stds(train.cols, 0.0);
    for (size_t c = 0; c < train.cols; ++c) {
        double mean = 0;
        for (size_t r = 0; r < train.rows; ++r) mean += train.at(r, c);
        mean /= static_cast<double>(train.rows);
        double var = 0;
        for (size_t r = 0; r < train.rows; ++r) {
            double d = train.at(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(train.rows);
        double sd = std::sqrt(var);
        if (sd == 0.0)
            raise(Errc::ZeroVariance, "feature '" + feature_names[c] + "' is constant on train");
        means[c] = mean;
        stds[c] = sd;
        out.params[feature_names[c]] = {mean, sd};
    }
    for (size_t r = 0; r < train.rows; ++r)
        for (size_t c = 0; c < train.cols; ++c)
            out.train.at(r, c) = (train.at(r, c) - means[c]) / stds[c];
    for (size_t r = 0; r < test.rows; ++r)
        for (size_t c = 0; c < test.cols; ++c)
            out.test.at(r, c) = (test.at(r, c) - means[c]) / stds[c];
    return out;
}

namespace {

Matrix table_to_matrix(const Table& t) {
    Matrix m(t.n_rows(), t.n_cols());
    for (size_t c = 0; c < t.n_cols(); ++c) {
        const auto& col = t.column(c);
        if (col.schema.kind != ColumnKind::Numeric)
            raise(Errc::NonNumericColumn, "'" + col.schema.name + "' still categorical");
        for (size_t r = 0; r < t.n_rows(); ++r) m.at(r, c) = col.nums[r];
    }
    return m;
}

std::pair<std::vector<int>, std::vector<std::string>> encode_target(const Table& t,
                                                                    const std::string& target) {
    const auto& cats = t.categorical(target);
    std::set<std::string> uniq(cats.begin(), cats.end());
    std::vector<std::string> classes(uniq.begin(), uniq.end());
    std::vector<int> codes(cats.size());
    for (size_t i = 0; i < cats.size(); ++i)
        codes[i] = static_cast<int>(
            std::distance(classes.begin(), std::find(classes.begin(), classes.end(), cats[i])));
    return {codes, classes};
}

std::vector<int> encode_target_with(const Table& t, const std::string& target,
                                    const std::vector<std::string>& classes) {
    const auto& cats = t.categorical(target);
    std::vector<int> codes(cats.size());
    for (size_t i = 0; i < cats.size(); ++i) {
        auto it = std::find(classes.begin(), classes.end(), cats[i]);
        if (it == classes.end())
            raise(Errc::UnseenCategory, "target value '" + cats[i] + "' not in fitted classes");
        codes[i] = static_cast<int>(std::distance(classes.begin(), it));
    }
    return codes;
}

PreparedData assemble(const Table& encoded_features, const std::vector<int>& labels,
                      FittedPipeline fitted, bool fit_scaler) {
    Matrix all = table_to_matrix(encoded_features);
    SplitResult split = stratified_split(labels, fitted.test_fraction, fitted.seed);

    PreparedData out;
    out.train_indices = split.train_indices;
    out.test_indices = split.test_indices;
    out.feature_names = fitted.feature_names;

    Matrix train(split.train_indices.size(), all.cols);
    Matrix test(split.test_indices.size(), all.cols);
    for (size_t i = 0; i < split.train_indices.size(); ++i)
        for (size_t c = 0; c < all.cols; ++c) train.at(i, c) = all.at(split.train_indices[i], c);
    for (size_t i = 0; i < split.test_indices.size(); ++i)
        for (size_t c = 0; c < all.cols; ++c) test.at(i, c) = all.at(split.test_indices[i], c);

    for (size_t i : split.train_indices) out.y_train.push_back(labels[i]);
    for (size_t i : split.test_indices) out.y_test.push_back(labels[i]);

    if (fit_scaler) {
        auto scaled = standardize(train, test, fitted.feature_names);
        out.x_train = std::move(scaled.train);
        out.x_test = std::move(scaled.test);
        fitted.scaler_params = std::move(scaled.params);
    } else if (!fitted.scaler_params.empty()) {
        out.x_train = std::move(train);
        out.x_test = std::move(test);
        for (size_t c = 0; c < all.cols; ++c) {
            auto it = fitted.scaler_params.find(fitted.feature_names[c]);
            if (it == fitted.scaler_params.end())
                raise(Errc::CorruptPayload, "missing scaler params for '" + fitted.feature_names[c] + "'");
            const auto& p = it->second;
            for (size_t r = 0; r < out.x_train.rows; ++r)
                out.x_train.at(r, c) = (out.x_train.at(r, c) - p.mean) / p.std_dev;
            for (size_t r = 0; r < out.x_test.rows; ++r)
                out.x_test.at(r, c) = (out.x_test.at(r, c) - p.mean) / p.std_dev;
        }
    } else {
        out.x_train = std::move(train);
        out.x_test = std::move(test);
    }
    out.pipeline = std::move(fitted);
    return out;
}

} // namespace

PreparedData fit_pipeline(const Table& raw, const PipelineSpec& spec, uint64_t seed) {
    spec.validate();
    Table cleaned = drop_columns(raw, spec.drop_columns);
    auto [delogged, log_cols] = apply_log1p_where_skewed(cleaned, spec.skew_threshold, spec.target);
    Table composed = engineer_composites(delogged, spec.composites);

    auto [labels, classes] = encode_target(composed, spec.target);
    Table features = composed.without_columns({spec.target});
    auto [encoded, maps] = encode_categoricals(features);

    FittedPipeline fitted;
    fitted.dropped = spec.drop_columns;
    fitted.log1p_applied = log_cols;
    fitted.composite_defs = spec.composites;
    fitted.encoder_maps = maps;
    fitted.target = spec.target;
    fitted.target_classes = classes;
    fitted.test_fraction = spec.test_fraction;
    fitted.seed = seed;
    for (const auto& col : encoded.columns()) fitted.feature_names.push_back(col.schema.name);

    return assemble(encoded, labels, std::move(fitted), spec.standardize);
}

PreparedData replay_pipeline(const Table& raw, const FittedPipeline& fitted) {
    Table cleaned = drop_columns(raw, fitted.dropped);
    Table delogged = log1p_columns(cleaned, fitted.log1p_applied);
    Table composed = engineer_composites(delogged, fitted.composite_defs);

    std::vector<int> labels = encode_target_with(composed, fitted.target, fitted.target_classes);
    Table features = composed.without_columns({fitted.target});
    Table encoded = apply_encoders(features, fitted.encoder_maps);

    std::vector<std::string> names;
    for (const auto& col : encoded.columns()) names.push_back(col.schema.name);
    if (names != fitted.feature_names)
        raise(Errc::DimensionMismatch, "replay table columns do not match fitted pipeline");

    return assemble(encoded, labels, fitted, /*fit_scaler=*/false);
}

Table cleaned_view(const Table& raw, const FittedPipeline& fitted) {
    return drop_columns(raw, fitted.dropped);
}

std::string FittedPipeline::to_json() const {
    json j;
    j["version"] = version;
    j["dropped"] = dropped;
    j["log1p_applied"] = log1p_applied;
    json comps = json::array();
    for (const auto& c : composite_defs) comps.push_back({{"name", c.name}, {"sources", c.sources}});
    j["composites"] = comps;
    j["encoders"] = encoder_maps;
    json scalers;
    for (const auto& [name, p] : scaler_params)
        scalers[name] = {{"mean", p.mean}, {"std", p.std_dev}};
    j["scalers"] = scalers;
    j["feature_names"] = feature_names;
    j["target"] = target;
    j["target_classes"] = target_classes;
    j["test_fraction"] = test_fraction;
    j["seed"] = seed;
    return j.dump(2);
}

FittedPipeline FittedPipeline::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::CorruptPayload, std::string("fitted pipeline: ") + e.what());
    }
    try {
        FittedPipeline p;
        p.version = j.at("version").get<int>();
        if (p.version != 1)
            raise(Errc::VersionMismatch,
                  "fitted pipeline version " + std::to_string(p.version) + ", expected 1");
        p.dropped = j.at("dropped").get<std::vector<std::string>>();
        p.log1p_applied = j.at("log1p_applied").get<std::vector<std::string>>();
        for (const auto& c : j.at("composites"))
            p.composite_defs.push_back(
                {c.at("name").get<std::string>(), c.at("sources").get<std::vector<std::string>>()});
        p.encoder_maps =
            j.at("encoders").get<std::map<std::string, std::map<std::string, int>>>();
        for (auto it = j.at("scalers").begin(); it != j.at("scalers").end(); ++it)
            p.scaler_params[it.key()] = {it.value().at("mean").get<double>(),
                                         it.value().at("std").get<double>()};
        p.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        p.target = j.at("target").get<std::string>();
        p.target_classes = j.at("target_classes").get<std::vector<std::string>>();
        p.test_fraction = j.at("test_fraction").get<double>();
        p.seed = j.at("seed").get<uint64_t>();
        return p;
    } catch (const json::exception& e) {
        raise(Errc::CorruptPayload, std::string("fitted pipeline: ") + e.what());
    }
}

} // namespace attrikit
