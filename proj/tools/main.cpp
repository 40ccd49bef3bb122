#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrikit/c_api.h"

namespace {

struct ConfigHandle {
    ak_config_t* ptr = nullptr;
    ~ConfigHandle() { ak_config_free(ptr); }
};

struct TableHandle {
    ak_table_t* ptr = nullptr;
    ~TableHandle() { ak_table_free(ptr); }
};

struct StringOut {
    char* ptr = nullptr;
    ~StringOut() { ak_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

[[noreturn]] void fail(int status) {
    std::fprintf(stderr, "error (%s): %s\n", ak_status_name(status), ak_last_error());
    std::exit(1);
}

void check(int status) {
    if (status != AK_OK) fail(status);
}

struct CommonFlags {
    std::string config_path;
    std::string output_dir;
    std::string llm_url;
    uint64_t seed = 0;
    bool seed_set = false;
    bool no_llm = false;
    size_t smote_k = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)");
        cmd->add_option("--out", output_dir, "output directory override");
        cmd->add_option("--seed", seed, "master seed override")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--smote-k", smote_k, "SMOTE neighbour count override");
        cmd->add_option("--llm-url", llm_url, "fine-tuning service base URL");
        cmd->add_flag("--no-llm", no_llm, "disable the LLM stages");
    }

    ak_config_t* build() const {
        ak_config_t* config = nullptr;
        if (config_path.empty())
            check(ak_config_default(&config));
        else
            check(ak_config_load(config_path.c_str(), &config));
        if (seed_set) check(ak_config_set_seed(config, seed));
        if (!output_dir.empty()) check(ak_config_set_output_dir(config, output_dir.c_str()));
        if (smote_k > 0) check(ak_config_set_smote_k(config, smote_k));
        if (!llm_url.empty()) check(ak_config_set_llm_url(config, llm_url.c_str()));
        if (no_llm) check(ak_config_set_llm_enabled(config, 0));
        return config;
    }
};

void print_histogram(const ak_table_t* table, const std::string& column, size_t bins) {
    std::vector<double> lo(bins), hi(bins);
    std::vector<size_t> count(bins);
    check(ak_table_histogram(table, column.c_str(), bins, lo.data(), hi.data(), count.data()));
    size_t peak = 1;
    for (size_t c : count) peak = std::max(peak, c);
    for (size_t i = 0; i < bins; ++i) {
        if (hi[i] == 0 && lo[i] == 0 && count[i] == 0 && i > 0) break; // trailing padding
        size_t width = count[i] * 50 / peak;
        std::printf("  [%10.2f, %10.2f%c %6zu |%s\n", lo[i], hi[i],
                    i + 1 == bins ? ']' : ')', count[i], std::string(width, '#').c_str());
    }
}

void print_summary_row(const ak_table_t* table, const std::string& name) {
    double s[8];
    check(ak_table_summary(table, name.c_str(), s));
    std::printf("%-26s %6.0f %10.2f %10.2f %9.2f %9.2f %9.2f %9.2f %9.2f\n", name.c_str(), s[0],
                s[1], s[2], s[3], s[4], s[5], s[6], s[7]);
}

void print_class_distribution(const ak_table_t* table, const std::string& name) {
    StringOut json_out;
    check(ak_table_class_distribution(table, name.c_str(), &json_out.ptr));
    auto arr = nlohmann::json::parse(json_out.str());
    std::printf("%s:\n", name.c_str());
    for (const auto& entry : arr)
        std::printf("  %-20s %6zu  (%.3f)\n", entry.at("label").get<std::string>().c_str(),
                    entry.at("count").get<size_t>(), entry.at("fraction").get<double>());
}

int run_inspect(const std::string& data_path, const std::string& column, size_t bins) {
    TableHandle table;
    check(ak_table_load_csv(data_path.c_str(), &table.ptr));
    size_t rows = 0, cols = 0;
    check(ak_table_shape(table.ptr, &rows, &cols));
    std::printf("%s: %zu rows x %zu columns\n\n", data_path.c_str(), rows, cols);

    if (!column.empty()) {
        int numeric = 0;
        check(ak_table_column_is_numeric(table.ptr, column.c_str(), &numeric));
        if (numeric) {
            std::printf("%-26s %6s %10s %10s %9s %9s %9s %9s %9s\n", "column", "count", "mean",
                        "std", "min", "25%", "50%", "75%", "max");
            print_summary_row(table.ptr, column);
            std::printf("\n");
            print_histogram(table.ptr, column, bins);
        } else {
            print_class_distribution(table.ptr, column);
        }
        return 0;
    }

    std::printf("%-26s %6s %10s %10s %9s %9s %9s %9s %9s\n", "column", "count", "mean", "std",
                "min", "25%", "50%", "75%", "max");
    std::vector<std::string> categorical;
    for (size_t i = 0; i < cols; ++i) {
        StringOut name;
        check(ak_table_column_name(table.ptr, i, &name.ptr));
        int numeric = 0;
        check(ak_table_column_is_numeric(table.ptr, name.str().c_str(), &numeric));
        if (numeric)
            print_summary_row(table.ptr, name.str());
        else
            categorical.push_back(name.str());
    }
    std::printf("\n");
    for (const auto& name : categorical) print_class_distribution(table.ptr, name);
    return 0;
}

std::string read_file_or_die(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
        std::exit(1);
    }
    std::string out;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Employee-attrition experiment toolkit"};
    app.require_subcommand(1);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "dataset statistics and histograms");
    std::string data_path = "data/ibm_hr_attrition.csv";
    std::string column;
    size_t bins = 10;
    inspect->add_option("--data", data_path, "CSV file to inspect");
    inspect->add_option("--column", column, "single column to describe");
    inspect->add_option("--bins", bins, "histogram bin count");

    CommonFlags flags;
    auto add_stage = [&](const char* name, const char* help) {
        auto* cmd = app.add_subcommand(name, help);
        flags.attach(cmd);
        return cmd;
    };

    auto* prepare = add_stage("prepare", "clean, transform, split and balance the dataset");
    auto* train = add_stage("train", "fit every configured learner on the prepared data");
    auto* evaluate = add_stage("evaluate", "score fitted models on the held-out test set");
    auto* report = add_stage("report", "render the comparison table from stored metrics");
    auto* run = add_stage("run", "prepare + train + evaluate + report in one go");
    auto* llm_prepare = add_stage("llm-prepare", "build the fine-tuning JSONL corpus");
    auto* llm_finetune = add_stage("llm-finetune", "upload the corpus and run a fine-tune job");
    auto* llm_predict = add_stage("llm-predict", "query the fine-tuned model on the test rows");
    std::string model_id;
    llm_predict->add_option("--model", model_id, "fine-tuned model id (default: last job's)");

    bool show_manifest = false;
    run->add_flag("--manifest", show_manifest, "print the run manifest JSON");

    CLI11_PARSE(app, argc, argv);

    if (inspect->parsed()) return run_inspect(data_path, column, bins);

    ConfigHandle config;
    config.ptr = flags.build();

    if (prepare->parsed()) {
        check(ak_run_prepare(config.ptr));
        std::printf("prepared artifacts written\n");
    } else if (train->parsed()) {
        check(ak_run_train(config.ptr));
        std::printf("models written\n");
    } else if (evaluate->parsed()) {
        check(ak_run_evaluate(config.ptr));
        std::printf("metrics written\n");
    } else if (report->parsed()) {
        check(ak_run_report(config.ptr));
        StringOut dir;
        check(ak_config_to_json(config.ptr, &dir.ptr));
        auto parsed = nlohmann::json::parse(dir.str());
        std::string out_dir = parsed.at("output_dir").get<std::string>();
        std::fputs(read_file_or_die(out_dir + "/report.txt").c_str(), stdout);
    } else if (run->parsed()) {
        StringOut manifest;
        check(ak_run_experiment(config.ptr, &manifest.ptr));
        StringOut cfg_json;
        check(ak_config_to_json(config.ptr, &cfg_json.ptr));
        auto parsed = nlohmann::json::parse(cfg_json.str());
        std::string out_dir = parsed.at("output_dir").get<std::string>();
        std::fputs(read_file_or_die(out_dir + "/report.txt").c_str(), stdout);
        if (show_manifest) std::printf("\n%s\n", manifest.str().c_str());
    } else if (llm_prepare->parsed()) {
        check(ak_run_llm_prepare(config.ptr));
        std::printf("corpus written\n");
    } else if (llm_finetune->parsed()) {
        StringOut job;
        check(ak_run_llm_finetune(config.ptr, &job.ptr));
        std::printf("%s\n", job.str().c_str());
    } else if (llm_predict->parsed()) {
        check(ak_run_llm_predict(config.ptr, model_id.empty() ? nullptr : model_id.c_str()));
        std::printf("predictions written\n");
    }
    return 0;
}
