#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "llm/client.hpp"
#include "llm/corpus.hpp"
#include "llm/mock_service.hpp"
#include "test_helpers.hpp"

using namespace attrikit;

namespace {

void set_key(const char* value) {
    if (value)
        setenv(kApiKeyEnvVar, value, 1);
    else
        unsetenv(kApiKeyEnvVar);
}

Table tiny_rows() {
    return Table::from_csv_text("Age,Dept,Income\n41,Sales,5993\n49,\"R,D\",5130\n");
}

} // namespace

TEST_SUITE("llm") {

TEST_CASE("employee serialization is name=value in schema order") {
    Table t = tiny_rows();
    CHECK(serialize_employee(t, 0) == "Age=41; Dept=Sales; Income=5993");
    CHECK(serialize_employee(t, 1) == "Age=49; Dept=R,D; Income=5130");
    CHECK(build_prompt(t, 0) ==
          std::string(kPromptPrefix) + "Age=41; Dept=Sales; Income=5993");
}

TEST_CASE("numeric rendering is shortest round trip") {
    Table t = Table::from_csv_text("a\n1.5\n0.1\n2\n");
    CHECK(serialize_employee(t, 0) == "a=1.5");
    CHECK(serialize_employee(t, 1) == "a=0.1");
    CHECK(serialize_employee(t, 2) == "a=2");
}

TEST_CASE("jsonl lines are strict two-key objects in input order") {
    Table t = tiny_rows();
    std::string jsonl = build_jsonl(t, {"No", "Yes"});
    std::istringstream in(jsonl);
    std::string line;
    size_t lines = 0;
    while (std::getline(in, line)) {
        auto obj = nlohmann::json::parse(line);
        REQUIRE(obj.is_object());
        CHECK(obj.size() == 2);
        CHECK(obj.contains("prompt"));
        CHECK(obj.contains("completion"));
        CHECK(line.rfind("{\"prompt\":", 0) == 0); // prompt serialized first
        ++lines;
    }
    CHECK(lines == 2);
    CHECK(jsonl.back() == '\n');
    auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
    CHECK(first.at("completion") == "No");
    CHECK(first.at("prompt").get<std::string>().rfind(kPromptPrefix, 0) == 0);
}

TEST_CASE("jsonl validation") {
    Table t = tiny_rows();
    CHECK_RAISES_CODE(build_jsonl(t, {"No"}), Errc::LengthMismatch);
    CHECK_RAISES_CODE(build_jsonl(t, {"No", "Perhaps"}), Errc::NonBinaryLabel);
}

TEST_CASE("completion parsing finds the first standalone yes/no") {
    CHECK(parse_completion("Yes") == ParsedLabel::Yes);
    CHECK(parse_completion("no") == ParsedLabel::No);
    CHECK(parse_completion("  YES!") == ParsedLabel::Yes);
    CHECK(parse_completion("answer: No.") == ParsedLabel::No);
    CHECK(parse_completion("yes, but no") == ParsedLabel::Yes);
    CHECK(parse_completion("I think NO rather than yes") == ParsedLabel::No);
    CHECK(parse_completion("maybe") == ParsedLabel::Unparseable);
    CHECK(parse_completion("nope") == ParsedLabel::Unparseable);
    CHECK(parse_completion("yesno") == ParsedLabel::Unparseable);
    CHECK(parse_completion("") == ParsedLabel::Unparseable);
    CHECK(parse_completion("42") == ParsedLabel::Unparseable);
}

TEST_CASE("completion parsing is case and punctuation insensitive") {
    const char* yes_variants[] = {"yes", "YES", "Yes", "yEs", "(yes)", "\"Yes\"", "yes\n"};
    for (const char* v : yes_variants) CHECK(parse_completion(v) == ParsedLabel::Yes);
    const char* no_variants[] = {"no", "NO", "No", "nO", "[no]", "no...", "\tno\t"};
    for (const char* v : no_variants) CHECK(parse_completion(v) == ParsedLabel::No);
}

TEST_CASE("mock service round trip: upload, poll, predict") {
    set_key("unit-test-key");
    MockService service;
    service.start();
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());

    Table t = tiny_rows();
    std::string jsonl = build_jsonl(t, {"No", "Yes"});
    FineTuneJob job = run_finetune(config, jsonl);
    CHECK(job.status == JobStatus::Succeeded);
    CHECK(!job.fine_tuned_model.empty());
    CHECK(!job.job_id.empty());

    LlmPrediction hit = llm_predict(config, job.fine_tuned_model, build_prompt(t, 1));
    CHECK(hit.raw_completion == "Yes");
    CHECK(hit.parsed == ParsedLabel::Yes);

    LlmPrediction miss = llm_predict(config, job.fine_tuned_model, "never seen before");
    CHECK(miss.raw_completion == "Maybe");
    CHECK(miss.parsed == ParsedLabel::Unparseable);
    CHECK(service.completion_requests() == 2);
}

TEST_CASE("batch predictions preserve prompt order") {
    set_key("unit-test-key");
    MockService service;
    service.start();
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());
    config.max_parallel = 3;

    Table t = tiny_rows();
    FineTuneJob job = run_finetune(config, build_jsonl(t, {"No", "Yes"}));
    std::vector<std::string> prompts{build_prompt(t, 0), "unknown", build_prompt(t, 1)};
    auto out = llm_predict_batch(config, job.fine_tuned_model, prompts);
    REQUIRE(out.size() == 3);
    CHECK(out[0].raw_completion == "No");
    CHECK(out[1].parsed == ParsedLabel::Unparseable);
    CHECK(out[2].raw_completion == "Yes");
}

TEST_CASE("missing credential fails before any request is sent") {
    set_key(nullptr);
    MockService service;
    service.start();
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());
    CHECK_RAISES_CODE(llm_predict(config, "m", "p"), Errc::Auth);
    CHECK_RAISES_CODE(run_finetune(config, "{}\n"), Errc::Auth);
    CHECK(service.completion_requests() == 0);
    set_key("unit-test-key");
}

TEST_CASE("a service that checks credentials rejects the wrong key") {
    set_key("wrong-key");
    MockService service;
    MockServiceOptions options;
    options.expected_key = "right-key";
    service.start(0, options);
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());
    CHECK_RAISES_CODE(run_finetune(config, "{}\n"), Errc::Auth);

    set_key("right-key");
    Table t = tiny_rows();
    FineTuneJob job = run_finetune(config, build_jsonl(t, {"No", "Yes"}));
    CHECK(job.status == JobStatus::Succeeded);
    set_key("unit-test-key");
}

TEST_CASE("failing jobs surface their terminal status") {
    set_key("unit-test-key");
    MockService service;
    MockServiceOptions options;
    options.fail_jobs = true;
    service.start(0, options);
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());
    Table t = tiny_rows();
    FineTuneJob job = run_finetune(config, build_jsonl(t, {"No", "Yes"}));
    CHECK(job.status == JobStatus::Failed);
    CHECK(job.fine_tuned_model.empty());
}

TEST_CASE("slow jobs are polled through the backoff schedule") {
    set_key("unit-test-key");
    MockService service;
    MockServiceOptions options;
    options.polls_until_success = 5;
    service.start(0, options);
    LlmClientConfig config = LlmClientConfig::mock_profile(service.url());
    Table t = tiny_rows();
    FineTuneJob job = run_finetune(config, build_jsonl(t, {"No", "Yes"}));
    CHECK(job.status == JobStatus::Succeeded);
}

TEST_CASE("an unreachable service maps to a service error") {
    set_key("unit-test-key");
    LlmClientConfig config = LlmClientConfig::mock_profile("http://127.0.0.1:1");
    CHECK_RAISES_CODE(llm_predict(config, "m", "p"), Errc::Service);
}

} // TEST_SUITE
