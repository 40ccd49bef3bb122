#include "mock_service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "../errors.hpp"

namespace attrikit {

using nlohmann::json;

struct MockService::Impl {
    httplib::Server server;
    std::thread runner;
    MockServiceOptions options;
    int port = 0;

    std::mutex mutex;
    std::map<std::string, std::string> corpus; // prompt -> completion
    int files = 0;
    int jobs = 0;
    int polls = 0;
    std::atomic<size_t> completions{0};

    bool authorized(const httplib::Request& req) const {
        if (options.expected_key.empty()) return true;
        return req.get_header_value("Authorization") == "Bearer " + options.expected_key;
    }

    void install_routes() {
        auto guard = [this](const httplib::Request& req, httplib::Response& res) {
            if (authorized(req)) return true;
            res.status = 401;
            res.set_content(R"({"error":"invalid credential"})", "application/json");
            return false;
        };

        server.Post("/v1/files", [this, guard](const httplib::Request& req,
                                               httplib::Response& res) {
            if (!guard(req, res)) return;
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::exception&) {
                res.status = 400;
                res.set_content(R"({"error":"bad json"})", "application/json");
                return;
            }
            std::lock_guard<std::mutex> lock(mutex);
            corpus.clear();
            std::string content = body.value("content", "");
            size_t pos = 0;
            while (pos < content.size()) {
                size_t eol = content.find('\n', pos);
                if (eol == std::string::npos) eol = content.size();
                std::string line = content.substr(pos, eol - pos);
                pos = eol + 1;
                if (line.empty()) continue;
                try {
                    json record = json::parse(line);
                    corpus[record.at("prompt").get<std::string>()] =
                        record.at("completion").get<std::string>();
                } catch (const json::exception&) {
                    res.status = 400;
                    res.set_content(R"({"error":"bad jsonl line"})", "application/json");
                    return;
                }
            }
            ++files;
            res.set_content(json{{"id", "file-" + std::to_string(files)},
                                 {"object", "file"}}
                                .dump(),
                            "application/json");
        });

        server.Post("/v1/fine_tuning/jobs", [this, guard](const httplib::Request& req,
                                                          httplib::Response& res) {
            if (!guard(req, res)) return;
            std::lock_guard<std::mutex> lock(mutex);
            ++jobs;
            polls = 0;
            res.set_content(json{{"id", "ftjob-" + std::to_string(jobs)},
                                 {"status", "queued"}}
                                .dump(),
                            "application/json");
        });

        server.Get(R"(/v1/fine_tuning/jobs/([\w-]+))", [this, guard](const httplib::Request& req,
                                                                     httplib::Response& res) {
            if (!guard(req, res)) return;
            std::lock_guard<std::mutex> lock(mutex);
            ++polls;
            json body{{"id", req.matches[1].str()}};
            if (polls < options.polls_until_success) {
                body["status"] = polls == 1 ? "queued" : "running";
            } else if (options.fail_jobs) {
                body["status"] = "failed";
            } else {
                body["status"] = "succeeded";
                body["fine_tuned_model"] = "ft:mock-" + std::to_string(jobs);
            }
            res.set_content(body.dump(), "application/json");
        });

        server.Post("/v1/completions", [this, guard](const httplib::Request& req,
                                                     httplib::Response& res) {
            if (!guard(req, res)) return;
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::exception&) {
                res.status = 400;
                res.set_content(R"({"error":"bad json"})", "application/json");
                return;
            }
            std::string prompt = body.value("prompt", "");
            std::string completion = "Maybe";
            {
                std::lock_guard<std::mutex> lock(mutex);
                auto it = corpus.find(prompt);
                if (it != corpus.end()) completion = it->second;
            }
            completions.fetch_add(1);
            res.set_content(json{{"choices", json::array({{{"text", completion}}})}}.dump(),
                            "application/json");
        });
    }
};

MockService::MockService() : impl_(std::make_unique<Impl>()) {}

MockService::~MockService() { stop(); }

void MockService::start(int port, MockServiceOptions options) {
    impl_->options = std::move(options);
    impl_->install_routes();

    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->port <= 0) raise(Errc::PortInUse, "no free local port");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port))
            raise(Errc::PortInUse, "port " + std::to_string(port) + " is unavailable");
        impl_->port = port;
    }
    impl_->runner = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockService::stop() {
    if (impl_ && impl_->runner.joinable()) {
        impl_->server.stop();
        impl_->runner.join();
    }
}

int MockService::port() const { return impl_->port; }

std::string MockService::url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

size_t MockService::completion_requests() const { return impl_->completions.load(); }

} // namespace attrikit
