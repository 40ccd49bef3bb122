#pragma once

#include <memory>
#include <string>

namespace attrikit {

struct MockServiceOptions {
    int polls_until_success = 2; // status polls before the job reports succeeded
    bool fail_jobs = false;      // terminal status becomes failed instead
    std::string expected_key;    // non-empty: requests need Authorization: Bearer <key>
};

// In-process fine-tuning service double. Speaks the same four endpoints as
// the real client target; completions echo the label stored for the prompt
// in the uploaded corpus, "Maybe" for prompts it has never seen.
class MockService {
  public:
    MockService();
    ~MockService();
    MockService(const MockService&) = delete;
    MockService& operator=(const MockService&) = delete;

    // port 0 picks a free port; raises PortInUse when binding fails.
    void start(int port = 0, MockServiceOptions options = {});
    void stop();

    int port() const;
    std::string url() const;
    size_t completion_requests() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace attrikit
