#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "reception/protocol.hpp"

namespace httplib {
class Server;
}

namespace reception::protocol {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{100};  // doubles on each retry
};

struct ClientOptions {
  RetryPolicy retry;
  std::chrono::seconds connect_timeout{5};
  std::chrono::seconds read_timeout{300};
};

// Client for a remote scoring backend ("http://host:port"). Transport
// failures and 5xx answers are retried with exponential backoff; 400 maps to
// ValidationError and 501 to CapabilityError, neither retried. Embed and
// sentiment batches are split into chunks of kMaxBatch. Safe for concurrent
// use: every request opens its own connection.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(std::string base_url, ClientOptions options = {});

  BackendInfo info() const override;  // fetched once, then cached
  std::vector<std::string> generate(const GenerateRequest& request) const override;
  EmbedResult embed(std::span<const std::string> texts) const override;
  std::vector<SentimentScore> sentiment(std::span<const std::string> texts) const override;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string get(const std::string& path) const;
  std::string post(const std::string& path, const std::string& body) const;

  std::string base_url_;
  ClientOptions options_;
  mutable std::mutex info_mutex_;
  mutable std::optional<BackendInfo> info_;
};

// Serves any Backend over the scoring protocol. Requests above kMaxBatch
// texts are rejected with 400.
class ProtocolServer {
 public:
  explicit ProtocolServer(const Backend& backend);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  // Returns the bound port; port 0 picks a free one.
  int bind(const std::string& host, int port = 0);
  // Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  const Backend& backend_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace reception::protocol
