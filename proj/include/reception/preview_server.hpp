#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "reception/protocol.hpp"

namespace httplib {
class Server;
}

namespace reception::preview {

struct ServerOptions {
  std::string cors_origin = "*";
  // Append-only JSONL of (timestamp, request, summary); off by default.
  std::optional<std::filesystem::path> audit_log;
};

//   POST /preview   DraftRequest -> PreviewResult (seed echoed)
//   POST /compare   {"a": DraftRequest, "b": DraftRequest} -> ComparisonResult
//   GET  /healthz   {"status","backend":{"reachable","name"|"detail"}}
// Validation failures answer 400; backend failures 502 with a retry hint.
// Holds no per-request state.
class PreviewServer {
 public:
  PreviewServer(const protocol::Backend& backend, ServerOptions options = {});
  ~PreviewServer();
  PreviewServer(const PreviewServer&) = delete;
  PreviewServer& operator=(const PreviewServer&) = delete;

  int bind(const std::string& host, int port = 0);
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  void audit(const std::string& endpoint, const std::string& request, const std::string& summary);

  const protocol::Backend& backend_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex audit_mutex_;
};

}  // namespace reception::preview
