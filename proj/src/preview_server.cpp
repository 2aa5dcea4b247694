#include "reception/preview_server.hpp"

#include <fstream>

#include <httplib.h>

#include "http_common.hpp"
#include "reception/error.hpp"
#include "reception/preview.hpp"
#include "reception/reports.hpp"
#include "reception/wire.hpp"

namespace reception::preview {

namespace {

const char* const kRetryHint = "the scoring backend failed; retry the request shortly";

// Like http::respond, but backend failures carry a retry hint.
template <typename Handler>
void respond_preview(httplib::Response& res, Handler&& handler) {
  try {
    http::write_json(res, 200, handler());
  } catch (const Error& e) {
    const int status = http::status_for(e);
    auto body = wire::error_body(to_string(e.kind()), e.what());
    if (status == 502) body["hint"] = kRetryHint;
    http::write_json(res, status, body);
  } catch (const std::exception& e) {
    http::write_json(res, 500, wire::error_body("internal", e.what()));
  }
}

}  // namespace

PreviewServer::PreviewServer(const protocol::Backend& backend, ServerOptions options)
    : backend_(backend), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  const std::string origin = options_.cors_origin;

  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/preview", [this](const httplib::Request& req, httplib::Response& res) {
    respond_preview(res, [&] {
      const auto draft = draft_from_json(wire::parse_body(req.body));
      const auto result = preview_draft(draft, backend_);
      audit("/preview", req.body, result.summary());
      return to_json(result);
    });
  });

  srv.Post("/compare", [this](const httplib::Request& req, httplib::Response& res) {
    respond_preview(res, [&] {
      const auto body = wire::parse_body(req.body);
      if (!body.is_object() || !body.contains("a") || !body.contains("b")) {
        throw ValidationError("compare body must be {\"a\": draft, \"b\": draft}");
      }
      const auto a = draft_from_json(body["a"]);
      const auto b = draft_from_json(body["b"]);
      std::optional<std::uint64_t> base;
      if (body.contains("seed") && !body["seed"].is_null()) {
        if (!body["seed"].is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        base = body["seed"].get<std::uint64_t>();
      }
      const auto result = base ? compare_drafts(a, b, backend_, *base) : compare_drafts(a, b, backend_);
      audit("/compare", req.body, result.a.summary() + " -> " + result.b.summary() + " (" + result.delta_text() + ")");
      return to_json(result);
    });
  });

  srv.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    wire::json body = {{"status", "ok"}};
    try {
      const auto info = backend_.info();
      body["backend"] = {{"reachable", true}, {"name", info.name}};
    } catch (const std::exception& e) {
      body["status"] = "degraded";
      body["backend"] = {{"reachable", false}, {"detail", e.what()}};
    }
    http::write_json(res, 200, body);
  });
}

PreviewServer::~PreviewServer() { stop(); }

void PreviewServer::audit(const std::string& endpoint, const std::string& request, const std::string& summary) {
  if (!options_.audit_log) return;
  wire::json request_json;
  try {
    request_json = wire::json::parse(request);
  } catch (const wire::json::exception&) {
    request_json = request;
  }
  const wire::json line = {
      {"timestamp", reports::utc_now()}, {"endpoint", endpoint}, {"request", request_json}, {"summary", summary}};
  std::lock_guard lock(audit_mutex_);
  std::ofstream out(*options_.audit_log, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to audit log " + options_.audit_log->string());
  out << wire::dump(line) << '\n';
}

int PreviewServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind preview server on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind preview server on " + host + ":" + std::to_string(port));
  }
  return port;
}

void PreviewServer::listen() { server_->listen_after_bind(); }

void PreviewServer::stop() {
  if (server_) server_->stop();
}

void PreviewServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace reception::preview
