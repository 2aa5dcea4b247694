#include "reception/http_backend.hpp"

#include <thread>

#include <httplib.h>

#include "http_common.hpp"
#include "reception/error.hpp"
#include "reception/wire.hpp"

namespace reception::protocol {

namespace {

struct Reply {
  int status = 0;
  std::string body;
};

std::string error_detail(const std::string& body) {
  try {
    auto j = wire::json::parse(body);
    if (j.is_object() && j.contains("detail") && j["detail"].is_string()) {
      return j["detail"].get<std::string>();
    }
  } catch (const wire::json::exception&) {
  }
  return body;
}

template <typename Call>
std::string with_retries(const std::string& what, const RetryPolicy& policy, Call&& call) {
  const int attempts = policy.max_retries + 1;
  std::string last_failure;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy.base_delay * (1 << (attempt - 1)));
    httplib::Result res = call();
    if (!res) {
      last_failure = what + ": " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status >= 200 && status < 300) return res->body;
    if (status >= 500 && status != 501) {
      last_failure = what + ": HTTP " + std::to_string(status) + " " + error_detail(res->body);
      continue;
    }
    const std::string detail = error_detail(res->body);
    if (status == 400) throw ValidationError(what + ": " + detail);
    if (status == 501) throw CapabilityError(what + ": " + detail);
    throw ProtocolError(what + ": unexpected HTTP " + std::to_string(status) + " " + detail);
  }
  throw TransportError(last_failure, attempts);
}

template <typename Decode>
auto decode_reply(const std::string& what, const std::string& body, Decode&& decode) {
  try {
    return decode(wire::parse_body(body));
  } catch (const ValidationError& e) {
    throw ProtocolError(what + ": malformed response: " + e.what());
  }
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, ClientOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.rfind("http://", 0) != 0) {
    throw ValidationError("backend URL must start with http:// (got '" + base_url_ + "')");
  }
}

std::string HttpBackend::get(const std::string& path) const {
  return with_retries("GET " + base_url_ + path, options_.retry, [&] {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(options_.connect_timeout);
    cli.set_read_timeout(options_.read_timeout);
    return cli.Get(path);
  });
}

std::string HttpBackend::post(const std::string& path, const std::string& body) const {
  return with_retries("POST " + base_url_ + path, options_.retry, [&] {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(options_.connect_timeout);
    cli.set_read_timeout(options_.read_timeout);
    return cli.Post(path, body, "application/json");
  });
}

BackendInfo HttpBackend::info() const {
  std::lock_guard lock(info_mutex_);
  if (!info_) {
    info_ = decode_reply("info", get("/v1/info"), wire::decode_info);
  }
  return *info_;
}

std::vector<std::string> HttpBackend::generate(const GenerateRequest& request) const {
  const std::string body = wire::dump(wire::encode_generate_request(request));
  return decode_reply("generate", post("/v1/generate", body), wire::decode_generate_response);
}

EmbedResult HttpBackend::embed(std::span<const std::string> texts) const {
  EmbedResult all;
  for (std::size_t start = 0; start < texts.size(); start += kMaxBatch) {
    const auto chunk = texts.subspan(start, std::min(kMaxBatch, texts.size() - start));
    const std::string body =
        wire::dump(wire::encode_texts(std::vector<std::string>(chunk.begin(), chunk.end())));
    EmbedResult part = decode_reply("embed", post("/v1/embed", body), wire::decode_embed_response);
    if (start > 0 && part.dim != all.dim) throw ProtocolError("embed: dim changed between batches");
    all.dim = part.dim;
    for (auto& v : part.vectors) all.vectors.push_back(std::move(v));
  }
  return all;
}

std::vector<SentimentScore> HttpBackend::sentiment(std::span<const std::string> texts) const {
  std::vector<SentimentScore> all;
  for (std::size_t start = 0; start < texts.size(); start += kMaxBatch) {
    const auto chunk = texts.subspan(start, std::min(kMaxBatch, texts.size() - start));
    const std::string body =
        wire::dump(wire::encode_texts(std::vector<std::string>(chunk.begin(), chunk.end())));
    auto part = decode_reply("sentiment", post("/v1/sentiment", body), wire::decode_sentiment_response);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

ProtocolServer::ProtocolServer(const Backend& backend)
    : backend_(backend), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
    http::respond(res, [&] { return wire::encode_info(backend_.info()); });
  });

  srv.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
    http::respond(res, [&] {
      const auto gen = wire::decode_generate_request(wire::parse_body(req.body));
      return wire::encode_generate_response(
          protocol::generate(backend_, gen.author, gen.message, gen.n, gen.params));
    });
  });

  auto batch = [](const httplib::Request& req) {
    auto texts = wire::decode_texts(wire::parse_body(req.body));
    if (texts.size() > kMaxBatch) {
      throw ValidationError("batch of " + std::to_string(texts.size()) + " texts exceeds limit of " +
                            std::to_string(kMaxBatch));
    }
    return texts;
  };

  srv.Post("/v1/embed", [this, batch](const httplib::Request& req, httplib::Response& res) {
    http::respond(res, [&] {
      const auto texts = batch(req);
      const auto vectors = protocol::embed(backend_, texts);
      EmbedResult out;
      out.dim = backend_.info().embed_dim;
      for (const auto& v : vectors) out.vectors.emplace_back(v.components().begin(), v.components().end());
      return wire::encode_embed_response(out);
    });
  });

  srv.Post("/v1/sentiment", [this, batch](const httplib::Request& req, httplib::Response& res) {
    http::respond(res, [&] {
      const auto texts = batch(req);
      return wire::encode_sentiment_response(protocol::sentiment(backend_, texts));
    });
  });
}

ProtocolServer::~ProtocolServer() { stop(); }

int ProtocolServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind protocol server on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind protocol server on " + host + ":" + std::to_string(port));
  }
  return port;
}

void ProtocolServer::listen() { server_->listen_after_bind(); }

void ProtocolServer::stop() {
  if (server_) server_->stop();
}

void ProtocolServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace reception::protocol
