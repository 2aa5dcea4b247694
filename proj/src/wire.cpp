#include "reception/wire.hpp"

#include "reception/error.hpp"

namespace reception::wire {

namespace {

const json& field(const json& body, const char* key) {
  if (!body.is_object()) throw ValidationError("body must be a JSON object");
  auto it = body.find(key);
  if (it == body.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& body, const char* key) {
  const json& v = field(body, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int int_field(const json& v, const char* key) {
  if (!v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double number_field(const json& v, const char* key) {
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<std::string> string_array(const json& v, const char* key) {
  if (!v.is_array()) throw ValidationError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string()) throw ValidationError(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

json encode_info(const protocol::BackendInfo& info) {
  json caps = json::array();
  for (auto c : info.capabilities) caps.push_back(std::string(protocol::to_string(c)));
  return {{"name", info.name}, {"embed_dim", info.embed_dim}, {"capabilities", caps}};
}

protocol::BackendInfo decode_info(const json& body) {
  protocol::BackendInfo info;
  info.name = string_field(body, "name");
  info.embed_dim = int_field(field(body, "embed_dim"), "embed_dim");
  for (const auto& name : string_array(field(body, "capabilities"), "capabilities")) {
    auto c = protocol::parse_capability(name);
    if (!c) throw ValidationError("unknown capability '" + name + "'");
    info.capabilities.push_back(*c);
  }
  return info;
}

json encode_params(const protocol::SamplingParams& p) {
  return {{"num_beams", p.num_beams},
          {"top_k", p.top_k},
          {"top_p", p.top_p},
          {"temperature", p.temperature},
          {"seed", p.seed ? json(*p.seed) : json(nullptr)}};
}

protocol::SamplingParams decode_params(const json& body) {
  if (!body.is_object()) throw ValidationError("params must be a JSON object");
  protocol::SamplingParams p;
  if (auto it = body.find("num_beams"); it != body.end()) p.num_beams = int_field(*it, "num_beams");
  if (auto it = body.find("top_k"); it != body.end()) p.top_k = int_field(*it, "top_k");
  if (auto it = body.find("top_p"); it != body.end()) p.top_p = number_field(*it, "top_p");
  if (auto it = body.find("temperature"); it != body.end()) p.temperature = number_field(*it, "temperature");
  if (auto it = body.find("seed"); it != body.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
    p.seed = it->get<std::uint64_t>();
  }
  return p;
}

json encode_generate_request(const protocol::GenerateRequest& r) {
  return {{"author", r.author}, {"message", r.message}, {"n", r.n}, {"params", encode_params(r.params)}};
}

protocol::GenerateRequest decode_generate_request(const json& body) {
  protocol::GenerateRequest r;
  r.author = string_field(body, "author");
  r.message = string_field(body, "message");
  r.n = int_field(field(body, "n"), "n");
  if (auto it = body.find("params"); it != body.end() && !it->is_null()) r.params = decode_params(*it);
  return r;
}

json encode_generate_response(const std::vector<std::string>& responses) {
  return {{"responses", responses}};
}

std::vector<std::string> decode_generate_response(const json& body) {
  return string_array(field(body, "responses"), "responses");
}

json encode_texts(const std::vector<std::string>& texts) { return {{"texts", texts}}; }

std::vector<std::string> decode_texts(const json& body) {
  return string_array(field(body, "texts"), "texts");
}

json encode_embed_response(const protocol::EmbedResult& r) {
  return {{"dim", r.dim}, {"vectors", r.vectors}};
}

protocol::EmbedResult decode_embed_response(const json& body) {
  protocol::EmbedResult r;
  r.dim = int_field(field(body, "dim"), "dim");
  const json& vs = field(body, "vectors");
  if (!vs.is_array()) throw ValidationError("field 'vectors' must be an array");
  for (const auto& v : vs) {
    if (!v.is_array()) throw ValidationError("each vector must be an array");
    std::vector<double> comps;
    comps.reserve(v.size());
    for (const auto& x : v) comps.push_back(number_field(x, "vectors"));
    r.vectors.push_back(std::move(comps));
  }
  return r;
}

json encode_sentiment_response(const std::vector<protocol::SentimentScore>& scores) {
  json arr = json::array();
  for (const auto& s : scores) {
    arr.push_back({{"neg", s.p_neg}, {"neu", s.p_neu}, {"pos", s.p_pos}, {"s", s.s}});
  }
  return {{"scores", arr}};
}

std::vector<protocol::SentimentScore> decode_sentiment_response(const json& body) {
  const json& arr = field(body, "scores");
  if (!arr.is_array()) throw ValidationError("field 'scores' must be an array");
  std::vector<protocol::SentimentScore> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    out.push_back({number_field(field(e, "neg"), "neg"), number_field(field(e, "neu"), "neu"),
                   number_field(field(e, "pos"), "pos"), number_field(field(e, "s"), "s")});
  }
  return out;
}

json error_body(const std::string& error, const std::string& detail) {
  return {{"error", error}, {"detail", detail}};
}

json parse_body(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON body: ") + e.what());
  }
}

std::string dump(const json& body) {
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace reception::wire
