#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "reception/protocol.hpp"

// JSON bodies of the scoring protocol:
//   GET  /v1/info       -> {"name","embed_dim","capabilities"}
//   POST /v1/generate   {"author","message","n","params":{...}} -> {"responses":[...]}
//   POST /v1/embed      {"texts":[...]} -> {"dim","vectors"}
//   POST /v1/sentiment  {"texts":[...]} -> {"scores":[{"neg","neu","pos","s"}]}
//   errors              {"error","detail"}
// Decoders throw ValidationError on malformed bodies.
namespace reception::wire {

using json = nlohmann::json;

json encode_info(const protocol::BackendInfo& info);
protocol::BackendInfo decode_info(const json& body);

json encode_params(const protocol::SamplingParams& params);
// Absent fields keep their defaults.
protocol::SamplingParams decode_params(const json& body);

json encode_generate_request(const protocol::GenerateRequest& req);
protocol::GenerateRequest decode_generate_request(const json& body);

json encode_generate_response(const std::vector<std::string>& responses);
std::vector<std::string> decode_generate_response(const json& body);

json encode_texts(const std::vector<std::string>& texts);
std::vector<std::string> decode_texts(const json& body);

json encode_embed_response(const protocol::EmbedResult& result);
protocol::EmbedResult decode_embed_response(const json& body);

json encode_sentiment_response(const std::vector<protocol::SentimentScore>& scores);
std::vector<protocol::SentimentScore> decode_sentiment_response(const json& body);

json error_body(const std::string& error, const std::string& detail);

// Parses a request/response body; throws ValidationError on invalid JSON.
json parse_body(const std::string& text);

// Compact UTF-8 dump; invalid UTF-8 is replaced rather than thrown on.
std::string dump(const json& body);

}  // namespace reception::wire
