// Copyright 2026 The Talkgames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "talkgames/agents/remote.h"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "talkgames/dialogue/templates.h"
#include "talkgames/dialogue/turn.h"

namespace talkgames::agents {
namespace {

using nlohmann::json;

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Parses a number at `pos` (after optional spaces); returns false if none.
bool ReadNumber(const std::string& text, std::size_t pos, double* value) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size()) return false;
  const char* begin = text.c_str() + pos;
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(v)) return false;
  *value = v;
  return true;
}

}  // namespace

RemoteAgentConfig RemoteAgentConfig::FromEnvironment(RemoteAgentConfig base) {
  if (const char* endpoint = std::getenv("GAMETALK_LLM_ENDPOINT")) base.endpoint = endpoint;
  if (const char* key = std::getenv("GAMETALK_LLM_API_KEY")) base.api_key = key;
  return base;
}

RemoteAgentConfig RemoteAgentConfig::FromEnvironment() {
  return FromEnvironment(RemoteAgentConfig());
}

void RemoteAgentConfig::Validate() const {
  if (endpoint.empty()) throw std::invalid_argument("remote endpoint is not set");
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be > 0");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("timeout must be > 0");
}

HttpChatClient::HttpChatClient(RemoteAgentConfig config) : config_(std::move(config)) {
  config_.Validate();
  sleeper_ = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

std::string HttpChatClient::RequestBody(
    const std::vector<dialogue::Message>& messages) const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"model", config_.model},
              {"messages", std::move(msgs)},
              {"temperature", config_.temperature},
              {"max_tokens", config_.max_tokens}}
      .dump();
}

std::string HttpChatClient::Attempt(const std::string& body) {
  httplib::Client client(config_.endpoint);
  const auto seconds = static_cast<time_t>(config_.timeout_seconds);
  const auto micros = static_cast<time_t>(
      (config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Timeout("chat request timed out: " + httplib::to_string(err));
    }
    throw HttpError(0, "chat request failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw HttpError(res->status, "chat endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unexpected chat response: ") + e.what());
  }
}

std::string HttpChatClient::Complete(const std::vector<dialogue::Message>& messages) {
  const std::string body = RequestBody(messages);
  double delay = config_.backoff_seconds;
  for (int attempt = 0;; ++attempt) {
    try {
      return Attempt(body);
    } catch (const ChatError& e) {
      if (attempt >= config_.max_retries) throw;
      ++retries_used_;
      if (logger_) {
        logger_("retry " + std::to_string(attempt + 1) + "/" +
                std::to_string(config_.max_retries) + " after: " + e.what());
      }
      sleeper_(delay);
      delay *= 2.0;
    }
  }
}

std::string RenderElicitation(const dialogue::Conversation& conversation, int player,
                              const std::vector<game::Action>& candidates,
                              ElicitTarget target) {
  std::string list;
  for (const auto& c : candidates) {
    if (!list.empty()) list += '\n';
    list += dialogue::FormatAction(c);
  }
  const std::string subject = target == ElicitTarget::kSelf
                                  ? "you will play"
                                  : dialogue::PlayerName(1 - player) + " will play";
  return conversation.templates().Render(dialogue::kElicitation,
                                         {{"subject", subject}, {"candidates", list}});
}

Distribution ParseElicitation(const std::string& reply,
                              const std::vector<game::Action>& candidates) {
  const std::string text = Lower(reply);
  std::vector<double> weights(candidates.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string label = Lower(dialogue::FormatAction(candidates[i]));
    std::size_t pos = 0;
    while ((pos = text.find(label, pos)) != std::string::npos) {
      const bool left_ok =
          pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
      std::size_t after = pos + label.size();
      while (after < text.size() && text[after] == ' ') ++after;
      double value = 0.0;
      if (left_ok && after < text.size() && text[after] == ':' &&
          ReadNumber(text, after + 1, &value)) {
        weights[i] = value;
        any = true;
        break;
      }
      pos += label.size();
    }
  }
  if (!any) {
    Distribution d = Distribution::Uniform(candidates);
    d.fallback = true;
    return d;
  }
  return Distribution::Normalized(candidates, std::move(weights));
}

RemoteAgent::RemoteAgent(std::shared_ptr<ChatBackend> backend, std::string name)
    : backend_(std::move(backend)), name_(std::move(name)) {
  if (!backend_) throw std::invalid_argument("remote agent needs a backend");
}

ActResult RemoteAgent::Act(const dialogue::Conversation& conversation, int player,
                           util::Rng& /*rng*/) {
  try {
    return {backend_->Complete(conversation.View(player).messages), {}};
  } catch (const ChatError& e) {
    throw AgentUnavailable(name_ + ": " + e.what());
  }
}

Distribution RemoteAgent::ElicitProbs(const dialogue::Conversation& conversation,
                                      int player,
                                      const std::vector<game::Action>& candidates,
                                      ElicitTarget target) {
  auto messages = conversation.View(player).messages;
  messages.push_back(
      {"system", RenderElicitation(conversation, player, candidates, target)});
  try {
    return ParseElicitation(backend_->Complete(messages), candidates);
  } catch (const ChatError&) {
    Distribution d = Distribution::Uniform(candidates);
    d.fallback = true;
    return d;
  }
}

}  // namespace talkgames::agents
