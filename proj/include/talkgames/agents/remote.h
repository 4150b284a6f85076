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

#ifndef TALKGAMES_AGENTS_REMOTE_H_
#define TALKGAMES_AGENTS_REMOTE_H_

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/agents/policy.h"
#include "talkgames/dialogue/conversation.h"

namespace talkgames::agents {

class ChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Timeout : public ChatError {
 public:
  using ChatError::ChatError;
};
class HttpError : public ChatError {
 public:
  HttpError(int status, const std::string& what) : ChatError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};
class MalformedResponse : public ChatError {
 public:
  using ChatError::ChatError;
};

struct RemoteAgentConfig {
  std::string endpoint;  // e.g. http://localhost:8000
  std::string model = "llama-3-8b-instruct";
  std::string api_key;
  double temperature = 1.0;
  int max_tokens = 300;
  int max_retries = 3;
  double timeout_seconds = 60.0;
  double backoff_seconds = 0.5;  // first retry delay, doubled each retry

  // Fills endpoint and api_key from GAMETALK_LLM_ENDPOINT and
  // GAMETALK_LLM_API_KEY when set.
  static RemoteAgentConfig FromEnvironment(RemoteAgentConfig base);
  static RemoteAgentConfig FromEnvironment();
  // Throws std::invalid_argument.
  void Validate() const;
};

// Anything that turns a message list into an assistant reply.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string Complete(const std::vector<dialogue::Message>& messages) = 0;
};

// OpenAI-compatible chat-completions client with exponential backoff.
class HttpChatClient : public ChatBackend {
 public:
  explicit HttpChatClient(RemoteAgentConfig config);

  // Throws the last ChatError once the retry budget is spent.
  std::string Complete(const std::vector<dialogue::Message>& messages) override;

  // Request body for `messages`; exposed for inspection.
  std::string RequestBody(const std::vector<dialogue::Message>& messages) const;

  int retries_used() const { return retries_used_; }
  // Receives one line per retry.
  void set_logger(std::function<void(const std::string&)> logger) {
    logger_ = std::move(logger);
  }
  // Replaces the sleep between retries (tests use a no-op).
  void set_sleeper(std::function<void(double)> sleeper) { sleeper_ = std::move(sleeper); }

 private:
  std::string Attempt(const std::string& body);

  RemoteAgentConfig config_;
  int retries_used_ = 0;
  std::function<void(const std::string&)> logger_;
  std::function<void(double)> sleeper_;
};

// Elicitation request appended to a player's view.
std::string RenderElicitation(const dialogue::Conversation& conversation, int player,
                              const std::vector<game::Action>& candidates,
                              ElicitTarget target);

// Reads "action: probability" pairs. Missing actions get zero; negative values
// are clamped; the result is renormalized. Returns uniform with the fallback
// flag when nothing usable is found.
Distribution ParseElicitation(const std::string& reply,
                              const std::vector<game::Action>& candidates);

// Agent whose turns come from a chat backend.
class RemoteAgent : public AgentPolicy {
 public:
  RemoteAgent(std::shared_ptr<ChatBackend> backend, std::string name = "remote");

  std::string name() const override { return name_; }
  // Throws AgentUnavailable when the backend fails.
  ActResult Act(const dialogue::Conversation& conversation, int player,
                util::Rng& rng) override;
  Distribution ElicitProbs(const dialogue::Conversation& conversation, int player,
                           const std::vector<game::Action>& candidates,
                           ElicitTarget target) override;

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::string name_;
};

}  // namespace talkgames::agents

#endif  // TALKGAMES_AGENTS_REMOTE_H_
