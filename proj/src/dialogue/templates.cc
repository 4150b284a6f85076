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

#include "talkgames/dialogue/templates.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace talkgames::dialogue {

const std::map<std::string, std::string>& BuiltinTemplates();

namespace {

bool IsPlaceholderChar(char c) {
  return (c >= 'a' && c <= 'z') || c == '_' || (c >= '0' && c <= '9');
}

}  // namespace

const TemplateLibrary& TemplateLibrary::Builtin() {
  static const TemplateLibrary* library = [] {
    auto* lib = new TemplateLibrary;
    for (const auto& [name, text] : BuiltinTemplates()) {
      lib->templates_.emplace(name, text);
    }
    return lib;
  }();
  return *library;
}

TemplateLibrary TemplateLibrary::WithOverrides(const std::string& dir) {
  TemplateLibrary lib = Builtin();
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw TemplateError("template directory not found: " + dir);
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    lib.templates_[entry.path().stem().string()] = text.str();
  }
  return lib;
}

const std::string& TemplateLibrary::Raw(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw TemplateError("unknown template '" + std::string(name) + "'");
  }
  return it->second;
}

std::string TemplateLibrary::Render(std::string_view name,
                                    const TemplateVars& vars) const {
  const std::string& text = Raw(name);
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && IsPlaceholderChar(text[j])) ++j;
      if (j < text.size() && text[j] == '}' && j > i + 1) {
        const std::string_view key(text.data() + i + 1, j - i - 1);
        auto it = vars.find(key);
        if (it == vars.end()) {
          throw TemplateError("template '" + std::string(name) +
                              "' needs a value for {" + std::string(key) + "}");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";  // avoids "-0"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string PlayerName(int player) { return "Player-" + std::to_string(player + 1); }

std::string RenderSettingPrompt(const game::GameSpec& spec, int player,
                                const TemplateLibrary& templates) {
  TemplateVars vars{{"my_name", PlayerName(player)},
                    {"other_name", PlayerName(1 - player)},
                    {"max_interact", std::to_string(spec.max_interactions)}};
  switch (spec.kind) {
    case game::GameKind::kRps: {
      const bool no_paper =
          spec.rps_constrained && player == spec.constrained_player;
      return templates.Render(no_paper ? kRpsInitialNoPaper : kRpsInitial, vars);
    }
    case game::GameKind::kBertrand: {
      const auto& b = spec.bertrand;
      vars["max_interact"] = std::to_string(b.rounds);
      vars["products"] = b.product;
      vars["cost"] = FormatNumber(b.cost);
      vars["demand_den"] = FormatNumber(b.demand_slope);
      vars["max_price_with_demand"] = FormatNumber(b.p_max);
      return templates.Render(kBertrandInitial, vars);
    }
    case game::GameKind::kBargaining: {
      const auto& b = spec.bargaining;
      vars["products"] = b.product;
      if (player == spec.seller_player) {
        vars["cost"] = FormatNumber(b.cost);
        return templates.Render(kBargainingSeller, vars);
      }
      vars["value"] = FormatNumber(b.value);
      return templates.Render(kBargainingBuyer, vars);
    }
  }
  throw TemplateError("unsupported game");
}

std::string RenderOpponentPlayed(const TemplateLibrary& templates) {
  return templates.Render(kRpsOtherPlayed, {});
}

std::string RenderRoundResult(std::int64_t my_price, std::int64_t other_price,
                              double my_benefit,
                              const TemplateLibrary& templates) {
  return templates.Render(kBertrandRoundResult,
                          {{"my_price", std::to_string(my_price)},
                           {"other_price", std::to_string(other_price)},
                           {"my_benefit", FormatNumber(my_benefit)}});
}

std::string WrapLlama3System(std::string_view text) {
  std::string out = "<|start_header_id|>system<|end_header_id|> ";
  out += text;
  out += " <|eot_id|>\n";
  return out;
}

}  // namespace talkgames::dialogue
