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

#include "talkgames/dialogue/turn.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <regex>

namespace talkgames::dialogue {
namespace {

constexpr std::array<std::string_view, 3> kTagNames = {"think", "talk", "play"};

struct TagSpan {
  int tag = -1;
  std::size_t open_begin = 0;
  std::size_t body_begin = 0;
  std::size_t body_end = 0;
};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

// Matches "<name>" or "</name>" at `pos`, allowing inner whitespace. Returns
// the tag index and the position after '>' or -1.
int MatchTag(std::string_view text, std::size_t pos, bool closing,
             std::size_t* after) {
  if (pos >= text.size() || text[pos] != '<') return -1;
  std::size_t i = pos + 1;
  while (i < text.size() && IsSpace(text[i])) ++i;
  if (closing) {
    if (i >= text.size() || text[i] != '/') return -1;
    ++i;
    while (i < text.size() && IsSpace(text[i])) ++i;
  }
  for (int t = 0; t < static_cast<int>(kTagNames.size()); ++t) {
    const auto name = kTagNames[t];
    if (text.compare(i, name.size(), name) != 0) continue;
    std::size_t j = i + name.size();
    while (j < text.size() && IsSpace(text[j])) ++j;
    if (j < text.size() && text[j] == '>') {
      *after = j + 1;
      return t;
    }
  }
  return -1;
}

// Finds every tagged segment. An unclosed tag runs to the next opening tag.
std::vector<TagSpan> ScanTags(std::string_view text) {
  std::vector<TagSpan> spans;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    std::size_t after = 0;
    const int tag = MatchTag(text, pos, false, &after);
    if (tag < 0) {
      ++pos;
      continue;
    }
    TagSpan span{tag, pos, after, text.size()};
    std::size_t scan = after;
    std::size_t next_pos = text.size();
    while ((scan = text.find('<', scan)) != std::string_view::npos) {
      std::size_t close_after = 0;
      if (MatchTag(text, scan, true, &close_after) == tag) {
        span.body_end = scan;
        next_pos = close_after;
        break;
      }
      std::size_t dummy = 0;
      if (MatchTag(text, scan, false, &dummy) >= 0) {
        span.body_end = scan;
        next_pos = scan;
        break;
      }
      ++scan;
    }
    spans.push_back(span);
    pos = next_pos;
  }
  return spans;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

ParseError Unparseable(std::string_view body, std::string_view why) {
  return ParseError(ParseErrorKind::kUnparseableAction, 0, body.size(),
                    std::string(why) + ": '" + std::string(body) + "'");
}

game::Action ParseRpsPlay(std::string_view body) {
  const auto moves = MentionedMoves(body);
  if (moves.size() != 1) throw Unparseable(body, "expected exactly one move");
  return moves.front();
}

game::Action ParsePricePlay(std::string_view body) {
  std::string digits;
  std::string_view s = TrimView(body);
  if (!s.empty() && s.front() == '$') s = TrimView(s.substr(1));
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i];
    } else if (s[i] == ',' && !digits.empty() && i + 1 < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    } else {
      break;
    }
  }
  if (digits.empty()) throw Unparseable(body, "expected an integer price");
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] == '0') ++i;
  }
  if (i != s.size()) throw Unparseable(body, "price must be an integer");
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc()) throw Unparseable(body, "price out of range");
  return game::Price{value};
}

game::Action ParseDealPlay(std::string_view body) {
  std::string s = Lower(TrimView(body));
  while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
  if (TrimView(s) == "accept") return game::Accept{};
  static const std::regex kProposal(
      R"(^\s*(\d+)\s+units?\s+at\s+\$?\s*(\d+(?:\.\d+)?|\.\d+)\s+each\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, kProposal)) {
    throw Unparseable(body, "expected 'u units at $p each' or 'accept'");
  }
  game::Proposal proposal;
  try {
    proposal.units = std::stoi(m[1].str());
    proposal.price_cents = game::ToCents(std::stod(m[2].str()));
  } catch (const std::out_of_range&) {
    throw Unparseable(body, "number out of range");
  }
  if (proposal.units < 1) throw Unparseable(body, "units must be at least 1");
  return proposal;
}

std::string FormatDollars(std::int64_t cents) {
  std::string out = "$";
  if (cents < 0) {
    out += '-';
    cents = -cents;
  }
  out += std::to_string(cents / 100);
  if (cents % 100 != 0) {
    const auto frac = cents % 100;
    out += frac < 10 ? ".0" : ".";
    out += std::to_string(frac);
  }
  return out;
}

bool IsWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view ParseErrorKindName(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMissingThink:
      return "MissingThink";
    case ParseErrorKind::kMissingAction:
      return "MissingAction";
    case ParseErrorKind::kConflictingTags:
      return "ConflictingTags";
    case ParseErrorKind::kUnparseableAction:
      return "UnparseableAction";
  }
  return "Unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t begin, std::size_t end,
                       const std::string& detail)
    : std::runtime_error(std::string(ParseErrorKindName(kind)) + " [" +
                         std::to_string(begin) + "," + std::to_string(end) +
                         "): " + detail),
      kind_(kind),
      begin_(begin),
      end_(end) {}

std::vector<game::RpsMove> MentionedMoves(std::string_view text) {
  const std::string lower = Lower(text);
  std::vector<std::pair<std::size_t, game::RpsMove>> found;
  for (game::RpsMove move : game::kAllRpsMoves) {
    const auto name = game::RpsMoveName(move);
    std::size_t pos = 0;
    while ((pos = lower.find(name, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || !IsWordChar(lower[pos - 1]);
      const std::size_t end = pos + name.size();
      const bool right_ok = end == lower.size() || !IsWordChar(lower[end]);
      if (left_ok && right_ok) {
        found.emplace_back(pos, move);
        break;
      }
      pos = end;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<game::RpsMove> moves;
  for (const auto& [pos, move] : found) moves.push_back(move);
  return moves;
}

game::Action ParsePlay(std::string_view body, game::GameKind kind) {
  switch (kind) {
    case game::GameKind::kRps:
      return ParseRpsPlay(body);
    case game::GameKind::kBertrand:
      return ParsePricePlay(body);
    case game::GameKind::kBargaining:
      return ParseDealPlay(body);
  }
  throw Unparseable(body, "unknown game");
}

TurnContent ParseAgentOutput(std::string_view text, const game::GameSpec& spec) {
  std::array<std::optional<TagSpan>, 3> first;
  for (const TagSpan& span : ScanTags(text)) {
    auto& slot = first[span.tag];
    const auto body =
        TrimView(text.substr(span.body_begin, span.body_end - span.body_begin));
    if (!slot) {
      slot = span;
      continue;
    }
    const auto prev =
        TrimView(text.substr(slot->body_begin, slot->body_end - slot->body_begin));
    if (prev != body) {
      throw ParseError(ParseErrorKind::kConflictingTags, span.open_begin,
                       span.body_end,
                       "repeated <" + std::string(kTagNames[span.tag]) +
                           "> with different content");
    }
  }
  const auto body_of = [&](int tag) {
    return TrimView(text.substr(first[tag]->body_begin,
                                first[tag]->body_end - first[tag]->body_begin));
  };

  if (!first[0]) {
    throw ParseError(ParseErrorKind::kMissingThink, 0, text.size(),
                     "no <think> section");
  }
  TurnContent content;
  content.think = std::string(body_of(0));
  if (first[1]) content.talk = std::string(body_of(1));

  const bool needs_talk = spec.kind == game::GameKind::kBertrand;
  const bool needs_play = spec.kind != game::GameKind::kRps;
  if (!first[2] && (needs_play || !first[1])) {
    throw ParseError(ParseErrorKind::kMissingAction, 0, text.size(),
                     needs_play ? "no <play> section" : "no <talk> or <play> section");
  }
  if (needs_talk && !first[1]) {
    throw ParseError(ParseErrorKind::kMissingAction, 0, text.size(),
                     "no <talk> section");
  }
  if (first[2]) {
    const std::size_t raw_begin = first[2]->body_begin;
    const std::string_view raw =
        text.substr(raw_begin, first[2]->body_end - raw_begin);
    try {
      content.play = ParsePlay(raw, spec.kind);
    } catch (const ParseError& e) {
      throw ParseError(e.kind(), raw_begin + e.begin(), raw_begin + e.end(),
                       e.what());
    }
  }
  return content;
}

std::string FormatAction(const game::Action& action) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, game::RpsMove>) {
          return std::string(game::RpsMoveName(a));
        } else if constexpr (std::is_same_v<T, game::Price>) {
          return "$" + std::to_string(a.value);
        } else if constexpr (std::is_same_v<T, game::Proposal>) {
          return std::to_string(a.units) + (a.units == 1 ? " unit at " : " units at ") +
                 FormatDollars(a.price_cents) + " each";
        } else {
          return "accept";
        }
      },
      action);
}

std::string SerializeTurn(const TurnContent& content) {
  std::string out = "<think> " + content.think + " </think>";
  if (content.talk) out += " <talk> " + *content.talk + " </talk>";
  if (content.play) out += " <play> " + FormatAction(*content.play) + " </play>";
  return out;
}

}  // namespace talkgames::dialogue
