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

#include "talkgames/game/instances.h"

#include <array>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "talkgames/util/random.h"

namespace talkgames::game {
namespace {

constexpr std::array<const char*, 16> kProducts = {
    "Luxury Face Creams",     "Waterproof Hiking Boots", "Espresso Machines",
    "Wireless Earbuds",       "Organic Olive Oil",       "Yoga Mats",
    "Mechanical Keyboards",   "Ceramic Cookware Sets",   "Electric Scooters",
    "Handmade Candles",       "Smart Thermostats",       "Running Shoes",
    "Artisan Chocolate Bars", "Camping Tents",           "Noise-Cancelling Headphones",
    "Stainless Steel Water Bottles"};

constexpr std::array<double, 5> kSlopes = {0.1, 0.2, 0.5, 1.0, 2.0};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double ParseNumber(const std::string& field, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw InvalidSpec("line " + std::to_string(line_no) + ": bad number '" +
                      field + "'");
  }
}

// Returns data rows after checking the header matches `expected`.
std::vector<std::vector<std::string>> ReadRows(
    const std::string& text, const std::vector<std::string>& expected) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitCsvLine(line);
    for (auto& f : fields) f = Trim(f);
    if (!header_seen) {
      if (line_no == 1 && !fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
        fields[0] = fields[0].substr(3);
      if (fields != expected) {
        throw InvalidSpec("unexpected CSV header: " + line);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      throw InvalidSpec("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(expected.size()) + " fields");
    }
    fields.push_back(std::to_string(line_no));
    rows.push_back(std::move(fields));
  }
  if (!header_seen) throw InvalidSpec("empty CSV");
  return rows;
}

}  // namespace

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::vector<BertrandParams> GenerateBertrandInstances(std::size_t count,
                                                      std::uint64_t seed,
                                                      int rounds) {
  util::Rng rng(seed);
  std::vector<BertrandParams> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    BertrandParams p;
    p.product = kProducts[rng.UniformInt(0, kProducts.size() - 1)];
    const auto cost = static_cast<std::int64_t>(rng.UniformInt(5, 200));
    p.cost = static_cast<double>(cost);
    p.p_max = static_cast<double>(rng.UniformInt(2 * cost + 10, 10 * cost));
    p.demand_slope = kSlopes[rng.UniformInt(0, kSlopes.size() - 1)];
    p.rounds = rounds;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<BargainingParams> BargainingFromBertrand(
    const std::vector<BertrandParams>& markets) {
  std::vector<BargainingParams> out;
  out.reserve(markets.size());
  for (const auto& m : markets) out.push_back({m.product, m.cost, m.p_max});
  return out;
}

std::vector<BertrandParams> ParseBertrandCsv(const std::string& text,
                                             int rounds) {
  std::vector<BertrandParams> out;
  for (const auto& row : ReadRows(text, {"product", "cost", "p_max", "d"})) {
    const int line_no = std::stoi(row[4]);
    BertrandParams p;
    p.product = row[0];
    p.cost = ParseNumber(row[1], line_no);
    p.p_max = ParseNumber(row[2], line_no);
    p.demand_slope = ParseNumber(row[3], line_no);
    p.rounds = rounds;
    GameSpec::Bertrand(p).Validate();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<BargainingParams> ParseBargainingCsv(const std::string& text) {
  std::vector<BargainingParams> out;
  for (const auto& row : ReadRows(text, {"product", "cost", "value"})) {
    const int line_no = std::stoi(row[3]);
    BargainingParams p;
    p.product = row[0];
    p.cost = ParseNumber(row[1], line_no);
    p.value = ParseNumber(row[2], line_no);
    GameSpec::Bargaining(p).Validate();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<BertrandParams> LoadBertrandCsv(const std::string& path,
                                            int rounds) {
  return ParseBertrandCsv(ReadFile(path), rounds);
}

std::vector<BargainingParams> LoadBargainingCsv(const std::string& path) {
  return ParseBargainingCsv(ReadFile(path));
}

}  // namespace talkgames::game
