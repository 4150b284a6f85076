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

#ifndef TALKGAMES_GAME_INSTANCES_H_
#define TALKGAMES_GAME_INSTANCES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "talkgames/game/types.h"

namespace talkgames::game {

// Seeded synthetic market scenarios: integer cost in [5, 200], integer
// p_max in [2c + 10, 10c], d drawn from {0.1, 0.2, 0.5, 1, 2}.
std::vector<BertrandParams> GenerateBertrandInstances(std::size_t count,
                                                      std::uint64_t seed,
                                                      int rounds = 5);

// Bargaining scenarios reuse the market set with value := p_max.
std::vector<BargainingParams> BargainingFromBertrand(
    const std::vector<BertrandParams>& markets);

// CSV with header `product,cost,p_max,d`.
std::vector<BertrandParams> LoadBertrandCsv(const std::string& path,
                                            int rounds = 5);
std::vector<BertrandParams> ParseBertrandCsv(const std::string& text,
                                             int rounds = 5);

// CSV with header `product,cost,value`.
std::vector<BargainingParams> LoadBargainingCsv(const std::string& path);
std::vector<BargainingParams> ParseBargainingCsv(const std::string& text);

// Splits one CSV record, honouring double quotes.
std::vector<std::string> SplitCsvLine(const std::string& line);

}  // namespace talkgames::game

#endif  // TALKGAMES_GAME_INSTANCES_H_
