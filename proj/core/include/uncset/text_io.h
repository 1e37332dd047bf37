// Copyright 2026 The uncset Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNCSET_TEXT_IO_H_
#define UNCSET_TEXT_IO_H_

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>

namespace uncset {

// Shortest decimal string that parses back to exactly `value`. Infinities
// are written as "inf" / "-inf".
std::string FormatDouble(double value);
// Accepts anything FormatDouble produces; throws kParseError otherwise.
double ParseDouble(std::string_view text);
std::int64_t ParseInt(std::string_view text);

// Whitespace-separated token reader used by the text file formats.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string Next();
  double NextDouble() { return ParseDouble(Next()); }
  std::int64_t NextInt() { return ParseInt(Next()); }
  // Consumes one token and throws kParseError unless it equals `keyword`.
  void Expect(std::string_view keyword);
  bool AtEnd();

 private:
  std::istream& in_;
};

std::string ReadFile(const std::string& path);
// Writes atomically enough for our purposes: truncate then write.
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace uncset

#endif  // UNCSET_TEXT_IO_H_
