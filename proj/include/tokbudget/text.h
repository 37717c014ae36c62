// Copyright 2026 The tokbudget Authors.
//
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

// Small text helpers shared by the key-value artifact formats.

#ifndef TOKBUDGET_TEXT_H_
#define TOKBUDGET_TEXT_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tokbudget {

// Shortest-roundtrip-safe form: 17 significant digits, "inf"/"-inf"/"nan".
std::string format_double(double v);

// Throws ValidationError naming `what` on malformed input.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int64(std::string_view text, std::string_view what);
std::uint64_t parse_uint64(std::string_view text, std::string_view what);
std::vector<double> parse_double_list(std::string_view text,
                                      std::string_view what);

std::string_view trim_view(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// "key = value" lines; '#' starts a comment; blank lines ignored. Keys are
// unique. Errors carry "<source>:<line>" context.
class KeyValueText {
 public:
  static KeyValueText parse(const std::string& text,
                            const std::string& source = "<text>");
  static KeyValueText parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throws ValidationError when missing.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  // "<source>:<line>" of a key, for error messages.
  std::string where(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

// FNV-1a 64-bit, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::string& path, const std::string& contents);

}  // namespace tokbudget

#endif  // TOKBUDGET_TEXT_H_
