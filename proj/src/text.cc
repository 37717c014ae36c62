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

#include "tokbudget/text.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tokbudget/errors.h"

namespace tokbudget {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim_view(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  for (;;) {
    const size_t next = s.find(sep, pos);
    out.emplace_back(trim_view(s.substr(pos, next == s.npos ? s.npos : next - pos)));
    if (next == s.npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim_view(text));
  if (s == "inf" || s == "+inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ValidationError("malformed number for " + std::string(what) + ": '" +
                          s + "'");
  }
  return v;
}

std::int64_t parse_int64(std::string_view text, std::string_view what) {
  text = trim_view(text);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError("malformed integer for " + std::string(what) + ": '" +
                          std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint64(std::string_view text, std::string_view what) {
  text = trim_view(text);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError("malformed unsigned integer for " + std::string(what) +
                          ": '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text,
                                      std::string_view what) {
  std::vector<double> out;
  if (trim_view(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item, what));
  return out;
}

KeyValueText KeyValueText::parse(const std::string& text,
                                 const std::string& source) {
  KeyValueText kv;
  kv.source_ = source;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != view.npos) {
      view = view.substr(0, hash);
    }
    view = trim_view(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string context = source + ":" + std::to_string(number);
    if (eq == view.npos) {
      throw ValidationError(context + ": expected 'key = value'");
    }
    std::string key(trim_view(view.substr(0, eq)));
    if (key.empty()) throw ValidationError(context + ": empty key");
    if (kv.values_.count(key)) {
      throw ValidationError(context + ": duplicate key '" + key + "'");
    }
    kv.values_[key] = std::string(trim_view(view.substr(eq + 1)));
    kv.lines_[key] = number;
  }
  return kv;
}

KeyValueText KeyValueText::parse_file(const std::string& path) {
  return parse(read_file(path), path);
}

const std::string& KeyValueText::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ValidationError(source_ + ": missing key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueText::get_or(const std::string& key,
                                 const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string KeyValueText::where(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? source_
                            : source_ + ":" + std::to_string(it->second);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << contents;
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace tokbudget
