// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mvopt::toml {

bool Value::as_bool() const {
  if (!is_bool()) throw InvalidInputError("toml: not a bool");
  return std::get<bool>(data_);
}

int64_t Value::as_int() const {
  if (!is_int()) throw InvalidInputError("toml: not an integer");
  return std::get<int64_t>(data_);
}

double Value::as_float() const {
  if (is_int()) return static_cast<double>(std::get<int64_t>(data_));
  if (!is_float()) throw InvalidInputError("toml: not a float");
  return std::get<double>(data_);
}

const std::string& Value::as_string() const {
  if (!is_string()) throw InvalidInputError("toml: not a string");
  return std::get<std::string>(data_);
}

const Value::Array& Value::as_array() const {
  if (!is_array()) throw InvalidInputError("toml: not an array");
  return std::get<Array>(data_);
}

std::string Value::serialize() const {
  std::ostringstream out;
  out.precision(17);
  if (is_bool()) {
    out << (as_bool() ? "true" : "false");
  } else if (is_int()) {
    out << as_int();
  } else if (is_float()) {
    const double d = std::get<double>(data_);
    out << d;
    // Keep floats recognizable as floats on reparse.
    if (out.str().find_first_of(".eEnf") == std::string::npos) out << ".0";
  } else if (is_string()) {
    out << '"';
    for (char c : as_string()) {
      if (c == '"' || c == '\\') out << '\\';
      out << c;
    }
    out << '"';
  } else {
    out << "[";
    const auto& arr = as_array();
    for (size_t i = 0; i < arr.size(); ++i) {
      if (i) out << ", ";
      out << arr[i].serialize();
    }
    out << "]";
  }
  return out.str();
}

Table::Entry* Table::find_entry(const std::string& key) {
  for (auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

const Table::Entry* Table::find_entry(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

namespace {

std::pair<std::string, std::string> split_dotted(const std::string& key) {
  const size_t dot = key.find('.');
  if (dot == std::string::npos) return {key, ""};
  return {key.substr(0, dot), key.substr(dot + 1)};
}

}  // namespace

const Value* Table::find(const std::string& key) const {
  auto [head, rest] = split_dotted(key);
  const Entry* e = find_entry(head);
  if (!e) return nullptr;
  if (rest.empty()) return e->kind == 0 ? &e->value : nullptr;
  return e->kind == 1 ? e->table->find(rest) : nullptr;
}

bool Table::contains(const std::string& key) const { return find(key) != nullptr; }

bool Table::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return v ? v->as_bool() : fallback;
}

int64_t Table::get_int(const std::string& key, int64_t fallback) const {
  const Value* v = find(key);
  return v ? v->as_int() : fallback;
}

double Table::get_float(const std::string& key, double fallback) const {
  const Value* v = find(key);
  return v ? v->as_float() : fallback;
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  return v ? v->as_string() : fallback;
}

std::vector<double> Table::get_float_array(const std::string& key) const {
  const Value* v = find(key);
  std::vector<double> out;
  if (!v) return out;
  for (const auto& item : v->as_array()) out.push_back(item.as_float());
  return out;
}

void Table::set(const std::string& key, Value value) {
  auto [head, rest] = split_dotted(key);
  if (!rest.empty()) {
    subtable(head).set(rest, std::move(value));
    return;
  }
  if (Entry* e = find_entry(head)) {
    e->kind = 0;
    e->value = std::move(value);
    return;
  }
  entries_.push_back(Entry{head, 0, std::move(value), nullptr, nullptr});
}

Table& Table::subtable(const std::string& key) {
  auto [head, rest] = split_dotted(key);
  Entry* e = find_entry(head);
  if (!e) {
    entries_.push_back(Entry{head, 1, Value{}, std::make_shared<Table>(), nullptr});
    e = &entries_.back();
  }
  if (e->kind != 1) throw InvalidInputError("toml: key is not a table: " + head);
  return rest.empty() ? *e->table : e->table->subtable(rest);
}

const Table* Table::find_subtable(const std::string& key) const {
  auto [head, rest] = split_dotted(key);
  const Entry* e = find_entry(head);
  if (!e || e->kind != 1) return nullptr;
  return rest.empty() ? e->table.get() : e->table->find_subtable(rest);
}

Table& Table::append_table_array(const std::string& key) {
  Entry* e = find_entry(key);
  if (!e) {
    entries_.push_back(Entry{key, 2, Value{}, nullptr, std::make_shared<std::vector<Table>>()});
    e = &entries_.back();
  }
  if (e->kind != 2) throw InvalidInputError("toml: key is not a table array: " + key);
  e->tables->emplace_back();
  return e->tables->back();
}

const std::vector<Table>* Table::find_table_array(const std::string& key) const {
  const Entry* e = find_entry(key);
  return (e && e->kind == 2) ? e->tables.get() : nullptr;
}

std::string Table::serialize(const std::string& prefix) const {
  std::ostringstream out;
  for (const auto& e : entries_)
    if (e.kind == 0) out << e.key << " = " << e.value.serialize() << "\n";
  for (const auto& e : entries_) {
    const std::string path = prefix.empty() ? e.key : prefix + "." + e.key;
    if (e.kind == 1) {
      out << "\n[" << path << "]\n" << e.table->serialize(path);
    } else if (e.kind == 2) {
      for (const auto& t : *e.tables) out << "\n[[" << path << "]]\n" << t.serialize(path);
    }
  }
  return out.str();
}

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInputError("toml parse error (line " + std::to_string(line) + "): " + msg);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }

  void skip_to_eol() {
    while (!eof() && peek() != '\n') ++pos;
  }

  void skip_blank_and_comments() {
    while (!eof()) {
      skip_ws_inline();
      if (eof()) return;
      if (peek() == '#') {
        skip_to_eol();
      } else if (peek() == '\n' || peek() == '\r') {
        take();
      } else {
        return;
      }
    }
  }

  std::string parse_key() {
    skip_ws_inline();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-' || peek() == '.'))
      key += take();
    if (key.empty()) fail("expected key");
    return key;
  }

  Value parse_value() {
    skip_ws_inline();
    if (eof()) fail("expected value");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  Value parse_string() {
    take();  // opening quote
    std::string s;
    while (!eof() && peek() != '"') {
      char c = take();
      if (c == '\\' && !eof()) {
        const char esc = take();
        if (esc == 'n') c = '\n';
        else if (esc == 't') c = '\t';
        else c = esc;
      }
      s += c;
    }
    if (eof()) fail("unterminated string");
    take();  // closing quote
    return Value(std::move(s));
  }

  Value parse_array() {
    take();  // '['
    Value::Array items;
    while (true) {
      skip_blank_and_comments();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        take();
        break;
      }
      items.push_back(parse_value());
      skip_blank_and_comments();
      if (!eof() && peek() == ',') take();
    }
    return Value(std::move(items));
  }

  Value parse_scalar() {
    std::string word;
    while (!eof() && peek() != '\n' && peek() != '#' && peek() != ',' && peek() != ']')
      word += take();
    while (!word.empty() && (word.back() == ' ' || word.back() == '\t' || word.back() == '\r'))
      word.pop_back();
    if (word == "true") return Value(true);
    if (word == "false") return Value(false);
    const bool floaty = word.find_first_of(".eE") != std::string::npos || word == "inf" ||
                        word == "-inf" || word == "nan";
    if (!floaty) {
      try {
        size_t used = 0;
        const int64_t i = std::stoll(word, &used);
        if (used == word.size()) return Value(i);
      } catch (...) {
      }
    }
    try {
      size_t used = 0;
      const double d = std::stod(word, &used);
      if (used == word.size()) return Value(d);
    } catch (...) {
    }
    fail("bad value: " + word);
  }
};

}  // namespace

Table parse(const std::string& text) {
  Parser p{text};
  Table root;
  Table* current = &root;
  while (true) {
    p.skip_blank_and_comments();
    if (p.eof()) break;
    if (p.peek() == '[') {
      p.take();
      const bool is_array = !p.eof() && p.peek() == '[';
      if (is_array) p.take();
      const std::string path = p.parse_key();
      p.skip_ws_inline();
      if (p.eof() || p.take() != ']') p.fail("expected ']'");
      if (is_array && (p.eof() || p.take() != ']')) p.fail("expected ']]'");
      if (is_array) {
        auto [head, rest] = [&] {
          const size_t dot = path.rfind('.');
          if (dot == std::string::npos) return std::make_pair(std::string(), path);
          return std::make_pair(path.substr(0, dot), path.substr(dot + 1));
        }();
        Table& parent = head.empty() ? root : root.subtable(head);
        current = &parent.append_table_array(rest);
      } else {
        current = &root.subtable(path);
      }
      p.skip_to_eol();
      continue;
    }
    const std::string key = p.parse_key();
    p.skip_ws_inline();
    if (p.eof() || p.take() != '=') p.fail("expected '=' after key " + key);
    current->set(key, p.parse_value());
    p.skip_to_eol();
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << table.serialize();
}

}  // namespace mvopt::toml
