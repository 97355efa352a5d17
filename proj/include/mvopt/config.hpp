// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mvopt/errors.hpp"

namespace mvopt::toml {

// Minimal TOML subset: bare-key/value pairs, [section] and nested
// [section.sub] tables, [[array-of-tables]], strings, bools, integers,
// floats, and homogeneous flat arrays. Enough for experiment configs and
// scene files; not a general TOML implementation.

class Table;

class Value {
 public:
  using Array = std::vector<Value>;

  Value() : data_(int64_t{0}) {}
  Value(bool b) : data_(b) {}
  Value(int64_t i) : data_(i) {}
  Value(int i) : data_(static_cast<int64_t>(i)) {}
  Value(double d) : data_(d) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(Array a) : data_(std::move(a)) {}

  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_int() const { return std::holds_alternative<int64_t>(data_); }
  bool is_float() const { return std::holds_alternative<double>(data_); }
  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }

  bool as_bool() const;
  int64_t as_int() const;
  double as_float() const;  // accepts integers too
  const std::string& as_string() const;
  const Array& as_array() const;

  std::string serialize() const;

 private:
  std::variant<bool, int64_t, double, std::string, Array> data_;
};

class Table {
 public:
  bool contains(const std::string& key) const;

  /// Scalar accessors with defaults; dotted keys ("section.key") descend.
  bool get_bool(const std::string& key, bool fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_float(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_float_array(const std::string& key) const;

  void set(const std::string& key, Value value);

  Table& subtable(const std::string& key);              // creates if missing
  const Table* find_subtable(const std::string& key) const;
  Table& append_table_array(const std::string& key);    // [[key]]
  const std::vector<Table>* find_table_array(const std::string& key) const;

  const Value* find(const std::string& key) const;

  std::string serialize(const std::string& prefix = "") const;

 private:
  struct Entry {
    std::string key;
    int kind;  // 0 value, 1 table, 2 table array
    Value value;
    std::shared_ptr<Table> table;
    std::shared_ptr<std::vector<Table>> tables;
  };
  Entry* find_entry(const std::string& key);
  const Entry* find_entry(const std::string& key) const;
  std::vector<Entry> entries_;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);
void write_file(const std::string& path, const Table& table);

}  // namespace mvopt::toml
