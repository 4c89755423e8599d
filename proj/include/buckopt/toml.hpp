#pragma once

// Minimal TOML reader covering the subset used by the spec and catalog
// files: top-level keys, [table] / [table.sub] headers, [[array-of-tables]]
// headers, and scalar / homogeneous-array values (integer, float, boolean,
// basic "..." string). Dotted keys, inline tables, dates and multi-line
// strings are not supported.

#include "buckopt/common.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace buckopt::toml {

class Value;

using Array = std::vector<Value>;

class Table {
public:
    [[nodiscard]] bool contains(const std::string& key) const;

    /// Typed getters; throw FormatError naming the key when missing or mistyped.
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] std::int64_t get_int(const std::string& key) const;
    [[nodiscard]] bool get_bool(const std::string& key) const;
    [[nodiscard]] const std::string& get_string(const std::string& key) const;
    [[nodiscard]] const Array& get_array(const std::string& key) const;
    [[nodiscard]] const Table& get_table(const std::string& key) const;
    /// Array-of-tables entries ([[key]] blocks).
    [[nodiscard]] std::vector<const Table*> get_table_array(const std::string& key) const;

    /// Getters with fallback for optional keys.
    [[nodiscard]] double get_double_or(const std::string& key, double fallback) const;
    [[nodiscard]] std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    [[nodiscard]] bool get_bool_or(const std::string& key, bool fallback) const;
    [[nodiscard]] std::string get_string_or(const std::string& key, std::string fallback) const;

    /// Two-element numeric array helper for range keys like `fs = [20e3, 200e3]`.
    void get_range(const std::string& key, double& lo, double& hi) const;

    std::map<std::string, Value>& entries() { return entries_; }
    [[nodiscard]] const std::map<std::string, Value>& entries() const { return entries_; }

private:
    [[nodiscard]] const Value& at(const std::string& key) const;
    std::map<std::string, Value> entries_;
};

class Value {
public:
    enum class Kind { Integer, Float, Boolean, String, ArrayKind, TableKind, TableArray };

    Value() : kind_(Kind::Integer), int_(0) {}
    explicit Value(std::int64_t v) : kind_(Kind::Integer), int_(v) {}
    explicit Value(double v) : kind_(Kind::Float), float_(v) {}
    explicit Value(bool v) : kind_(Kind::Boolean), bool_(v) {}
    explicit Value(std::string v) : kind_(Kind::String), string_(std::move(v)) {}
    explicit Value(Array v) : kind_(Kind::ArrayKind), array_(std::move(v)) {}

    static Value make_table();
    static Value make_table_array();

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_number() const { return kind_ == Kind::Integer || kind_ == Kind::Float; }

    [[nodiscard]] double as_double() const;
    [[nodiscard]] std::int64_t as_int() const;
    [[nodiscard]] bool as_bool() const;
    [[nodiscard]] const std::string& as_string() const;
    [[nodiscard]] const Array& as_array() const;
    [[nodiscard]] const Table& as_table() const;
    Table& as_table();
    [[nodiscard]] const std::vector<Table>& as_table_vector() const;
    std::vector<Table>& as_table_vector();

private:
    Kind kind_;
    std::int64_t int_ = 0;
    double float_ = 0.0;
    bool bool_ = false;
    std::string string_;
    Array array_;
    std::shared_ptr<Table> table_;           // shared_ptr keeps Value copyable
    std::shared_ptr<std::vector<Table>> table_array_;
};

/// Parses TOML text; throws FormatError with a line number on bad input.
[[nodiscard]] Table parse(const std::string& text);

/// Reads and parses a TOML file.
[[nodiscard]] Table parse_file(const std::string& path);

}  // namespace buckopt::toml
