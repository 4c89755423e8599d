#include "buckopt/toml.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace buckopt::toml {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw FormatError("toml: line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Strips a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_basic_string(std::string_view s, std::size_t line) {
    // s starts and ends with '"'; handles \" \\ \n \t \r escapes only.
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') fail(line, "malformed string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '\\') {
            if (i + 2 >= s.size() + 1) fail(line, "dangling escape");
            char e = s[++i];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(line, std::string("unsupported escape \\") + e);
            }
        } else {
            out += c;
        }
    }
    return out;
}

Value parse_scalar(std::string_view s, std::size_t line);

Value parse_array(std::string_view s, std::size_t line) {
    // s starts with '[' and ends with ']'; elements may themselves be arrays.
    Array items;
    std::size_t depth = 0;
    std::size_t start = 1;
    bool in_string = false;
    for (std::size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' && s[i - 1] != '\\') in_string = !in_string;
        if (in_string) continue;
        if (c == '[') ++depth;
        if (c == ']' && depth > 0) { --depth; continue; }
        if ((c == ',' && depth == 0) || (c == ']' && depth == 0)) {
            auto piece = trim(s.substr(start, i - start));
            if (!piece.empty()) items.push_back(parse_scalar(piece, line));
            start = i + 1;
            if (c == ']') break;
        }
    }
    return Value(std::move(items));
}

Value parse_scalar(std::string_view s, std::size_t line) {
    s = trim(s);
    if (s.empty()) fail(line, "empty value");
    if (s.front() == '[') return parse_array(s, line);
    if (s.front() == '"') return Value(parse_basic_string(s, line));
    if (s == "true") return Value(true);
    if (s == "false") return Value(false);

    std::string text(s);
    // Integer first: no '.', 'e', 'E' means integral syntax.
    if (text.find_first_of(".eE") == std::string::npos) {
        std::int64_t iv = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), iv);
        if (ec == std::errc() && p == text.data() + text.size()) return Value(iv);
    }
    char* end = nullptr;
    double dv = std::strtod(text.c_str(), &end);
    if (end == text.c_str() + text.size() && end != text.c_str()) return Value(dv);
    fail(line, "cannot parse value '" + text + "'");
}

// Walks/creates the table path "a.b.c" from root; returns the leaf table.
Table* descend(Table& root, std::string_view path, std::size_t line, bool array_leaf) {
    Table* cur = &root;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = path.find('.', pos);
        std::string part(trim(path.substr(pos, dot == std::string_view::npos ? dot : dot - pos)));
        if (part.empty()) fail(line, "empty table-name component");
        bool leaf = dot == std::string_view::npos;
        auto& entries = cur->entries();
        auto it = entries.find(part);
        if (leaf && array_leaf) {
            if (it == entries.end())
                it = entries.emplace(part, Value::make_table_array()).first;
            if (it->second.kind() != Value::Kind::TableArray)
                fail(line, "'" + part + "' is not an array of tables");
            it->second.as_table_vector().emplace_back();
            return &it->second.as_table_vector().back();
        }
        if (it == entries.end()) it = entries.emplace(part, Value::make_table()).first;
        if (it->second.kind() == Value::Kind::TableArray) {
            if (it->second.as_table_vector().empty()) fail(line, "empty table array '" + part + "'");
            cur = &it->second.as_table_vector().back();
        } else if (it->second.kind() == Value::Kind::TableKind) {
            cur = &it->second.as_table();
        } else {
            fail(line, "'" + part + "' already holds a value");
        }
        if (leaf) return cur;
        pos = dot + 1;
    }
}

}  // namespace

Value Value::make_table() {
    Value v;
    v.kind_ = Kind::TableKind;
    v.table_ = std::make_shared<Table>();
    return v;
}

Value Value::make_table_array() {
    Value v;
    v.kind_ = Kind::TableArray;
    v.table_array_ = std::make_shared<std::vector<Table>>();
    return v;
}

double Value::as_double() const {
    if (kind_ == Kind::Float) return float_;
    if (kind_ == Kind::Integer) return static_cast<double>(int_);
    throw FormatError("toml: value is not a number");
}

std::int64_t Value::as_int() const {
    if (kind_ == Kind::Integer) return int_;
    throw FormatError("toml: value is not an integer");
}

bool Value::as_bool() const {
    if (kind_ == Kind::Boolean) return bool_;
    throw FormatError("toml: value is not a boolean");
}

const std::string& Value::as_string() const {
    if (kind_ == Kind::String) return string_;
    throw FormatError("toml: value is not a string");
}

const Array& Value::as_array() const {
    if (kind_ == Kind::ArrayKind) return array_;
    throw FormatError("toml: value is not an array");
}

const Table& Value::as_table() const {
    if (kind_ == Kind::TableKind) return *table_;
    throw FormatError("toml: value is not a table");
}

Table& Value::as_table() {
    if (kind_ == Kind::TableKind) return *table_;
    throw FormatError("toml: value is not a table");
}

const std::vector<Table>& Value::as_table_vector() const {
    if (kind_ == Kind::TableArray) return *table_array_;
    throw FormatError("toml: value is not an array of tables");
}

std::vector<Table>& Value::as_table_vector() {
    if (kind_ == Kind::TableArray) return *table_array_;
    throw FormatError("toml: value is not an array of tables");
}

bool Table::contains(const std::string& key) const { return entries_.count(key) != 0; }

const Value& Table::at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw FormatError("toml: missing key '" + key + "'");
    return it->second;
}

double Table::get_double(const std::string& key) const {
    if (!contains(key)) throw FormatError("toml: missing key '" + key + "'");
    if (!at(key).is_number()) throw FormatError("toml: key '" + key + "' is not a number");
    return at(key).as_double();
}

std::int64_t Table::get_int(const std::string& key) const {
    if (!contains(key)) throw FormatError("toml: missing key '" + key + "'");
    return at(key).as_int();
}

bool Table::get_bool(const std::string& key) const { return at(key).as_bool(); }

const std::string& Table::get_string(const std::string& key) const { return at(key).as_string(); }

const Array& Table::get_array(const std::string& key) const { return at(key).as_array(); }

const Table& Table::get_table(const std::string& key) const { return at(key).as_table(); }

std::vector<const Table*> Table::get_table_array(const std::string& key) const {
    std::vector<const Table*> out;
    for (const auto& t : at(key).as_table_vector()) out.push_back(&t);
    return out;
}

double Table::get_double_or(const std::string& key, double fallback) const {
    return contains(key) ? get_double(key) : fallback;
}

std::int64_t Table::get_int_or(const std::string& key, std::int64_t fallback) const {
    return contains(key) ? get_int(key) : fallback;
}

bool Table::get_bool_or(const std::string& key, bool fallback) const {
    return contains(key) ? get_bool(key) : fallback;
}

std::string Table::get_string_or(const std::string& key, std::string fallback) const {
    return contains(key) ? get_string(key) : std::move(fallback);
}

void Table::get_range(const std::string& key, double& lo, double& hi) const {
    const Array& a = get_array(key);
    if (a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw FormatError("toml: key '" + key + "' must be a [lo, hi] pair");
    lo = a[0].as_double();
    hi = a[1].as_double();
}

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            bool is_array = line.size() > 1 && line[1] == '[';
            std::string_view close = is_array ? "]]" : "]";
            if (line.substr(line.size() - close.size()) != close)
                fail(line_no, "unterminated table header");
            auto name = trim(line.substr(is_array ? 2 : 1,
                                         line.size() - 2 * (is_array ? 2 : 1)));
            if (name.empty()) fail(line_no, "empty table header");
            current = descend(root, name, line_no, is_array);
            continue;
        }
        std::size_t eq = std::string_view::npos;
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (line[i] == '=' && !in_string) { eq = i; break; }
        }
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        auto key_sv = trim(line.substr(0, eq));
        if (key_sv.empty()) fail(line_no, "empty key");
        std::string key;
        if (key_sv.front() == '"') {
            key = parse_basic_string(key_sv, line_no);
        } else {
            for (char c : key_sv)
                if (!is_bare_key_char(c)) fail(line_no, "bad character in key");
            key = std::string(key_sv);
        }
        if (current->entries().count(key)) fail(line_no, "duplicate key '" + key + "'");
        current->entries().emplace(key, parse_scalar(line.substr(eq + 1), line_no));
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace buckopt::toml
