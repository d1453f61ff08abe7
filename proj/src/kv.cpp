#include "realseal/kv.hpp"

#include <algorithm>
#include <stdexcept>

namespace realseal::kv {

namespace {
bool key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
}
}  // namespace

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), key_char);
}

std::string escape_value(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
            case '%': out += "%25"; break;
            case '=': out += "%3D"; break;
            case '\n': out += "%0A"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

Result<std::string, ParseError> unescape_value(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        char c = value[i];
        if (c == '=' || c == '\n') {
            return ParseError{"unescaped reserved character in value"};
        }
        if (c != '%') {
            out.push_back(c);
            continue;
        }
        if (i + 3 > value.size()) {
            return ParseError{"truncated escape sequence"};
        }
        std::string_view seq = value.substr(i + 1, 2);
        if (seq == "25") out.push_back('%');
        else if (seq == "3D") out.push_back('=');
        else if (seq == "0A") out.push_back('\n');
        else return ParseError{"unknown escape sequence %" + std::string(seq)};
        i += 2;
    }
    return out;
}

std::string serialize(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [key, value] = entries[i];
        if (!valid_key(key)) throw std::invalid_argument("kv: invalid key: " + key);
        if (i > 0 && key == entries[i - 1].first) {
            throw std::invalid_argument("kv: duplicate key: " + key);
        }
        out += key;
        out.push_back('=');
        out += escape_value(value);
        out.push_back('\n');
    }
    return out;
}

Result<std::vector<Entry>, ParseError> parse(std::string_view text) {
    std::vector<Entry> entries;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            return ParseError{"missing trailing newline"};
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            return ParseError{"line without '='"};
        }
        std::string_view key = line.substr(0, eq);
        if (!valid_key(key)) {
            return ParseError{"invalid key: " + std::string(key)};
        }
        auto value = unescape_value(line.substr(eq + 1));
        if (!value.ok()) return value.error();
        for (const auto& e : entries) {
            if (e.first == key) return ParseError{"duplicate key: " + std::string(key)};
        }
        entries.emplace_back(std::string(key), std::move(value).value());
    }
    return entries;
}

bool is_canonical(std::string_view text) {
    auto parsed = parse(text);
    if (!parsed.ok()) return false;
    return serialize(std::move(parsed).value()) == text;
}

const std::string* find(const std::vector<Entry>& entries, std::string_view key) {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

}  // namespace realseal::kv
