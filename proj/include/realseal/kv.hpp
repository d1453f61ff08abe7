#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "realseal/result.hpp"

namespace realseal::kv {

// Shared canonical text grammar used by manifests, trust lists, rig and
// config files, and machine-readable CLI output.
//
//   document  = *line
//   line      = key "=" value LF
//   key       = 1*( lowercase / digit / "_" / "." / "-" )
//   value     = UTF-8 bytes with "%", "=", LF percent-encoded (%25 %3D %0A)
//
// A document is canonical when its lines are sorted bytewise by key and no
// key repeats. serialize() always produces canonical bytes.

using Entry = std::pair<std::string, std::string>;

struct ParseError {
    std::string detail;
};

bool valid_key(std::string_view key);

std::string escape_value(std::string_view value);
Result<std::string, ParseError> unescape_value(std::string_view value);

// Sorts by key and emits one line per entry. Throws std::invalid_argument on
// an invalid or duplicate key; callers own their key sets.
std::string serialize(std::vector<Entry> entries);

// Strict line parse; entries returned in file order, duplicates rejected.
Result<std::vector<Entry>, ParseError> parse(std::string_view text);

// True iff text parses and re-serializes to exactly itself.
bool is_canonical(std::string_view text);

// Lookup helper for parsed documents; nullptr when absent.
const std::string* find(const std::vector<Entry>& entries, std::string_view key);

}  // namespace realseal::kv
