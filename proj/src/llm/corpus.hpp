#pragma once

#include <string>
#include <vector>

#include "../table.hpp"

namespace attrikit {

inline constexpr const char* kPromptPrefix =
    "Analyze the employee information and predict employee turnover: ";

enum class ParsedLabel { Yes, No, Unparseable };

const char* parsed_label_name(ParsedLabel label);

// "Name=Value" pairs joined by "; " in schema order; numbers rendered in
// shortest round-trip form, categories verbatim.
std::string serialize_employee(const Table& table, size_t row);

// One {"prompt", "completion"} object per row, LF-terminated lines. labels
// must be "Yes"/"No" strings; line order follows the input.
std::string build_jsonl(const Table& rows, const std::vector<std::string>& labels);

std::string build_prompt(const Table& table, size_t row);

// Case-insensitive scan for the first standalone yes/no token.
ParsedLabel parse_completion(const std::string& text);

} // namespace attrikit
