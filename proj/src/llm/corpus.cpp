#include "corpus.hpp"

#include <cctype>

#include <json.hpp>

#include "../errors.hpp"
#include "../util.hpp"

namespace attrikit {

const char* parsed_label_name(ParsedLabel label) {
    switch (label) {
    case ParsedLabel::Yes: return "Yes";
    case ParsedLabel::No: return "No";
    case ParsedLabel::Unparseable: return "Unparseable";
    }
    return "Unparseable";
}

std::string serialize_employee(const Table& table, size_t row) {
    std::string out;
    for (size_t c = 0; c < table.n_cols(); ++c) {
        const auto& col = table.column(c);
        if (c > 0) out += "; ";
        out += col.schema.name;
        out += '=';
        if (col.schema.kind == ColumnKind::Numeric)
            out += format_double(col.nums[row]);
        else
            out += col.cats[row];
    }
    return out;
}

std::string build_prompt(const Table& table, size_t row) {
    return kPromptPrefix + serialize_employee(table, row);
}

std::string build_jsonl(const Table& rows, const std::vector<std::string>& labels) {
    if (rows.n_rows() != labels.size())
        raise(Errc::LengthMismatch, "row count and label count differ");
    std::string out;
    for (size_t r = 0; r < rows.n_rows(); ++r) {
        if (labels[r] != "Yes" && labels[r] != "No")
            raise(Errc::NonBinaryLabel, "completion must be Yes or No, got '" + labels[r] + "'");
        nlohmann::ordered_json line{{"prompt", build_prompt(rows, r)},
                                    {"completion", labels[r]}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

ParsedLabel parse_completion(const std::string& text) {
    size_t i = 0;
    while (i < text.size()) {
        if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
        std::string token = text.substr(start, i - start);
        for (char& ch : token) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (token == "yes") return ParsedLabel::Yes;
        if (token == "no") return ParsedLabel::No;
    }
    return ParsedLabel::Unparseable;
}

} // namespace attrikit
