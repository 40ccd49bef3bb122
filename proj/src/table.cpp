#include "table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "util.hpp"

namespace attrikit {

namespace {

// RFC-4180-style field splitting: quoted fields may contain commas, escaped
// quotes ("") and newlines. Rows are separated by LF or CRLF.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_content = false; // anything but a bare newline seen on this line

    size_t i = 0;
    // Skip a UTF-8 BOM if present.
    if (text.size() >= 3 && text.compare(0, 3, "\xef\xbb\xbf") == 0) i = 3;

    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    for (; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_content = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_has_content) end_row(); // blank lines are skipped
                break;
            default:
                field += c;
                row_has_content = true;
                break;
        }
    }
    if (row_has_content) end_row();
    return rows;
}

bool parse_number(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    if (b == e) return false;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e && std::isfinite(out);
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_field(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
    n_rows_ = 0;
    if (!columns_.empty()) {
        const auto& first = columns_.front();
        n_rows_ = first.schema.kind == ColumnKind::Numeric ? first.nums.size() : first.cats.size();
    }
    std::unordered_set<std::string> seen;
    for (const auto& col : columns_) {
        size_t len = col.schema.kind == ColumnKind::Numeric ? col.nums.size() : col.cats.size();
        if (len != n_rows_) raise(Errc::LengthMismatch, "column '" + col.schema.name + "' length differs");
        if (!seen.insert(col.schema.name).second)
            raise(Errc::DuplicateColumn, "column '" + col.schema.name + "' appears twice");
    }
}

Table Table::from_csv_text(const std::string& text, const std::vector<ColumnSchema>* schema) {
    auto rows = parse_csv(text);
    if (rows.empty()) raise(Errc::EmptyFile, "no header row");
    const auto& header = rows.front();
    if (rows.size() < 2) raise(Errc::EmptyFile, "no data rows");

    std::unordered_set<std::string> seen;
    for (const auto& name : header)
        if (!seen.insert(name).second) raise(Errc::DuplicateColumn, "column '" + name + "' appears twice");

    const size_t n_cols = header.size();
    const size_t n_rows = rows.size() - 1;

    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != n_cols)
            raise(Errc::MissingValue, "row " + std::to_string(r) + " has " +
                                          std::to_string(rows[r].size()) + " cells, expected " +
                                          std::to_string(n_cols));
        for (size_t c = 0; c < n_cols; ++c)
            if (rows[r][c].empty())
                raise(Errc::MissingValue,
                      "empty cell at row " + std::to_string(r) + ", column '" + header[c] + "'");
    }

    std::vector<ColumnKind> kinds(n_cols, ColumnKind::Numeric);
    if (schema) {
        if (schema->size() != n_cols) raise(Errc::LengthMismatch, "explicit schema width mismatch");
        for (size_t c = 0; c < n_cols; ++c) {
            if ((*schema)[c].name != header[c])
                raise(Errc::UnknownColumn, "schema column '" + (*schema)[c].name +
                                               "' does not match header '" + header[c] + "'");
            kinds[c] = (*schema)[c].kind;
        }
    } else {
        for (size_t c = 0; c < n_cols; ++c) {
            double tmp;
            for (size_t r = 1; r < rows.size(); ++r) {
                if (!parse_number(rows[r][c], tmp)) {
                    kinds[c] = ColumnKind::Categorical;
                    break;
                }
            }
        }
    }

    std::vector<Column> columns(n_cols);
    for (size_t c = 0; c < n_cols; ++c) {
        auto& col = columns[c];
        col.schema.name = header[c];
        col.schema.kind = kinds[c];
        if (schema) col.schema.role = (*schema)[c].role;
        if (kinds[c] == ColumnKind::Numeric) {
            col.nums.resize(n_rows);
            for (size_t r = 0; r < n_rows; ++r) {
                if (!parse_number(rows[r + 1][c], col.nums[r]))
                    raise(Errc::MissingValue, "unparseable numeric cell at row " +
                                                  std::to_string(r + 1) + ", column '" + header[c] + "'");
            }
        } else {
            col.cats.resize(n_rows);
            for (size_t r = 0; r < n_rows; ++r) col.cats[r] = rows[r + 1][c];
        }
    }
    return Table(std::move(columns));
}

Table Table::load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv_text(ss.str());
}

Table Table::load_csv(const std::string& path, const std::vector<ColumnSchema>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv_text(ss.str(), &schema);
}

std::string Table::to_csv_text() const {
    std::string out;
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (c) out += ',';
        out += quote_field(columns_[c].schema.name);
    }
    out += '\n';
    for (size_t r = 0; r < n_rows_; ++r) {
        for (size_t c = 0; c < columns_.size(); ++c) {
            if (c) out += ',';
            const auto& col = columns_[c];
            if (col.schema.kind == ColumnKind::Numeric)
                out += format_double(col.nums[r]);
            else
                out += quote_field(col.cats[r]);
        }
        out += '\n';
    }
    return out;
}

void Table::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::Io, "cannot write '" + path + "'");
    out << to_csv_text();
}

size_t Table::index_of(const std::string& name) const {
    for (size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].schema.name == name) return i;
    raise(Errc::UnknownColumn, "'" + name + "'");
}

bool Table::has_column(const std::string& name) const {
    for (const auto& col : columns_)
        if (col.schema.name == name) return true;
    return false;
}

bool Table::is_numeric(const std::string& name) const {
    return column(name).schema.kind == ColumnKind::Numeric;
}

const std::vector<double>& Table::numeric(const std::string& name) const {
    const auto& col = column(name);
    if (col.schema.kind != ColumnKind::Numeric)
        raise(Errc::NonNumericColumn, "'" + name + "' is categorical");
    return col.nums;
}

const std::vector<std::string>& Table::categorical(const std::string& name) const {
    const auto& col = column(name);
    if (col.schema.kind != ColumnKind::Categorical)
        raise(Errc::NonNumericColumn, "'" + name + "' is numeric");
    return col.cats;
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) raise(Errc::DegenerateColumn, "need at least 2 values for sample std");
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double pos = q * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats Table::summarize(const std::string& name) const {
    const auto& v = numeric(name);
    if (v.empty()) raise(Errc::DegenerateColumn, "'" + name + "' is empty");
    SummaryStats s;
    s.count = v.size();
    double mean = 0;
    for (double x : v) mean += x;
    s.mean = mean / static_cast<double>(v.size());
    s.std_dev = v.size() > 1 ? sample_std(v) : 0.0;
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q50 = quantile_sorted(sorted, 0.50);
    s.q75 = quantile_sorted(sorted, 0.75);
    return s;
}

std::vector<ClassCount> Table::class_distribution(const std::string& target) const {
    const auto& col = column(target);
    std::unordered_map<std::string, size_t> counts;
    if (col.schema.kind == ColumnKind::Categorical) {
        for (const auto& v : col.cats) ++counts[v];
    } else {
        for (double v : col.nums) ++counts[format_double(v)];
    }
    std::vector<ClassCount> out;
    out.reserve(counts.size());
    for (auto& [label, count] : counts)
        out.push_back({label, count, static_cast<double>(count) / static_cast<double>(n_rows_)});
    std::sort(out.begin(), out.end(), [](const ClassCount& a, const ClassCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.label < b.label;
    });
    return out;
}

std::vector<HistogramBin> Table::histogram(const std::string& name, size_t bins) const {
    if (bins == 0) raise(Errc::LengthMismatch, "bins must be >= 1");
    const auto& v = numeric(name);
    if (v.empty()) raise(Errc::DegenerateColumn, "'" + name + "' is empty");
    auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    double mn = *mn_it, mx = *mx_it;
    if (mn == mx) {
        // Zero-width range: a single degenerate bin carries all the mass.
        return {{mn, mx, v.size()}};
    }
    std::vector<HistogramBin> out(bins);
    double width = (mx - mn) / static_cast<double>(bins);
    for (size_t b = 0; b < bins; ++b) {
        out[b].lo = mn + width * static_cast<double>(b);
        out[b].hi = b + 1 == bins ? mx : mn + width * static_cast<double>(b + 1);
    }
    for (double x : v) {
        size_t idx = static_cast<size_t>((x - mn) / width);
        if (idx >= bins) idx = bins - 1; // right-closed last bin
        ++out[idx].count;
    }
    return out;
}

Table Table::without_columns(const std::vector<std::string>& names) const {
    for (const auto& n : names) index_of(n); // raises UnknownColumn
    std::vector<Column> kept;
    kept.reserve(columns_.size());
    for (const auto& col : columns_) {
        bool dropped = std::find(names.begin(), names.end(), col.schema.name) != names.end();
        if (!dropped) kept.push_back(col);
    }
    return Table(std::move(kept));
}

Table Table::select_rows(const std::vector<size_t>& rows) const {
    for (size_t r : rows)
        if (r >= n_rows_)
            raise(Errc::LengthMismatch,
                  "row index " + std::to_string(r) + " out of range (" + std::to_string(n_rows_) + " rows)");
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& col : columns_) {
        Column out;
        out.schema = col.schema;
        if (col.schema.kind == ColumnKind::Numeric) {
            out.nums.reserve(rows.size());
            for (size_t r : rows) out.nums.push_back(col.nums[r]);
        } else {
            out.cats.reserve(rows.size());
            for (size_t r : rows) out.cats.push_back(col.cats[r]);
        }
        cols.push_back(std::move(out));
    }
    return Table(std::move(cols));
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::Ok: return "ok";
        case Errc::Io: return "io error";
        case Errc::EmptyFile: return "empty file";
        case Errc::DuplicateColumn: return "duplicate column";
        case Errc::MissingValue: return "missing value";
        case Errc::UnknownColumn: return "unknown column";
        case Errc::NonNumericColumn: return "non-numeric column";
        case Errc::DegenerateColumn: return "degenerate column";
        case Errc::NegativeValue: return "negative value";
        case Errc::UnseenCategory: return "unseen category";
        case Errc::ClassTooSmall: return "class too small";
        case Errc::ZeroVariance: return "zero variance";
        case Errc::SingleClass: return "single class";
        case Errc::TooFewMinoritySamples: return "too few minority samples";
        case Errc::DimensionMismatch: return "dimension mismatch";
        case Errc::KTooLarge: return "k too large";
        case Errc::LengthMismatch: return "length mismatch";
        case Errc::NonBinaryLabel: return "non-binary label";
        case Errc::EmptyReport: return "empty report";
        case Errc::VersionMismatch: return "version mismatch";
        case Errc::CorruptPayload: return "corrupt payload";
        case Errc::Auth: return "auth error";
        case Errc::Service: return "service error";
        case Errc::RateLimited: return "rate limited";
        case Errc::Timeout: return "timeout";
        case Errc::PortInUse: return "port in use";
        case Errc::ConfigParse: return "config parse error";
        case Errc::ConfigUnknownKey: return "unknown config key";
        case Errc::ConfigMissingRequired: return "missing required config";
        case Errc::Internal: return "internal error";
    }
    return "unknown error";
}

} // namespace attrikit
