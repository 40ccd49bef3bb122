#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace attrikit {

enum class ColumnKind { Numeric, Categorical };
enum class ColumnRole { Feature, Target, DroppedId };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    ColumnRole role = ColumnRole::Feature;
};

struct SummaryStats {
    size_t count = 0;
    double mean = 0, std_dev = 0, min = 0, q25 = 0, q50 = 0, q75 = 0, max = 0;
};

struct ClassCount {
    std::string label;
    size_t count = 0;
    double fraction = 0;
};

struct HistogramBin {
    double lo = 0, hi = 0;
    size_t count = 0;
};

// Column-oriented typed dataset. Immutable once built; all transforms in the
// pipeline return fresh tables.
class Table {
public:
    struct Column {
        ColumnSchema schema;
        std::vector<double> nums;       // filled when kind == Numeric
        std::vector<std::string> cats;  // filled when kind == Categorical
    };

    Table() = default;
    explicit Table(std::vector<Column> columns);

    // schema_policy "infer": a column is numeric iff every cell parses as a
    // number. Pass an explicit schema to override inference.
    static Table load_csv(const std::string& path);
    static Table load_csv(const std::string& path, const std::vector<ColumnSchema>& schema);
    static Table from_csv_text(const std::string& text,
                               const std::vector<ColumnSchema>* schema = nullptr);

    void write_csv(const std::string& path) const;
    std::string to_csv_text() const;

    size_t n_rows() const { return n_rows_; }
    size_t n_cols() const { return columns_.size(); }

    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(size_t i) const { return columns_[i]; }
    const Column& column(const std::string& name) const { return columns_[index_of(name)]; }
    size_t index_of(const std::string& name) const;
    bool has_column(const std::string& name) const;
    bool is_numeric(const std::string& name) const;

    const std::vector<double>& numeric(const std::string& name) const;
    const std::vector<std::string>& categorical(const std::string& name) const;

    SummaryStats summarize(const std::string& name) const;
    std::vector<ClassCount> class_distribution(const std::string& target) const;
    std::vector<HistogramBin> histogram(const std::string& name, size_t bins) const;

    Table without_columns(const std::vector<std::string>& names) const;
    Table select_rows(const std::vector<size_t>& rows) const;

private:
    std::vector<Column> columns_;
    size_t n_rows_ = 0;
};

// Sample standard deviation (n-1). DegenerateColumn when n < 2.
double sample_std(const std::vector<double>& v);

// Quantile by linear interpolation between closest ranks on the sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

} // namespace attrikit
