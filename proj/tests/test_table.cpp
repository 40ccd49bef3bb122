#include <doctest.h>

#include <cmath>

#include "table.hpp"
#include "test_helpers.hpp"

using namespace attrikit;

TEST_SUITE("table") {

TEST_CASE("csv parsing infers column kinds") {
    Table t = Table::from_csv_text("a,b,c\n1,x,3.5\n2,y,4e2\n");
    CHECK(t.n_rows() == 2);
    CHECK(t.n_cols() == 3);
    CHECK(t.is_numeric("a"));
    CHECK_FALSE(t.is_numeric("b"));
    CHECK(t.is_numeric("c"));
    CHECK(t.numeric("c")[1] == 400.0);
    CHECK(t.categorical("b") == std::vector<std::string>{"x", "y"});
}

TEST_CASE("csv parsing handles BOM, CRLF and trailing blank lines") {
    Table t = Table::from_csv_text("\xEF\xBB\xBF" "Age,Dept\r\n41,Sales\r\n33,R&D\r\n\r\n");
    CHECK(t.n_rows() == 2);
    CHECK(t.column(size_t{0}).schema.name == "Age");
    CHECK(t.numeric("Age")[0] == 41.0);
    CHECK(t.categorical("Dept")[1] == "R&D");
}

TEST_CASE("quoted fields keep commas, escaped quotes and newlines") {
    Table t = Table::from_csv_text("a,b\n\"1,5\",\"he said \"\"hi\"\"\"\n\"x\ny\",z\n");
    CHECK(t.n_rows() == 2);
    CHECK_FALSE(t.is_numeric("a"));
    CHECK(t.categorical("a")[0] == "1,5");
    CHECK(t.categorical("b")[0] == "he said \"hi\"");
    CHECK(t.categorical("a")[1] == "x\ny");
}

TEST_CASE("a quoted number still counts as numeric") {
    Table t = Table::from_csv_text("a\n\"42\"\n\"43\"\n");
    CHECK(t.is_numeric("a"));
    CHECK(t.numeric("a")[0] == 42.0);
}

TEST_CASE("csv rejects empty cells, ragged rows and duplicate headers") {
    CHECK_RAISES_CODE(Table::from_csv_text("a,b\n1,\n"), Errc::MissingValue);
    CHECK_RAISES_CODE(Table::from_csv_text("a,b\n1\n"), Errc::MissingValue);
    CHECK_RAISES_CODE(Table::from_csv_text("a,a\n1,2\n"), Errc::DuplicateColumn);
    CHECK_RAISES_CODE(Table::from_csv_text(""), Errc::EmptyFile);
    CHECK_RAISES_CODE(Table::from_csv_text("a,b\n"), Errc::EmptyFile);
    CHECK_RAISES_CODE(Table::load_csv("no/such/file.csv"), Errc::Io);
}

TEST_CASE("csv text round trip preserves rows and quoting") {
    std::string text = "a,b\n\"1,5\",plain\n\"q\"\"q\",z\n";
    Table t = Table::from_csv_text(text);
    Table again = Table::from_csv_text(t.to_csv_text());
    CHECK(again.categorical("a") == t.categorical("a"));
    CHECK(again.categorical("b") == t.categorical("b"));
}

TEST_CASE("summarize matches hand-computed statistics") {
    Table t = Table::from_csv_text("v\n1\n2\n3\n4\n5\n");
    SummaryStats s = t.summarize("v");
    CHECK(s.count == 5);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(2.5)));
    CHECK(s.min == 1.0);
    CHECK(s.q25 == doctest::Approx(2.0));
    CHECK(s.q50 == doctest::Approx(3.0));
    CHECK(s.q75 == doctest::Approx(4.0));
    CHECK(s.max == 5.0);
}

TEST_CASE("quantiles interpolate between closest ranks") {
    std::vector<double> v{1, 2, 3, 4};
    CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_sorted(v, 0.75) == doctest::Approx(3.25));
    CHECK(quantile_sorted(v, 0.0) == 1.0);
    CHECK(quantile_sorted(v, 1.0) == 4.0);
}

TEST_CASE("summarize rejects categorical and short columns") {
    Table t = Table::from_csv_text("a,b\nx,1\ny,2\n");
    CHECK_RAISES_CODE(t.summarize("a"), Errc::NonNumericColumn);
    CHECK_RAISES_CODE(t.summarize("zz"), Errc::UnknownColumn);
    Table one = Table::from_csv_text("v\n7\n");
    SummaryStats s = one.summarize("v"); // single value: no spread, all quantiles collapse
    CHECK(s.count == 1);
    CHECK(s.std_dev == 0.0);
    CHECK(s.q50 == 7.0);
    CHECK_RAISES_CODE(sample_std({7.0}), Errc::DegenerateColumn);
}

TEST_CASE("class distribution orders by count desc then label asc") {
    Table t = Table::from_csv_text("y\nb\na\na\nc\nc\n");
    auto dist = t.class_distribution("y");
    REQUIRE(dist.size() == 3);
    CHECK(dist[0].label == "a");
    CHECK(dist[0].count == 2);
    CHECK(dist[1].label == "c");
    CHECK(dist[1].count == 2);
    CHECK(dist[2].label == "b");
    CHECK(dist[2].count == 1);
    CHECK(dist[0].fraction == doctest::Approx(0.4));
}

TEST_CASE("class distribution works on numeric columns too") {
    Table t = Table::from_csv_text("y\n1\n1\n0\n");
    auto dist = t.class_distribution("y");
    REQUIRE(dist.size() == 2);
    CHECK(dist[0].label == "1");
    CHECK(dist[0].count == 2);
}

TEST_CASE("histogram covers the range and counts every value") {
    Table t = Table::from_csv_text("v\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
    auto bins = t.histogram("v", 5);
    REQUIRE(bins.size() == 5);
    size_t total = 0;
    for (const auto& b : bins) total += b.count;
    CHECK(total == 10);
    CHECK(bins.front().lo == 1.0);
    CHECK(bins.back().hi == 10.0);
    CHECK(bins.back().count == 2); // max value belongs to the last bin
}

TEST_CASE("histogram of a constant column is a single full bin") {
    Table t = Table::from_csv_text("v\n3\n3\n3\n");
    auto bins = t.histogram("v", 4);
    size_t total = 0;
    for (const auto& b : bins) total += b.count;
    CHECK(total == 3);
}

TEST_CASE("without_columns drops by name and validates") {
    Table t = Table::from_csv_text("a,b,c\n1,2,3\n");
    Table r = t.without_columns({"b"});
    CHECK(r.n_cols() == 2);
    CHECK(r.has_column("a"));
    CHECK_FALSE(r.has_column("b"));
    CHECK_RAISES_CODE(t.without_columns({"zzz"}), Errc::UnknownColumn);
}

TEST_CASE("select_rows keeps order and validates bounds") {
    Table t = Table::from_csv_text("a\n10\n20\n30\n");
    Table r = t.select_rows({2, 0});
    CHECK(r.numeric("a") == std::vector<double>{30, 10});
    CHECK_RAISES_CODE(t.select_rows({3}), Errc::LengthMismatch);
}

TEST_CASE("write_csv and load_csv round trip through disk") {
    testutil::TempDir dir("table-io");
    Table t = Table::from_csv_text("a,b\n1,x\n2,y\n");
    t.write_csv(dir.sub("t.csv"));
    Table back = Table::load_csv(dir.sub("t.csv"));
    CHECK(back.n_rows() == 2);
    CHECK(back.numeric("a")[1] == 2.0);
    CHECK(back.categorical("b")[0] == "x");
}

} // TEST_SUITE
