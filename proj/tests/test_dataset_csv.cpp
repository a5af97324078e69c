#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "regdiag/csv.hpp"
#include "regdiag/errors.hpp"
#include "support.hpp"

using namespace regdiag;
using namespace support;

TEST(LoadDataset, MinimalTable) {
    const Dataset d = load_dataset("m,a\n1,x\n0,y", "t");
    EXPECT_EQ(d.row_count(), 2u);
    EXPECT_EQ(d.column("m").kind(), ColumnKind::binary);
    EXPECT_EQ(d.column("a").kind(), ColumnKind::categorical);
    EXPECT_EQ(d.column("a").token(1), "y");
    EXPECT_EQ(d.name(), "t");
}

TEST(LoadDataset, EmptyStringIsNull) {
    const Dataset d = load_dataset("m\n1\n0\n\n", "t");
    ASSERT_EQ(d.row_count(), 3u);
    const Column& m = d.column("m");
    EXPECT_EQ(m.kind(), ColumnKind::binary);
    EXPECT_EQ(m.null_count(), 1u);
    EXPECT_TRUE(m.is_null(2));
}

TEST(LoadDataset, KindInference) {
    const Dataset d = load_dataset("a,b,c,d\n1.5,1.5,true,x\n2,2,false,\nx,-3e2,,3\n", "t");
    EXPECT_EQ(d.column("a").kind(), ColumnKind::categorical);
    EXPECT_EQ(d.column("b").kind(), ColumnKind::numeric);
    EXPECT_EQ(d.column("c").kind(), ColumnKind::binary);
    EXPECT_EQ(d.column("d").kind(), ColumnKind::categorical);
    EXPECT_DOUBLE_EQ(d.column("b").numbers()[2], -300.0);
    EXPECT_EQ(d.column("c").bits()[0], 1);
    EXPECT_EQ(d.column("c").bits()[1], 0);
    EXPECT_TRUE(d.column("c").is_null(2));
}

TEST(LoadDataset, BinaryWinsOverNumeric) {
    const Dataset d = load_dataset("y\n0\n1\n1\n", "t");
    EXPECT_EQ(d.column("y").kind(), ColumnKind::binary);
    const Dataset e = load_dataset("y\n0\n1\n2\n", "t");
    EXPECT_EQ(e.column("y").kind(), ColumnKind::numeric);
}

TEST(LoadDataset, NonFiniteTokensAreText) {
    const Dataset d = load_dataset("v\n1\ninf\nnan\n", "t");
    EXPECT_EQ(d.column("v").kind(), ColumnKind::categorical);
}

TEST(LoadDataset, QuotingAndLineEndings) {
    const Dataset d = load_dataset("\xEF\xBB\xBF" "name,note\r\n\"a,b\",\"say \"\"hi\"\"\"\r\nc,\"two\nlines\"\r\n", "t");
    ASSERT_EQ(d.row_count(), 2u);
    EXPECT_EQ(d.column("name").token(0), "a,b");
    EXPECT_EQ(d.column("note").token(0), "say \"hi\"");
    EXPECT_EQ(d.column("note").token(1), "two\nlines");
}

TEST(LoadDataset, ParseErrorsCarryRowNumbers) {
    try {
        load_dataset("a,b\n1,2\n3\n", "t");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
    try {
        load_dataset("a,a\n1,2\n", "t");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 1u);
    }
    EXPECT_THROW(load_dataset("", "t"), ParseError);
    EXPECT_THROW(load_dataset("a\n\"open\n", "t"), ParseError);
    EXPECT_THROW(load_dataset("a\nx\"y\n", "t"), ParseError);
}

TEST(LoadDataset, DeterministicAndOrderPreserving) {
    const std::string text = "k,v\nz,3\na,1\nm,2\n";
    const Dataset a = load_dataset(text, "t");
    const Dataset b = load_dataset(text, "t");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.column("k").token(0), "z");
    EXPECT_EQ(a.column("k").token(2), "m");
}

TEST(Csv, RoundTripRandomDatasets) {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<std::string> labels;
        std::vector<std::int8_t> bits;
        std::vector<double> nums;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = rng.below(6);
            labels.push_back(r == 0 ? "" : r == 1 ? "with,comma" : r == 2 ? "quote\"d" : "v" + std::to_string(r));
            bits.push_back(static_cast<std::int8_t>(rng.below(3)) - 1);
            const auto kind = rng.below(4);
            nums.push_back(kind == 0   ? std::numeric_limits<double>::quiet_NaN()
                           : kind == 1 ? static_cast<double>(rng.below(2))
                                       : (rng.uniform() - 0.5) * 1e6);
        }
        labels[0] = "anchor";
        bits[0] = 1;
        nums[0] = 0.125;
        const Dataset d("rt", {cat("label", labels), bin("flag", bits), num("value", nums)});
        const Dataset back = load_dataset(to_csv(d), "rt");
        ASSERT_EQ(back, d) << to_csv(d);
        EXPECT_EQ(back.column("value").kind(), ColumnKind::numeric);
    }
}

TEST(Dataset, Invariants) {
    EXPECT_THROW(Dataset("d", {cat("a", {"x", "y"}), cat("b", {"x"})}), std::invalid_argument);
    EXPECT_THROW(Dataset("d", {cat("a", {"x"}), cat("a", {"y"})}), std::invalid_argument);
    EXPECT_THROW(Column::numeric("n", std::vector<double>{std::numeric_limits<double>::infinity()}),
                 std::invalid_argument);
    EXPECT_THROW(bin("b", {2}), std::invalid_argument);
    const Dataset d("d", {cat("a", {"x", "y", "z"}), bin("b", {1, 0, -1})});
    EXPECT_THROW(d.column("missing"), std::out_of_range);
    EXPECT_THROW(d.column("a").numbers(), std::logic_error);
}

TEST(Dataset, SelectAndTake) {
    const Dataset d("d", {cat("a", {"x", "y", "z"}), bin("b", {1, 0, -1}), num("c", {1.5, 2.5, 3.5})});
    const std::vector<std::string> names = {"c", "a"};
    const Dataset s = d.select(names);
    EXPECT_EQ(s.column_names(), names);
    const std::vector<std::size_t> rows = {2, 0, 2};
    const Dataset t = d.take(rows);
    EXPECT_EQ(t.row_count(), 3u);
    EXPECT_EQ(t.column("a").token(0), "z");
    EXPECT_EQ(t.column("a").token(1), "x");
    EXPECT_TRUE(t.column("b").is_null(2));
    EXPECT_DOUBLE_EQ(t.column("c").numbers()[1], 1.5);
}

TEST(Column, AsCategoricalOfBinary) {
    const Column c = bin("b", {1, 0, -1}).as_categorical();
    EXPECT_EQ(c.kind(), ColumnKind::categorical);
    EXPECT_EQ(c.token(0), "1");
    EXPECT_EQ(c.token(1), "0");
    EXPECT_FALSE(c.token(2).has_value());
    EXPECT_THROW(num("n", {1.0}).as_categorical(), std::logic_error);
}

TEST(DeriveIndicatorMetric, Examples) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Dataset d("calls", {num("duration", {10, 35, 35, 90, nan})});
    const Dataset out = derive_indicator_metric(d, "duration", 30, 40, "ended_in_bin");
    const Column& ind = out.column("ended_in_bin");
    EXPECT_EQ(ind.kind(), ColumnKind::binary);
    const std::vector<std::int8_t> expected = {0, 1, 1, 0, -1};
    EXPECT_TRUE(std::equal(ind.bits().begin(), ind.bits().end(), expected.begin(), expected.end()));
    EXPECT_EQ(out.column_count(), 2u);
}

TEST(DeriveIndicatorMetric, BoundariesAndErrors) {
    const Dataset d("calls", {num("duration", {30, 40}), cat("os", {"a", "b"})});
    const Dataset out = derive_indicator_metric(d, "duration", 30, 40, "x");
    EXPECT_EQ(out.column("x").bits()[0], 1);
    EXPECT_EQ(out.column("x").bits()[1], 0);
    EXPECT_THROW(derive_indicator_metric(d, "duration", 30, 40, "os"), std::invalid_argument);
    EXPECT_THROW(derive_indicator_metric(d, "os", 30, 40, "y"), std::invalid_argument);
}
