#include "liveprof/csv.hpp"
#include "liveprof/text_view.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace liveprof;

TEST(TextView, ShapeLine) {
    const Table t = parse_csv("a,b\n1,2\n3,4\n", {}, "df");
    EXPECT_EQ(shape_line("df", t), "df: 2 rows × 2 cols");
}

TEST(TextView, ProfileTextHasOneRowPerColumn) {
    const Table t = parse_csv("n,s,d\n1,a,2020-01-01\n,b,2020-01-02\n", {}, "df");
    const std::string text = profile_text(profile_table(t));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    EXPECT_NE(text.find("50.0%"), std::string::npos);
    EXPECT_NE(text.find("2020-01-01 .. 2020-01-02"), std::string::npos);
}

TEST(TextView, HistogramBarsMatchCounts) {
    const Table t = parse_csv("v\n0\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n", {}, "df");
    const std::string text = plot_text(t, {"df", "v", dsl::PlotKind::histogram}, 30);
    EXPECT_NE(text.find("[0, 2.5)  | " + std::string(30, '#') + " 3"), std::string::npos) << text;
    EXPECT_NE(text.find("[7.5, 10] | "), std::string::npos) << text;
}
