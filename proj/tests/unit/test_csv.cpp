// test_csv.cpp

#include "adfs/csv.hpp"

#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

using namespace adfs::csv;

TEST(Csv, DoublesRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        const auto s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    }
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, EscapesSpecialFields) {
    EXPECT_EQ(escape("plain"), "plain");
    EXPECT_EQ(escape("a,b"), "\"a,b\"");
    EXPECT_EQ(escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(escape("line\nbreak"), "\"line\nbreak\"");
}

TEST(Csv, WriterRows) {
    std::ostringstream out;
    Writer w(out);
    w.header({"t", "label", "flag"});
    w << 0.5 << "x,y" << true;
    w.end_row();
    EXPECT_EQ(out.str(), "t,label,flag\r\n0.5,\"x,y\",1\r\n");
}
