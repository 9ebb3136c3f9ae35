#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "platefocus/errors.hpp"
#include "platefocus/image_io.hpp"

namespace platefocus {
namespace {

Field small_field() {
    Field f(3, 2);
    f(0, 0) = 0.0;
    f(1, 0) = 0.5;
    f(2, 0) = 1.0;
    f(0, 1) = 2.0;
    f(1, 1) = -1.0;
    f(2, 1) = 1.0;
    return f;
}

std::string read_file(const std::string& name) {
    std::ifstream is(std::string(PLATEFOCUS_TEST_DATA) + "/" + name, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

TEST(Pgm16, GoldenBytes) {
    std::ostringstream os;
    write_pgm16(os, small_field(), {"hello"});
    EXPECT_EQ(os.str(), read_file("small.pgm"));
}

TEST(Pgm16, ReadBackRecoversScaleAndComments) {
    std::istringstream is(read_file("small.pgm"));
    const Pgm16 pgm = read_pgm16(is);
    EXPECT_EQ(pgm.width, 3);
    EXPECT_EQ(pgm.height, 2);
    EXPECT_EQ(pgm.max_value, 2.0);
    EXPECT_FALSE(pgm.is_signed);
    EXPECT_EQ(pgm.comments, std::vector<std::string>{"hello"});
    EXPECT_EQ(pgm.pixels, (std::vector<std::uint16_t>{0, 16384, 32768, 65535, 0, 32768}));
    const Field back = pgm.to_field();
    EXPECT_EQ(back(0, 1), 2.0);
    EXPECT_EQ(back(1, 1), 0.0);
}

TEST(Pgm16, RoundTripWithinHalfAStep) {
    std::mt19937_64 rng(83);
    const Field f = oracle::random_field(rng, 17, 9);
    std::stringstream ss;
    write_pgm16(ss, f);
    const Field back = read_pgm16(ss).to_field();
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, v);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(std::abs(back[i] - f[i]), 0.5 * peak / 65535.0 + 1e-15);
}

TEST(Pgm16, SignedRoundTrip) {
    const Field f = small_field();
    std::stringstream ss;
    write_pgm16_signed(ss, f, {"frame 0"});
    EXPECT_EQ(ss.str().rfind("P5\n# max_abs 2\n# frame 0\n3 2\n65535\n", 0), 0u);
    const Pgm16 pgm = read_pgm16(ss);
    EXPECT_TRUE(pgm.is_signed);
    EXPECT_EQ(pgm.pixels[3], 65535);
    EXPECT_EQ(pgm.pixels[4], 16384);
    const Field back = pgm.to_field();
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(std::abs(back[i] - f[i]), 2.0 / 65535.0);
    std::stringstream zero;
    write_pgm16_signed(zero, Field(2, 2, 0.0));
    for (auto px : read_pgm16(zero).pixels) EXPECT_EQ(px, 32768);
}

TEST(Pgm16, RejectsMalformed) {
    auto kind = [](const std::string& text) {
        std::istringstream is(text);
        try {
            read_pgm16(is);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidSpec;
    };
    EXPECT_EQ(kind("P2\n1 1\n65535\n"), ErrorKind::BadMagic);
    EXPECT_EQ(kind("P5\n1 x\n65535\n"), ErrorKind::Truncated);
    EXPECT_EQ(kind(std::string("P5\n2 1\n65535\n\x01\x02", 15)), ErrorKind::Truncated);
    EXPECT_EQ(kind("P5\n1 1\n255\nA"), ErrorKind::Config);
    try {
        load_pgm16("/nonexistent/dir/x.pgm");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Csv, FullPrecisionRows) {
    Field f(2, 2);
    f(0, 0) = 0.1;
    f(1, 0) = 1.0 / 3.0;
    f(0, 1) = -2.5;
    f(1, 1) = 1e-300;
    std::ostringstream os;
    write_csv(os, f, {"energy"});
    EXPECT_EQ(os.str(), "# energy\n0.10000000000000001,0.33333333333333331\n-2.5,1e-300\n");
    EXPECT_EQ(std::stod("0.33333333333333331"), 1.0 / 3.0);
}

TEST(SideBySide, NormalizesEachHalf) {
    Field left(2, 2, 1.0);
    left(0, 0) = 4.0;
    Field right(3, 1, 0.5);
    const Field s = side_by_side(left, right, 1);
    EXPECT_EQ(s.nx(), 6);
    EXPECT_EQ(s.ny(), 2);
    EXPECT_EQ(s(0, 0), 1.0);
    EXPECT_EQ(s(1, 0), 0.25);
    EXPECT_EQ(s(2, 0), 0.0);
    EXPECT_EQ(s(3, 0), 1.0);
    EXPECT_EQ(s(5, 1), 0.0);
}

}  // namespace
}  // namespace platefocus
