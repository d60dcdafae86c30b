#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "cdc/fixedmath.hpp"
#include "support/testkit.hpp"

using namespace cdc;
using namespace cdc::fixedmath;

TEST(Muldiv, FastPathHandTrace) {
    // ((700*100)/100)*48/100 = 70000*48/100
    EXPECT_EQ(muldiv(48, 700, 100), 336);
}

TEST(Muldiv, IdentityRatio) {
    for (std::int32_t n = 1; n <= 1000000; n += 997) EXPECT_EQ(muldiv(1, n, n), 1) << n;
    EXPECT_EQ(muldiv(1, 1000000, 1000000), 1);
}

TEST(Muldiv, SlowPathWithinTwoPercent) {
    // b >= 10737418 takes the power-of-two path; d = 8 for a = 7.
    const Sp r = muldiv(7, 30000000, 40);
    const double exact = 7.0 * 30000000 / 40;
    EXPECT_LE(std::abs(r - exact) / exact, 0.02);
    EXPECT_EQ(r, (30000000 / 8) * 7 / (40 / 8));
}

TEST(Muldiv, DegenerateRatioAfterScaling) {
    // c/d truncates to zero: 4/8 = 0.
    try {
        muldiv(7, 20000000, 4);
        FAIL() << "expected a degenerate ratio";
    } catch (const MathError& e) {
        EXPECT_EQ(e.kind(), MathError::Kind::DegenerateRatio);
        EXPECT_STREQ(e.what(), "degenerate ratio");
    }
}

TEST(Muldiv, OverflowDetected) {
    EXPECT_THROW(muldiv(1 << 20, 10000000, 1), MathError);
    try {
        muldiv(1 << 20, 10000000, 1);
    } catch (const MathError& e) {
        EXPECT_EQ(e.kind(), MathError::Kind::Overflow);
    }
}

TEST(Muldiv, FastPathErrorBoundRandom) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::int32_t> pa(1, 1 << 14), pb(1, 10737417);
    for (int i = 0; i < 10000; ++i) {
        const std::int32_t a = pa(rng);
        const std::int32_t b = pb(rng);
        const std::int32_t c = std::uniform_int_distribution<std::int32_t>(1, b)(rng);
        if (std::int64_t{b} * 100 / c * a > INT32_MAX) continue;
        const Sp r = muldiv(a, b, c);
        const __int128 exact_num = static_cast<__int128>(a) * b;
        const long double exact = static_cast<long double>(exact_num) / c;
        if (r == 0) continue;
        EXPECT_LE(std::fabs(r - exact) / exact, 0.02L + 1.0L / std::abs(r)) << a << " " << b << " " << c;
    }
}

TEST(Isqrt, Examples) {
    EXPECT_EQ(isqrt(0), 0);
    EXPECT_EQ(isqrt(2), 1);
    EXPECT_EQ(isqrt(536895241), 23171);
    EXPECT_EQ(std::int64_t{23171} * 23171, 536895241);
}

TEST(Isqrt, ExhaustiveFloorTo2Pow20) {
    for (std::int32_t n = 0; n <= (1 << 20); ++n) {
        const std::int64_t r = isqrt(n);
        ASSERT_LE(r * r, n);
        ASSERT_GT((r + 1) * (r + 1), n);
    }
}

TEST(Isqrt, SaturatesAbove32767Squared) {
    EXPECT_EQ(isqrt(32767 * 32767), 32767);
    EXPECT_EQ(isqrt(2147483647), 32767);
}

TEST(Isqrt64, MatchesFloor) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t n = rng() >> 2;
        const unsigned __int128 r = isqrt64(n);
        ASSERT_LE(r * r, n);
        ASSERT_GT((r + 1) * (r + 1), n);
    }
}

TEST(Hypot, Examples) {
    EXPECT_EQ(hypot(3, 4), 5);
    EXPECT_EQ(hypot(30000, 40000), 50000);
    EXPECT_EQ(hypot_scale(30000, 40000), 2);
    const long double oracle = std::sqrt(2.0L) * 65536;
    EXPECT_LE(std::fabs(hypot(65536, 65537) - std::round(oracle)), 4);
    EXPECT_EQ(hypot_scale(65536, 65537), 4);
}

TEST(Hypot, SignsIgnored) {
    EXPECT_EQ(hypot(-30000, 40000), 50000);
    EXPECT_EQ(hypot(30000, -40000), 50000);
}

TEST(Hypot, ProvableHalvingBound) {
    // Each truncating halving loses < 1 per component, so the scaled result
    // is within (1 + sqrt 2) k of the true length.
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::int32_t> mag(1, 1 << 29);
    for (int i = 0; i < 10000; ++i) {
        const Sp dx = mag(rng) * (rng() & 1 ? 1 : -1);
        const Sp dy = mag(rng) * (rng() & 1 ? 1 : -1);
        const long double exact = std::sqrt(static_cast<long double>(dx) * dx + static_cast<long double>(dy) * dy);
        const std::int32_t k = hypot_scale(dx, dy);
        ASSERT_LE(std::fabs(hypot(dx, dy) - exact), (1 + std::sqrt(2.0L)) * k) << dx << " " << dy;
    }
}

TEST(Mod360, Examples) {
    EXPECT_EQ(mod360(360), 0);
    EXPECT_EQ(mod360(-90), 270);
    EXPECT_EQ(mod360(725), 5);
}

TEST(Mod360, ExhaustiveAgainstMathematicalMod) {
    for (int x = -10000; x <= 10000; ++x) ASSERT_EQ(mod360(x), ((x % 360) + 360) % 360) << x;
}

TEST(Octant, CompassTable) {
    EXPECT_EQ(octant(1, 0), Octant::R);
    EXPECT_EQ(octant(1, -1), Octant::RD);
    EXPECT_EQ(octant(0, -1), Octant::D);
    EXPECT_EQ(octant(-1, -1), Octant::LD);
    EXPECT_EQ(octant(-1, 0), Octant::L);
    EXPECT_EQ(octant(-1, 1), Octant::LU);
    EXPECT_EQ(octant(0, 1), Octant::U);
    EXPECT_EQ(octant(1, 1), Octant::RU);
    EXPECT_FALSE(octant(0, 0).has_value());
}

TEST(Octant, NonzeroSignPatternsAreBijective) {
    std::set<int> codes;
    for (int sh = -1; sh <= 1; ++sh) {
        for (int sv = -1; sv <= 1; ++sv) {
            if (sh == 0 && sv == 0) continue;
            const auto o = octant(sh * 12345, sv * 777);
            ASSERT_TRUE(o.has_value());
            codes.insert(static_cast<int>(*o));
        }
    }
    EXPECT_EQ(codes, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(ClipDistance, Examples) {
    EXPECT_EQ(clip_distance(327680, 327680, 30, 40, 50), 409600);
    EXPECT_EQ(clip_distance(0, 0, 30, 40, 50), 0);
    EXPECT_EQ(clip_distance(0, 131072, 0, 40, 40), 131072);
    EXPECT_EQ(clip_distance(262144, 0, -40, 0, 40), 262144);
}

TEST(ClipDistance, RationalOracleRandom) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<std::int32_t> ext(1, 30 * 65536), del(1, 200 * 65536);
    for (int i = 0; i < 1000; ++i) {
        const Sp ex = ext(rng), ey = ext(rng);
        const Sp dx = del(rng) * (rng() & 1 ? 1 : -1);
        const Sp dy = del(rng) * (rng() & 1 ? 1 : -1);
        const Sp len = hypot(dx, dy);
        // Only arrows that leave the box are drawn.
        if (std::abs(dx) <= ex && std::abs(dy) <= ey) continue;
        const Sp r = clip_distance(ex, ey, dx, dy, len);
        const bool x_first = static_cast<long double>(std::abs(dx)) * ey >= static_cast<long double>(std::abs(dy)) * ex;
        const auto iv = x_first ? testkit::muldiv_interval(ex, len, std::abs(dx))
                                : testkit::muldiv_interval(ey, len, std::abs(dy));
        ASSERT_GE(r, iv.lo) << ex << " " << ey << " " << dx << " " << dy;
        ASSERT_LE(r, iv.hi) << ex << " " << ey << " " << dx << " " << dy;
    }
}

TEST(TexScaling, FactorTimesDimen) {
    EXPECT_EQ(scale(100, Fraction{32768}), 50);
    EXPECT_EQ(scale(-100, Fraction{32768}), -50);
    EXPECT_EQ(scale(65536, Fraction{65536 + 16384}), 81920);
    EXPECT_EQ(xn_over_d(7, 1, 2), 3);
    EXPECT_EQ(xn_over_d(-7, 1, 2), -3);
    EXPECT_EQ(mul_div_exact(200, 1, 4), 50);
    EXPECT_THROW(mul_div_exact(1, 1, 0), MathError);
}
