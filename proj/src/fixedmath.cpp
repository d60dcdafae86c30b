#include "cdc/fixedmath.hpp"

#include <limits>

namespace cdc {

std::string_view octant_name(Octant o) {
    switch (o) {
        case Octant::R: return "r";
        case Octant::RD: return "rd";
        case Octant::D: return "d";
        case Octant::LD: return "ld";
        case Octant::L: return "l";
        case Octant::LU: return "lu";
        case Octant::U: return "u";
        case Octant::RU: return "ru";
    }
    return "?";
}

namespace fixedmath {
namespace {

constexpr std::int32_t kFastPathLimit = 10737418;
constexpr std::int32_t kHypotLimit = 23171;
constexpr std::int64_t kTexMaxDimen = (std::int64_t{1} << 30) - 1;

[[noreturn]] void overflow(const char* where) {
    throw MathError(MathError::Kind::Overflow, std::string("overflow in ") + where);
}

std::int32_t checked_mul(std::int32_t a, std::int32_t b, const char* where) {
    std::int32_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) overflow(where);
    return r;
}

std::int32_t checked_div(std::int32_t a, std::int32_t b) {
    if (b == 0) throw MathError(MathError::Kind::DegenerateRatio, "degenerate ratio");
    if (a == std::numeric_limits<std::int32_t>::min() && b == -1) overflow("muldiv");
    return a / b;
}

std::int32_t checked_abs(std::int32_t v, const char* where) {
    if (v == std::numeric_limits<std::int32_t>::min()) overflow(where);
    return v < 0 ? -v : v;
}

}  // namespace

Sp muldiv(std::int32_t a, std::int32_t b, std::int32_t c) {
    if (b < kFastPathLimit) {
        std::int32_t r = checked_mul(b, 100, "muldiv");
        r = checked_div(r, c);
        r = checked_mul(r, a, "muldiv");
        return r / 100;
    }
    if (a < 0) {
        a = checked_abs(a, "muldiv");
        c = -c;
    }
    std::int32_t d = 1;
    do {
        d = checked_mul(d, 2, "muldiv");
    } while (a > d);
    std::int32_t r = b / d;
    const std::int32_t scaled_c = c / d;
    r = checked_mul(r, a, "muldiv");
    return checked_div(r, scaled_c);
}

std::int32_t isqrt(std::int32_t n) {
    std::int32_t step = 32768;
    std::int32_t acc = 0;
    do {
        step /= 2;
        const std::int32_t probe = acc + step;
        if (probe * probe <= n) acc += step;
    } while (step > 1);
    return acc;
}

namespace {

struct HypotTrace {
    std::int32_t root;
    std::int32_t scale;
};

HypotTrace hypot_trace(Sp dx, Sp dy) {
    if (dx == 0 || dy == 0) {
        throw std::invalid_argument("hypot requires both components nonzero");
    }
    std::int32_t x = checked_abs(dx, "hypot");
    std::int32_t y = checked_abs(dy, "hypot");
    std::int32_t k = 1;
    while (!(x < kHypotLimit && y < kHypotLimit)) {
        x /= 2;
        y /= 2;
        k *= 2;
    }
    return {isqrt(x * x + y * y), k};
}

}  // namespace

Sp hypot(Sp dx, Sp dy) {
    const auto t = hypot_trace(dx, dy);
    return checked_mul(t.root, t.scale, "hypot");
}

std::int32_t hypot_scale(Sp dx, Sp dy) { return hypot_trace(dx, dy).scale; }

std::int32_t mod360(std::int32_t degrees) {
    std::int32_t r = degrees;
    if (r < 0) {
        while (r < 0) r += 360;
    } else {
        while (r > 360) r -= 360;
        if (r == 360) r = 0;
    }
    return r;
}

std::optional<Octant> octant(Sp dh, Sp dv) {
    // Engine table keyed on (vertical, horizontal) signs.
    if (dv > 0) {
        if (dh > 0) return Octant::RU;
        if (dh == 0) return Octant::U;
        return Octant::LU;
    }
    if (dv == 0) {
        if (dh > 0) return Octant::R;
        if (dh == 0) return std::nullopt;
        return Octant::L;
    }
    if (dh > 0) return Octant::RD;
    if (dh == 0) return Octant::D;
    return Octant::LD;
}

Sp clip_distance(Sp ex, Sp ey, Sp dx, Sp dy, Sp len) {
    const std::int32_t adx = checked_abs(dx, "clip_distance");
    const std::int32_t ady = checked_abs(dy, "clip_distance");
    if (adx == 0 && ady == 0) throw std::invalid_argument("clip_distance on a zero direction");
    if (adx == 0) return ey;
    if (ady == 0) return ex;
    if (ex <= 0 || ey <= 0) return 0;

    // Whichever axis has the larger delta-per-extent is crossed first.
    const std::int32_t qx = adx / ex;
    const std::int32_t qy = ady / ey;
    if (qx == qy) {
        // Tie on the quotients: compare exactly so only the nearer crossing is evaluated.
        const bool x_first = std::int64_t{adx} * ey >= std::int64_t{ady} * ex;
        return x_first ? muldiv(ex, len, adx) : muldiv(ey, len, ady);
    }
    if (qy < qx) return muldiv(ex, len, adx);
    return muldiv(ey, len, ady);
}

std::uint64_t isqrt64(std::uint64_t n) {
    std::uint64_t r = 0;
    for (std::uint64_t bit = std::uint64_t{1} << 62; bit != 0; bit >>= 2) {
        if (n >= r + bit) {
            n -= r + bit;
            r = (r >> 1) + bit;
        } else {
            r >>= 1;
        }
    }
    return r;
}

Sp xn_over_d(Sp x, std::int32_t n, std::int32_t d) {
    if (d <= 0 || n < 0) throw std::invalid_argument("xn_over_d expects n >= 0, d > 0");
    const std::int64_t mag = (x < 0 ? -std::int64_t{x} : std::int64_t{x}) * n / d;
    if (mag > kTexMaxDimen) overflow("xn_over_d");
    return static_cast<Sp>(x < 0 ? -mag : mag);
}

Sp scale(Sp v, Fraction f) {
    const bool negative = f.raw < 0;
    const std::int64_t mag = negative ? -std::int64_t{f.raw} : std::int64_t{f.raw};
    const std::int64_t whole = mag >> 16;
    const auto frac = static_cast<std::int32_t>(mag & 0xFFFF);
    const std::int64_t r = whole * v + xn_over_d(v, frac, 65536);
    if (r > kTexMaxDimen || r < -kTexMaxDimen) overflow("scale");
    return static_cast<Sp>(negative ? -r : r);
}

Sp mul_div_exact(std::int64_t a, std::int64_t b, std::int64_t c) {
    if (c == 0) throw MathError(MathError::Kind::DegenerateRatio, "degenerate ratio");
    const __int128 r = static_cast<__int128>(a) * b / c;
    if (r > std::numeric_limits<std::int32_t>::max() || r < std::numeric_limits<std::int32_t>::min()) {
        overflow("mul_div_exact");
    }
    return static_cast<Sp>(r);
}

}  // namespace fixedmath
}  // namespace cdc
