#pragma once

// Integer kernel on 32-bit scaled points (1pt = 65536sp).
//
// muldiv, isqrt, hypot, mod360 and octant reproduce the engine's macro traces
// step for step, including TeX's truncating division. Where the original relies
// on TeX's own range checks, these functions throw MathError instead.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdc {

/// Signed length in scaled points.
using Sp = std::int32_t;

inline constexpr Sp kSpPerPt = 65536;

class MathError : public std::runtime_error {
public:
    enum class Kind { Overflow, DegenerateRatio };

    MathError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// A 16.16 fixed-point factor, the form TeX uses for `.5\dimen`.
struct Fraction {
    std::int32_t raw = 0;

    static constexpr Fraction from_raw(std::int32_t r) { return Fraction{r}; }
    static constexpr Fraction one() { return Fraction{65536}; }

    friend constexpr bool operator==(Fraction, Fraction) = default;
    friend constexpr auto operator<=>(Fraction, Fraction) = default;
};

/// Compass direction of an arrow. Values follow the direction-command table.
enum class Octant : int {
    R = 1,
    RD = 2,
    D = 3,
    LD = 4,
    L = 5,
    LU = 6,
    U = 7,
    RU = 8,
};

std::string_view octant_name(Octant o);

namespace fixedmath {

/// a*b/c the way the engine does it: ((b*100)/c)*a/100 when b < 10737418,
/// otherwise by scaling b and c down by the smallest power of two >= max(a,2).
Sp muldiv(std::int32_t a, std::int32_t b, std::int32_t c);

/// Bitwise binary search; floor(sqrt(n)) for n < 32768^2, saturating at 32767.
std::int32_t isqrt(std::int32_t n);

/// floor(sqrt(n)) on 64 bits, used for exact geometry outside the traced kernel.
std::uint64_t isqrt64(std::uint64_t n);

/// Halving hypotenuse. Both components must be nonzero; axis-aligned lengths
/// are taken directly by the caller.
Sp hypot(Sp dx, Sp dy);

/// Scale factor k the hypot trace ends with (exposed for error-bound checks).
std::int32_t hypot_scale(Sp dx, Sp dy);

std::int32_t mod360(std::int32_t degrees);

/// dh is rightward positive, dv is upward positive. (0,0) has no octant.
std::optional<Octant> octant(Sp dh, Sp dv);

/// Along-ray distance from an anchor to the boundary of a box with the given
/// half extents. Only axes with nonzero delta participate.
Sp clip_distance(Sp ex, Sp ey, Sp dx, Sp dy, Sp len);

// TeX dimension helpers. These are exact and used where the engine scales by
// decimal factors rather than through muldiv.

/// TeX's xn_over_d: x*n/d truncated toward zero, 0 <= n, d > 0.
Sp xn_over_d(Sp x, std::int32_t n, std::int32_t d);

/// `f\dimen`: integer part times v plus xn_over_d(v, frac, 65536).
Sp scale(Sp v, Fraction f);

/// Exact a*b/c in 64-bit, truncated toward zero; throws on a 32-bit overflow of
/// the result or c == 0.
Sp mul_div_exact(std::int64_t a, std::int64_t b, std::int64_t c);

}  // namespace fixedmath
}  // namespace cdc
