#include "cdc/labels.hpp"

#include <array>
#include <cstdlib>

namespace cdc::labels {

namespace {

// tan(d degrees) in 16.16 for d = 0..89.
constexpr std::array<std::int64_t, 90> kTan{
    0,      1144,   2289,   3435,   4583,   5734,   6888,   8047,    9210,    10380,   11556,   12739,  13930,
    15130,  16340,  17560,  18792,  20036,  21294,  22566,  23853,   25157,   26478,   27818,   29179,  30560,
    31964,  33392,  34846,  36327,  37837,  39378,  40951,  42560,   44205,   45889,   47615,   49385,  51202,
    53070,  54991,  56970,  59009,  61113,  63287,  65536,  67865,   70279,   72785,   75391,   78103,  80930,
    83882,  86969,  90203,  93595,  97161,  100917, 104880, 109070,  113512,  118230,  123255,  128622, 134369,
    140542, 147196, 154393, 162207, 170727, 180059, 190330, 201699,  214359,  228551,  244584,  262851, 283868,
    308323, 337153, 371673, 413778, 466313, 533748, 623533, 749080,  937208,  1250501, 1876705, 3754555,
};

using i128 = __int128;

std::int64_t ceil_div(i128 num, i128 den) { return static_cast<std::int64_t>((num + den - 1) / den); }

Sp checked(std::int64_t v) {
    if (v > (1LL << 30) || v < -(1LL << 30)) throw MathError(MathError::Kind::Overflow, "label offset overflow");
    return static_cast<Sp>(v);
}

}  // namespace

bool on_side_a(LabelCode code) { return code == LabelCode::Caret || code == LabelCode::Lt; }

int atan_degrees(std::int64_t x, std::int64_t y) {
    if (x == 0 && y == 0) return 0;
    const i128 ax = x < 0 ? -x : x;
    const i128 ay = y < 0 ? -y : y;
    int base = 90;
    if (ax != 0) {
        base = 0;
        while (base + 1 < 90 && kTan[static_cast<std::size_t>(base + 1)] * ax <= ay * 65536) ++base;
    }
    int deg = base;
    if (x < 0 && y >= 0) deg = 180 - base;
    else if (x < 0 && y < 0) deg = 180 + base;
    else if (x >= 0 && y < 0) deg = 360 - base;
    return fixedmath::mod360(deg);
}

int rotation_angle(Point start, Point end, bool rotated) {
    if (!rotated) return 0;
    return atan_degrees(std::int64_t{end.x} - start.x, std::int64_t{start.y} - end.y);
}

Point point_on(Point start, Point end, Fraction f) {
    const Sp dx = static_cast<Sp>(std::int64_t{end.x} - start.x);
    const Sp dy = static_cast<Sp>(std::int64_t{end.y} - start.y);
    return {checked(std::int64_t{start.x} + fixedmath::scale(dx, f)),
            checked(std::int64_t{start.y} + fixedmath::scale(dy, f))};
}

Point side_offset(Point start, Point end, bool side_a, Sp pad, const TextBox& box, bool rotated) {
    const std::int64_t dx = std::int64_t{end.x} - start.x;
    const std::int64_t dy = std::int64_t{end.y} - start.y;
    // Side A normal in document space: (dy, -dx).
    std::int64_t nx = dy;
    std::int64_t ny = -dx;
    if (!side_a) {
        nx = -nx;
        ny = -ny;
    }
    const std::int64_t hd = std::int64_t{box.h} + box.d;
    if (nx == 0 && ny == 0) return {0, checked(-(pad + hd / 2))};
    if (nx == 0) {
        const std::int64_t off = pad + hd / 2;
        return {0, checked(ny > 0 ? off : -off)};
    }
    if (ny == 0) {
        const std::int64_t off = rotated ? pad + hd / 2 : pad;
        return {checked(nx > 0 ? off : -off), 0};
    }
    const std::uint64_t len2 = static_cast<std::uint64_t>(nx * nx) + static_cast<std::uint64_t>(ny * ny);
    const std::int64_t len = static_cast<std::int64_t>(fixedmath::isqrt64(len2));
    const std::int64_t anx = std::llabs(nx);
    const std::int64_t any = std::llabs(ny);
    auto component = [&](std::int64_t n) {
        const std::int64_t an = std::llabs(n);
        std::int64_t mag;
        if (rotated) {
            mag = ceil_div(i128{an} * (2 * std::int64_t{pad} + hd), i128{2} * len);
        } else {
            const i128 extent = i128{anx} * box.w + i128{any} * hd;
            mag = ceil_div(i128{an} * pad, len) + ceil_div(i128{an} * extent, i128{2} * len2);
        }
        return checked(n < 0 ? -mag : mag);
    };
    return {component(nx), component(ny)};
}

LabelAnchor place_label(const Label& label, Point start, Point end, const TextBox& box, Sp labelpad,
                        Fraction labelpoint, bool rotated) {
    LabelAnchor out;
    out.text = label.text;
    out.code = label.code;
    out.box = box;
    const Fraction t = label.slide && label.slide->point ? *label.slide->point : labelpoint;
    const Point on = point_on(start, end, t);
    const bool side_a = on_side_a(label.code);
    const Point off = side_offset(start, end, side_a, labelpad, box, rotated);
    out.pos = {checked(std::int64_t{on.x} + off.x), checked(std::int64_t{on.y} + off.y)};
    const bool vertical = start.x == end.x && start.y != end.y;
    if (rotated) {
        out.anchor = 1;
        out.rotation = rotation_angle(start, end, true);
    } else if (vertical) {
        out.anchor = off.x > 0 ? 0 : 2;
    } else {
        out.anchor = 1;
    }
    if (label.slide) {
        if (label.slide->offx) out.pos.x = checked(std::int64_t{out.pos.x} + *label.slide->offx);
        if (label.slide->offy) out.pos.y = checked(std::int64_t{out.pos.y} - *label.slide->offy);
    }
    return out;
}

}  // namespace cdc::labels
