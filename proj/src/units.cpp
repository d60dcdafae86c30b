#include "cdc/units.hpp"

#include <array>
#include <cctype>
#include <cstdint>

namespace cdc::units {
namespace {

struct Unit {
    std::string_view name;
    std::int32_t num;
    std::int32_t denom;
};

constexpr std::array<Unit, 8> kUnits{{
    {"pt", 1, 1},
    {"in", 7227, 100},
    {"pc", 12, 1},
    {"cm", 7227, 254},
    {"mm", 7227, 2540},
    {"bp", 7227, 7200},
    {"dd", 1238, 1157},
    {"cc", 14856, 1157},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

struct Decimal {
    bool negative = false;
    std::int64_t whole = 0;
    std::int32_t frac = 0;  // rounded to 2^-16
    std::string_view rest;
};

// Digits after the decimal point, rounded the way TeX's round_decimals does.
std::int32_t round_decimals(std::string_view digits) {
    if (digits.size() > 17) digits = digits.substr(0, 17);
    std::int64_t a = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        a = (a + (*it - '0') * std::int64_t{131072}) / 10;
    }
    return static_cast<std::int32_t>((a + 1) / 2);
}

std::optional<Decimal> scan_decimal(std::string_view s) {
    Decimal d;
    std::size_t i = 0;
    while (i < s.size() && (s[i] == '+' || s[i] == '-' || s[i] == ' ')) {
        if (s[i] == '-') d.negative = !d.negative;
        ++i;
    }
    const std::size_t int_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        d.whole = d.whole * 10 + (s[i] - '0');
        if (d.whole > (std::int64_t{1} << 31)) return std::nullopt;
        ++i;
    }
    bool any_digits = i > int_start;
    if (i < s.size() && (s[i] == '.' || s[i] == ',')) {
        ++i;
        const std::size_t frac_start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        d.frac = round_decimals(s.substr(frac_start, i - frac_start));
        any_digits = any_digits || i > frac_start;
    }
    if (!any_digits) return std::nullopt;
    d.rest = trim(s.substr(i));
    return d;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
    }
    return true;
}

void print_scaled(std::string& out, std::int32_t s) {
    std::int64_t v = s;
    if (v < 0) {
        out += '-';
        v = -v;
    }
    out += std::to_string(v / 65536);
    out += '.';
    std::int64_t rem = 10 * (v % 65536) + 5;
    std::int64_t delta = 10;
    do {
        if (delta > 65536) rem = rem + 0x8000 - 50000;
        out += static_cast<char>('0' + rem / 65536);
        rem = 10 * (rem % 65536);
        delta *= 10;
    } while (rem > delta);
}

}  // namespace

std::optional<Sp> parse_length(std::string_view text) {
    const auto d = scan_decimal(trim(text));
    if (!d) return std::nullopt;
    std::string_view unit = d->rest;
    if (unit.size() > 4 && iequals(unit.substr(0, 4), "true")) unit = trim(unit.substr(4));

    std::int64_t magnitude = 0;
    if (iequals(unit, "sp")) {
        if (d->whole >= (std::int64_t{1} << 30)) return std::nullopt;
        magnitude = d->whole;
    } else {
        const Unit* found = nullptr;
        for (const auto& u : kUnits) {
            if (iequals(unit, u.name)) found = &u;
        }
        if (found == nullptr) return std::nullopt;
        std::int64_t whole = d->whole;
        std::int64_t frac = d->frac;
        if (found->num != 1 || found->denom != 1) {
            const std::int64_t prod = whole * found->num;
            whole = prod / found->denom;
            const std::int64_t remainder = prod % found->denom;
            frac = (found->num * frac + 65536 * remainder) / found->denom;
            whole += frac / 65536;
            frac %= 65536;
        }
        if (whole >= 16384) return std::nullopt;
        magnitude = whole * 65536 + frac;
    }
    return static_cast<Sp>(d->negative ? -magnitude : magnitude);
}

std::optional<Fraction> parse_fraction(std::string_view text) {
    const auto d = scan_decimal(trim(text));
    if (!d || !d->rest.empty()) return std::nullopt;
    if (d->whole >= 16384) return std::nullopt;
    const std::int64_t raw = d->whole * 65536 + d->frac;
    return Fraction::from_raw(static_cast<std::int32_t>(d->negative ? -raw : raw));
}

bool is_bare_number(std::string_view text) { return parse_fraction(text).has_value(); }

Sp pt(std::int32_t points) { return points * kSpPerPt; }

std::string format_length(Sp v) {
    std::string out;
    print_scaled(out, v);
    out += "pt";
    return out;
}

std::string format_fraction(Fraction f) {
    std::string out;
    print_scaled(out, f.raw);
    return out;
}

std::string format_pt3(Sp v) {
    const bool negative = v < 0;
    const std::int64_t mag = negative ? -std::int64_t{v} : std::int64_t{v};
    const std::int64_t thousandths = (mag * 1000 + 32768) / 65536;
    std::string out;
    if (negative && thousandths != 0) out += '-';
    out += std::to_string(thousandths / 1000);
    out += '.';
    const auto frac = std::to_string(thousandths % 1000);
    out.append(3 - frac.size(), '0');
    out += frac;
    return out;
}

}  // namespace cdc::units
