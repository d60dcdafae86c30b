#pragma once

// TeX-compatible scanning of dimensions ("15mm", "-.8pt", "3sp") and decimal
// factors (".5", "1"). Conversion follows TeX's scan_dimen: the decimal part is
// rounded to the nearest 2^-16 and unit ratios are applied with truncation, so
// 1mm = 186467sp and 1cm = 1864679sp.

#include <optional>
#include <string>
#include <string_view>

#include "cdc/fixedmath.hpp"

namespace cdc::units {

std::optional<Sp> parse_length(std::string_view text);
std::optional<Fraction> parse_fraction(std::string_view text);

/// True if the text is a bare decimal number (no unit).
bool is_bare_number(std::string_view text);

Sp pt(std::int32_t points);

/// "12.5pt" style rendering with up to five decimals, shortest exact form.
std::string format_length(Sp v);
std::string format_fraction(Fraction f);

/// Fixed three-decimal point value (e.g. "12.500"), rounded half away from zero.
std::string format_pt3(Sp v);

}  // namespace cdc::units
