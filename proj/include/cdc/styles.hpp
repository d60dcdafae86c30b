#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/fixedmath.hpp"

namespace cdc {

class StyleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Fills

enum class Glyph {
    None,
    Arrowhead,
    DoubleArrowhead,
    Hook,
    Monotail,
    Bar,
    EqualsHead,
    HarpoonUp,
    HarpoonDown,
};

enum class Shaft { Single, Double, Dots, None };

std::string_view glyph_name(Glyph g);
std::optional<Glyph> glyph_from_name(std::string_view name);
std::string_view shaft_name(Shaft s);

/// Tail glyph, repeated shaft, head glyph. `centered_equals` marks the Eq fill,
/// which draws one "=" at the midpoint instead of an extensible shaft.
struct FillSpec {
    Glyph tail = Glyph::None;
    Shaft shaft = Shaft::Single;
    Glyph head = Glyph::Arrowhead;
    bool centered_equals = false;

    friend bool operator==(const FillSpec&, const FillSpec&) = default;
};

enum class CellKind { Arrow, Rule, Fillcell, Boxcell };

struct CellStyle {
    std::string name;
    CellKind kind = CellKind::Arrow;
    FillSpec fill;
    std::size_t registration_index = 0;
};

// ---------------------------------------------------------------------------
// Parameters

enum class Param {
    Grid,
    XGrid,
    YGrid,
    Range,
    DiagramPad,
    FigurePad,
    GraphPad,
    VPad,
    HPad,
    GridGray,
    FrameGray,
    ShadeGray,
    GrayGray,
    FramePad,
    FrameRuleWidth,
    FrameRuleWidthOuter,
    RuleWidth,
    CellLength,
    CellWidth,
    ColumnDist,
    BraceWidth,
    MinimumCellLength,
    LabelPoint,
    PtPoint,
    LabelWidthPad,
    LabelPad,
    BreakPad,
    CellPush,
    PtPush,
    AtPush,
    JoinPush,
};

inline constexpr std::size_t kParamCount = static_cast<std::size_t>(Param::JoinPush) + 1;

enum class ParamType { Length, Fraction };

struct ParamInfo {
    Param param;
    std::string_view name;
    ParamType type;
    std::string_view default_text;  // empty: inherits (xgrid, ygrid)
    bool per_cell;
};

const std::array<ParamInfo, kParamCount>& param_table();
const ParamInfo& param_info(Param p);
std::optional<Param> param_from_name(std::string_view name);

enum class SetMode { Absolute, Relative };

/// Cell catalog plus the global and per-cell parameter tables.
///
/// Length parameters compose additively: effective(p, cell) = global(p) +
/// percell(p, cell), with an unset per-cell entry counting as 0. The two
/// fraction parameters with per-cell rows (labelpoint, ptpoint) use the
/// per-cell value as an override when it is set.
class StyleRegistry {
public:
    /// Empty registry with every global default installed and no cells.
    StyleRegistry();

    /// Built-in cells (To, One, Bij, ..., Eq, Rule, Fillcell, Boxcell) with
    /// their per-cell pad rows.
    static StyleRegistry builtin();

    void register_cell(std::string name, FillSpec fill, CellKind kind = CellKind::Arrow);
    const CellStyle* find_cell(std::string_view name) const;
    const std::vector<CellStyle>& cells() const { return cells_; }

    /// scope empty means global; otherwise a registered cell name. A value of
    /// "" or "{}" clears the entry (per-cell rows, or xgrid/ygrid inheritance).
    void set_param(std::string_view name, std::string_view scope, std::string_view value, SetMode mode);

    Sp length(Param p) const;
    Fraction fraction(Param p) const;
    Sp effective_length(Param p, std::string_view cell) const;
    Fraction effective_fraction(Param p, std::string_view cell) const;
    std::optional<std::int32_t> per_cell(Param p, std::string_view cell) const;

    /// Deterministic textual dump of every parameter and cell; feeds digests.
    std::string fingerprint() const;

private:
    std::int32_t global_raw(Param p) const;

    std::array<std::optional<std::int32_t>, kParamCount> globals_{};
    std::map<std::string, std::array<std::optional<std::int32_t>, kParamCount>, std::less<>> per_cell_;
    std::vector<CellStyle> cells_;
};

// ---------------------------------------------------------------------------
// Text metrics

enum class TextStyle { Vertex, Label };

struct TextBox {
    Sp w = 0;
    Sp h = 0;
    Sp d = 0;

    friend bool operator==(const TextBox&, const TextBox&) = default;
};

class MetricsModel {
public:
    virtual ~MetricsModel() = default;
    virtual TextBox measure(std::string_view text, TextStyle style) const = 0;
    virtual Sp em(TextStyle style) const = 0;
    virtual std::string fingerprint() const = 0;
};

/// Default model: width = codepoints * em/2, height = .7em, depth = .2em.
class EmMetrics final : public MetricsModel {
public:
    EmMetrics() = default;
    EmMetrics(Sp vertex_em, Sp label_em) : vertex_em_(vertex_em), label_em_(label_em) {}

    /// Lines of the form `em <vertexstyle|labelstyle> <pt-value>`; `#` comments.
    static EmMetrics parse(std::string_view text);
    static EmMetrics load(const std::string& path);

    TextBox measure(std::string_view text, TextStyle style) const override;
    Sp em(TextStyle style) const override { return style == TextStyle::Vertex ? vertex_em_ : label_em_; }
    std::string fingerprint() const override;

private:
    Sp vertex_em_ = 10 * kSpPerPt;
    Sp label_em_ = 7 * kSpPerPt;
};

std::size_t codepoint_count(std::string_view utf8);

}  // namespace cdc
