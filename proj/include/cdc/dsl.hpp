#pragma once

// Diagram source language.
//
//   file   := header? row ('\\' row)*
//   header := '\' ('Diagram'|'Diag'|'Dg'|'Long'|'Graph') ('[' option (',' option)* ']')?
//   row    := cell ('&' cell)*
//   cell   := vertex | arrow | empty
//   arrow  := '\' dir CellName (label | target | slide | modifier)*
//   dir    := a | r | rd | d | ld | l | lu | u | ru | b
//
// `%` starts a comment that runs to the end of the line.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdc/diagnostics.hpp"
#include "cdc/fixedmath.hpp"
#include "cdc/styles.hpp"

namespace cdc {

enum class DiagramKind { Diagram, Diag, Dg, Long, Graph };

std::string_view kind_name(DiagramKind k);

/// Label codes in the order the engine numbers them.
enum class LabelCode { Lt = 0, Gt = 1, Under = 2, Caret = 3 };

/// Along-arrow fraction and offset override, written `:{t;x,y}`.
struct Slide {
    std::optional<Fraction> point;
    std::optional<Sp> offx;
    std::optional<Sp> offy;

    friend bool operator==(const Slide&, const Slide&) = default;
};

struct Label {
    LabelCode code = LabelCode::Caret;
    std::string text;
    std::optional<Slide> slide;

    friend bool operator==(const Label&, const Label&) = default;
};

enum class JoinMode { None, Tail, Head, Both };

struct PointMark {
    std::string name;
    std::optional<Fraction> fraction;

    friend bool operator==(const PointMark&, const PointMark&) = default;
};

/// `\gr{g}`, `\white`, `\black` give a value; `\gray` defers to graygray.
struct GraySpec {
    std::optional<Fraction> value;
    bool use_graygray = false;

    friend bool operator==(const GraySpec&, const GraySpec&) = default;
};

struct ArrowMods {
    std::optional<Sp> hx, hy, tx, ty, fx, fy;
    std::optional<Sp> lw;
    std::optional<Sp> rw;
    bool nw = false;
    bool br = false;
    JoinMode join = JoinMode::None;
    std::vector<PointMark> points;
    std::optional<GraySpec> gray;
    /// Recognised but unimplemented modifiers, kept verbatim.
    std::vector<std::string> ignored;

    friend bool operator==(const ArrowMods&, const ArrowMods&) = default;
};

/// Grid offset (x columns right, y rows up) or a named point.
struct Target {
    struct Offset {
        Fraction x;
        Fraction y;
        friend bool operator==(const Offset&, const Offset&) = default;
    };
    std::variant<Offset, std::string> where;

    friend bool operator==(const Target&, const Target&) = default;
};

inline constexpr int kDirA = 0;
inline constexpr int kDirB = 10;

struct ArrowCell {
    int dircode = 1;
    std::string style;
    std::vector<Label> labels;
    std::optional<Target> target;
    std::optional<Slide> slide;
    ArrowMods mods;

    friend bool operator==(const ArrowCell&, const ArrowCell&) = default;
};

struct RuleCell {
    int dircode = 1;
    std::optional<Target> target;
    ArrowMods mods;

    friend bool operator==(const RuleCell&, const RuleCell&) = default;
};

enum class MoveKind { Dx, Mx, Ax, Dl, Dr, Ml, Mr, Al, Ar, Dy, My };

std::string_view move_name(MoveKind k);

struct Movement {
    MoveKind kind = MoveKind::Dx;
    /// Length, unitless fraction of the next gap, or nothing (edge moves).
    std::variant<std::monostate, Sp, Fraction> value;

    friend bool operator==(const Movement&, const Movement&) = default;
};

/// Width span over `columns` further columns. Modes 0 (plain, columndist) and
/// 1 (braced, bracewidth) are laid out; 2 and 3 parse but are rejected later.
struct Span {
    int columns = 1;
    int mode = 0;
    bool loose = false;

    friend bool operator==(const Span&, const Span&) = default;
};

struct VertexCell {
    std::string text;
    bool stop = false;
    bool nodot = false;
    bool grav = false;
    bool base = false;
    std::vector<Movement> movements;
    std::optional<Span> span;
    std::optional<GraySpec> gray;

    friend bool operator==(const VertexCell&, const VertexCell&) = default;
};

struct EmptyCell {
    friend bool operator==(const EmptyCell&, const EmptyCell&) = default;
};

using Cell = std::variant<EmptyCell, VertexCell, ArrowCell, RuleCell>;

struct CellNode {
    Cell cell;
    SourcePos pos;

    /// Positions are not part of structural equality.
    friend bool operator==(const CellNode& a, const CellNode& b) { return a.cell == b.cell; }
};

struct OptionAssign {
    std::string name;
    std::string cell;  // empty: global
    std::string value;
    SetMode mode = SetMode::Absolute;

    friend bool operator==(const OptionAssign&, const OptionAssign&) = default;
};

struct DiagramOptions {
    std::vector<std::string> flags;  // sorted, unique
    std::vector<OptionAssign> assigns;  // source order

    bool has(std::string_view flag) const;
    friend bool operator==(const DiagramOptions&, const DiagramOptions&) = default;
};

struct GraphExtent {
    std::optional<int> width;
    std::optional<int> height;
    std::optional<std::pair<int, int>> xrange;
    std::optional<std::pair<int, int>> yrange;

    friend bool operator==(const GraphExtent&, const GraphExtent&) = default;
};

struct DiagramAst {
    DiagramKind kind = DiagramKind::Diagram;
    DiagramOptions options;
    GraphExtent graph;
    std::vector<std::vector<CellNode>> rows;

    std::size_t column_count() const;
    friend bool operator==(const DiagramAst&, const DiagramAst&) = default;
};

struct ParseOutput {
    DiagramAst ast;
    std::vector<Diagnostic> warnings;
};

inline constexpr std::string_view kFlagNames[] = {"dotted",  "fixed",          "flexible",
                                                  "gravitateleft", "gravitateright", "gridlines",
                                                  "joined",  "overgrid",       "rotatedlabels"};

/// Throws CompileError carrying one located diagnostic on malformed input.
ParseOutput parse(std::string_view source, const StyleRegistry& registry);

/// Deterministic text form; parse(canonicalize(a)) == a structurally.
std::string canonicalize(const DiagramAst& ast);

std::string_view dir_prefix(int dircode);

}  // namespace cdc
