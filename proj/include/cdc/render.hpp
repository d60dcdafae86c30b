#pragma once

// Placed items in document space and the SVG / JSON back ends.
//
// Document space is y-down with the origin at the top-left corner of the
// diagram bounds expanded by the pad (Diagrampad, or Graphpad for \Graph).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdc/layout.hpp"
#include "cdc/router.hpp"

namespace cdc {

enum class ItemKind { ShaftSpan, HeadGlyph, TailGlyph, Label, Vertex, Dot, Rule, Gridline };

std::string_view item_kind_name(ItemKind k);
std::optional<ItemKind> item_kind_from_name(std::string_view name);

/// One drawable. `a` is the primary point (span start, glyph tip, text anchor,
/// dot center); `b` is the span end, or the facing direction for glyphs.
struct PlacedItem {
    ItemKind kind = ItemKind::ShaftSpan;
    Point a;
    Point b;
    std::int32_t gray = 0;  // 16.16 in [0, 1]
    int rotation = 0;
    int anchor = 1;
    std::string text;
    std::string style;
    Shaft shaft = Shaft::Single;
    Glyph glyph = Glyph::None;
    bool equals = false;  // centered "=" instead of a stroked shaft
    Sp width = 0;         // rule stroke width
    TextBox box;
    Sp em = 0;

    friend bool operator==(const PlacedItem&, const PlacedItem&) = default;
};

struct Bounds {
    Sp x0 = 0;
    Sp y0 = 0;
    Sp x1 = 0;
    Sp y1 = 0;
};

struct LayoutResult {
    DiagramKind kind = DiagramKind::Diagram;
    Grid grid;
    BoxTable boxes;
    std::vector<Constraint> constraints;
    std::vector<ArrowGeometry> arrows;
    PointTable points;
    std::vector<PlacedItem> items;  // document space
    Bounds bounds;                  // content extent in layout space
    Point origin;                   // layout point mapped to (0, 0)
    Sp pad = 0;
    Sp doc_width = 0;
    Sp doc_height = 0;
    int rows = 0;
    std::optional<int> baseline_row;
    int gravity = 0;
    /// Effective global parameters (sp or 16.16), for the dump.
    std::map<std::string, std::int32_t> parameters;
};

struct RenderFlags {
    bool gridlines = false;
    bool overgrid = false;
    bool dotted = false;
};

namespace render {

/// Extent an item may paint, stroke widths and glyph outlines included.
Bounds item_extent(const PlacedItem& item);

/// Overlays in layout space.
std::vector<PlacedItem> grid_overlay(const Grid& grid, const StyleRegistry& registry);
std::vector<PlacedItem> dotted_overlay(const DiagramAst& ast, const Grid& grid, const BoxTable& boxes);

/// Items in layout space, in drawing order.
std::vector<PlacedItem> build_items(const DiagramAst& ast, const Grid& grid, const BoxTable& boxes,
                                    const std::vector<ArrowGeometry>& arrows, const StyleRegistry& registry,
                                    const MetricsModel& metrics, const RenderFlags& flags);

/// Computes bounds, translates items into document space and fills the
/// document fields of `layout`.
void place_document(LayoutResult& layout, std::vector<PlacedItem> items, Sp pad);

/// round(255 * g) for a 16.16 gray level.
int gray_channel(std::int32_t gray);

std::string render_svg(const LayoutResult& layout);

nlohmann::json item_to_json(const PlacedItem& item);
PlacedItem item_from_json(const nlohmann::json& j);

nlohmann::json layout_json(const LayoutResult& layout);
std::string render_json(const LayoutResult& layout);

}  // namespace render
}  // namespace cdc
