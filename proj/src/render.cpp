#include "cdc/render.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>

#include "cdc/units.hpp"

namespace cdc::render {

namespace {

constexpr Sp kPt = kSpPerPt;
constexpr Sp kStroke = kPt * 2 / 5;        // .4pt hairline
constexpr Sp kDoubleOffset = kPt * 4 / 5;  // .8pt either side
constexpr Sp kGlyphRadius = 7 * kPt;
constexpr Sp kDotRadius = kPt * 6 / 5;
constexpr Sp kEqualsRadius = 5 * kPt;

constexpr std::array<std::string_view, 8> kKindNames{"shaft-span", "head-glyph", "tail-glyph", "label",
                                                     "vertex",     "dot",        "rule",       "gridline"};

Sp checked(std::int64_t v) {
    if (v > (1LL << 30) - 1 || v < -((1LL << 30) - 1)) {
        throw MathError(MathError::Kind::Overflow, "document coordinate overflow");
    }
    return static_cast<Sp>(v);
}

Bounds around(Point p, std::int64_t r) {
    return {checked(p.x - r), checked(p.y - r), checked(p.x + r), checked(p.y + r)};
}

Bounds segment(Point a, Point b, std::int64_t r) {
    return {checked(std::min(a.x, b.x) - r), checked(std::min(a.y, b.y) - r), checked(std::max(a.x, b.x) + r),
            checked(std::max(a.y, b.y) + r)};
}

void grow(Bounds& acc, const Bounds& b, bool& any) {
    if (!any) {
        acc = b;
        any = true;
        return;
    }
    acc.x0 = std::min(acc.x0, b.x0);
    acc.y0 = std::min(acc.y0, b.y0);
    acc.x1 = std::max(acc.x1, b.x1);
    acc.y1 = std::max(acc.y1, b.y1);
}

bool uses_b_as_point(ItemKind k) {
    return k == ItemKind::ShaftSpan || k == ItemKind::Rule || k == ItemKind::Gridline;
}

/// Glyphs that point away from the shaft at the tail end.
bool tail_faces_backward(Glyph g) {
    return g == Glyph::Arrowhead || g == Glyph::DoubleArrowhead || g == Glyph::EqualsHead ||
           g == Glyph::HarpoonUp || g == Glyph::HarpoonDown;
}

std::string_view glyph_path(Glyph g) {
    switch (g) {
        case Glyph::Arrowhead: return "M-4 -2.2Q-1.6 -0.5 0 0Q-1.6 0.5 -4 2.2";
        case Glyph::DoubleArrowhead: return "M-4 -2.2Q-1.6 -0.5 0 0Q-1.6 0.5 -4 2.2M-6.5 -2.2Q-4.1 -0.5 -2.5 0Q-4.1 0.5 -6.5 2.2";
        case Glyph::Hook: return "M0 0C-2.6 0 -2.6 -4 0 -4";
        case Glyph::Monotail: return "M0 -2.2Q2.4 -0.5 4 0Q2.4 0.5 0 2.2";
        case Glyph::Bar: return "M0 -3L0 3";
        case Glyph::EqualsHead: return "M-5 -4Q-1.8 -1.2 0 0Q-1.8 1.2 -5 4";
        case Glyph::HarpoonUp: return "M-4 -2.2Q-1.6 -0.5 0 0";
        case Glyph::HarpoonDown: return "M-4 2.2Q-1.6 0.5 0 0";
        case Glyph::None: return "";
    }
    return "";
}

std::string rgb(std::int32_t gray) {
    const std::string c = std::to_string(gray_channel(gray));
    return "rgb(" + c + "," + c + "," + c + ")";
}

std::string pt(Sp v) { return units::format_pt3(v); }

/// Signed ten-thousandths as a decimal string.
std::string fixed4(std::int64_t v) {
    std::string out = v < 0 ? "-" : "";
    const std::int64_t m = std::llabs(v);
    std::string frac = std::to_string(m % 10000);
    out += std::to_string(m / 10000) + "." + std::string(4 - frac.size(), '0') + frac;
    return out;
}

std::int64_t round_div(std::int64_t num, std::int64_t den) {
    const std::int64_t half = den / 2;
    return num >= 0 ? (num + half) / den : -((-num + half) / den);
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string_view text_anchor(int code) {
    if (code == 0) return "start";
    if (code == 2) return "end";
    return "middle";
}

std::string text_element(const PlacedItem& it) {
    const std::int64_t baseline = std::int64_t{it.a.y} + (std::int64_t{it.box.h} - it.box.d) / 2;
    std::string out = "<text x=\"" + pt(it.a.x) + "\" y=\"" + pt(checked(baseline)) + "\" text-anchor=\"" +
                      std::string(text_anchor(it.anchor)) + "\" font-size=\"" + pt(it.em) + "\" fill=\"" +
                      rgb(it.gray) + "\"";
    if (it.rotation != 0) {
        out += " transform=\"rotate(" + std::to_string(-it.rotation) + " " + pt(it.a.x) + " " + pt(it.a.y) + ")\"";
    }
    return out + ">" + escape(it.text) + "</text>\n";
}

std::string line_path(Point a, Point b, std::int32_t gray, Sp width, std::string_view extra = "") {
    std::string out = "<path d=\"M" + pt(a.x) + " " + pt(a.y) + "L" + pt(b.x) + " " + pt(b.y) + "\" stroke=\"" +
                      rgb(gray) + "\" stroke-width=\"" + pt(width) + "\"";
    if (!extra.empty()) out += " " + std::string(extra);
    return out + "/>\n";
}

std::string svg_item(const PlacedItem& it) {
    switch (it.kind) {
        case ItemKind::ShaftSpan: {
            if (it.equals) {
                const Point mid{static_cast<Sp>((std::int64_t{it.a.x} + it.b.x) / 2),
                                static_cast<Sp>((std::int64_t{it.a.y} + it.b.y) / 2)};
                return "<text x=\"" + pt(mid.x) + "\" y=\"" + pt(mid.y) +
                       "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"10.000\" fill=\"" +
                       rgb(it.gray) + "\">=</text>\n";
            }
            if (it.shaft == Shaft::Double) {
                const std::int64_t dx = std::int64_t{it.b.x} - it.a.x;
                const std::int64_t dy = std::int64_t{it.b.y} - it.a.y;
                const auto len = static_cast<std::int64_t>(
                    fixedmath::isqrt64(static_cast<std::uint64_t>(dx * dx) + static_cast<std::uint64_t>(dy * dy)));
                if (len == 0) return "";
                const Sp ox = fixedmath::mul_div_exact(-dy, kDoubleOffset, len);
                const Sp oy = fixedmath::mul_div_exact(dx, kDoubleOffset, len);
                return line_path({it.a.x + ox, it.a.y + oy}, {it.b.x + ox, it.b.y + oy}, it.gray, kStroke) +
                       line_path({it.a.x - ox, it.a.y - oy}, {it.b.x - ox, it.b.y - oy}, it.gray, kStroke);
            }
            if (it.shaft == Shaft::Dots) {
                return line_path(it.a, it.b, it.gray, kStroke, "stroke-dasharray=\"0.4 1.6\"");
            }
            return line_path(it.a, it.b, it.gray, kStroke);
        }
        case ItemKind::HeadGlyph:
        case ItemKind::TailGlyph: {
            const std::int64_t dx = it.b.x;
            const std::int64_t dy = it.b.y;
            const auto len = static_cast<std::int64_t>(
                fixedmath::isqrt64(static_cast<std::uint64_t>(dx * dx) + static_cast<std::uint64_t>(dy * dy)));
            if (len == 0) return "";
            const std::int64_t ux = round_div(dx * 10000, len);
            const std::int64_t uy = round_div(dy * 10000, len);
            return "<path d=\"" + std::string(glyph_path(it.glyph)) + "\" transform=\"matrix(" + fixed4(ux) + " " +
                   fixed4(uy) + " " + fixed4(-uy) + " " + fixed4(ux) + " " + pt(it.a.x) + " " + pt(it.a.y) +
                   ")\" stroke=\"" + rgb(it.gray) + "\" stroke-width=\"" + pt(kStroke) + "\"/>\n";
        }
        case ItemKind::Label:
        case ItemKind::Vertex: return text_element(it);
        case ItemKind::Dot:
            return "<circle cx=\"" + pt(it.a.x) + "\" cy=\"" + pt(it.a.y) + "\" r=\"" + pt(kDotRadius) +
                   "\" fill=\"" + rgb(it.gray) + "\"/>\n";
        case ItemKind::Rule: return line_path(it.a, it.b, it.gray, it.width, "stroke-linecap=\"butt\"");
        case ItemKind::Gridline: return line_path(it.a, it.b, it.gray, kStroke);
    }
    return "";
}

const char* shaft_json(Shaft s) { return shaft_name(s).data(); }

}  // namespace

}  // namespace cdc::render

namespace cdc {

std::string_view item_kind_name(ItemKind k) { return render::kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ItemKind> item_kind_from_name(std::string_view name) {
    using render::kKindNames;
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<ItemKind>(i);
    }
    return std::nullopt;
}

}  // namespace cdc

namespace cdc::render {

int gray_channel(std::int32_t gray) { return static_cast<int>((255LL * gray + 32768) / 65536); }

Bounds item_extent(const PlacedItem& it) {
    switch (it.kind) {
        case ItemKind::ShaftSpan:
            if (it.equals) {
                return around({static_cast<Sp>((std::int64_t{it.a.x} + it.b.x) / 2),
                               static_cast<Sp>((std::int64_t{it.a.y} + it.b.y) / 2)},
                              kEqualsRadius);
            }
            return segment(it.a, it.b, kDoubleOffset + kStroke);
        case ItemKind::HeadGlyph:
        case ItemKind::TailGlyph: return around(it.a, kGlyphRadius);
        case ItemKind::Label:
        case ItemKind::Vertex: {
            const std::int64_t half_v = (std::int64_t{it.box.h} + it.box.d + 1) / 2;
            if (it.rotation != 0) return around(it.a, it.box.w + half_v);
            std::int64_t left = it.a.x;
            std::int64_t right = it.a.x;
            if (it.anchor == 0) right += it.box.w;
            else if (it.anchor == 2) left -= it.box.w;
            else {
                left -= (it.box.w + 1) / 2;
                right += (it.box.w + 1) / 2;
            }
            return {checked(left), checked(it.a.y - half_v), checked(right), checked(it.a.y + half_v)};
        }
        case ItemKind::Dot: return around(it.a, kDotRadius);
        case ItemKind::Rule: return segment(it.a, it.b, (std::int64_t{std::abs(it.width)} + 1) / 2);
        case ItemKind::Gridline: return segment(it.a, it.b, kStroke);
    }
    return around(it.a, 0);
}

std::vector<PlacedItem> grid_overlay(const Grid& grid, const StyleRegistry& registry) {
    std::vector<PlacedItem> out;
    const std::int32_t gray = registry.fraction(Param::GridGray).raw;
    const Sp top = grid.Y.front();
    const Sp bottom = grid.Y.back();
    const Sp left = grid.X.front();
    const Sp right = grid.X.back();
    auto line = [&](Point a, Point b) {
        PlacedItem it;
        it.kind = ItemKind::Gridline;
        it.a = a;
        it.b = b;
        it.gray = std::clamp(gray, 0, Fraction::one().raw);
        it.style = "Line";
        out.push_back(it);
    };
    for (Sp x : grid.X) line({x, top}, {x, bottom});
    for (Sp y : grid.Y) line({left, y}, {right, y});
    return out;
}

std::vector<PlacedItem> dotted_overlay(const DiagramAst& ast, const Grid& grid, const BoxTable& boxes) {
    std::vector<PlacedItem> out;
    for (int r = 0; r <= grid.last_row(); ++r) {
        for (int c = 0; c <= grid.last_col(); ++c) {
            if (boxes.at(r, c) != nullptr) continue;
            if (static_cast<std::size_t>(r) < ast.rows.size() && static_cast<std::size_t>(c) < ast.rows[r].size()) {
                const auto* v = std::get_if<VertexCell>(&ast.rows[r][c].cell);
                if (v != nullptr && v->nodot) continue;
            }
            PlacedItem it;
            it.kind = ItemKind::Dot;
            it.a = {grid.X[static_cast<std::size_t>(c)], grid.Y[static_cast<std::size_t>(r)]};
            out.push_back(it);
        }
    }
    return out;
}

std::vector<PlacedItem> build_items(const DiagramAst& ast, const Grid& grid, const BoxTable& boxes,
                                    const std::vector<ArrowGeometry>& arrows, const StyleRegistry& registry,
                                    const MetricsModel& metrics, const RenderFlags& flags) {
    std::vector<PlacedItem> out;
    const bool overlay = flags.gridlines || flags.overgrid;
    if (overlay && !flags.overgrid) {
        auto lines = grid_overlay(grid, registry);
        out.insert(out.end(), lines.begin(), lines.end());
    }

    for (const VertexBox& b : boxes.all()) {
        const auto& v = std::get<VertexCell>(ast.rows[static_cast<std::size_t>(b.row)][static_cast<std::size_t>(b.col)].cell);
        if (v.text.empty()) continue;
        PlacedItem it;
        it.kind = ItemKind::Vertex;
        // Text is centered on the box, whose vertical middle sits (h - d)/2 above the axis.
        it.a = {b.x, checked(std::int64_t{b.y} - (std::int64_t{b.h} - b.d) / 2)};
        it.text = v.text;
        it.box = {b.w, b.h, b.d};
        it.em = metrics.em(TextStyle::Vertex);
        if (v.gray && v.gray->value && v.gray->value->raw >= 0 && v.gray->value->raw <= Fraction::one().raw) {
            it.gray = v.gray->value->raw;
        } else if (v.gray && v.gray->use_graygray) {
            it.gray = registry.fraction(Param::GrayGray).raw;
        }
        out.push_back(it);
    }

    for (const ArrowGeometry& g : arrows) {
        if (g.suppressed) continue;
        const Sp dx = checked(std::int64_t{g.end.x} - g.start.x);
        const Sp dy = checked(std::int64_t{g.end.y} - g.start.y);
        auto along = [&](Sp s) {
            return Point{checked(std::int64_t{g.start.x} + fixedmath::mul_div_exact(dx, s, g.length)),
                         checked(std::int64_t{g.start.y} + fixedmath::mul_div_exact(dy, s, g.length))};
        };
        if (g.is_rule) {
            PlacedItem it;
            it.kind = ItemKind::Rule;
            it.a = g.trimmed_start;
            it.b = g.trimmed_end;
            it.gray = g.gray;
            it.width = g.rule_width;
            it.style = g.style;
            out.push_back(it);
            continue;
        }
        const CellStyle* style = registry.find_cell(g.style);
        const FillSpec fill = style ? style->fill : FillSpec{};
        if (fill.centered_equals) {
            PlacedItem it;
            it.kind = ItemKind::ShaftSpan;
            it.a = g.trimmed_start;
            it.b = g.trimmed_end;
            it.gray = g.gray;
            it.style = g.style;
            it.equals = true;
            out.push_back(it);
        } else if (fill.shaft != Shaft::None) {
            for (const ShaftInterval& s : g.spans) {
                PlacedItem it;
                it.kind = ItemKind::ShaftSpan;
                it.a = along(s.from);
                it.b = along(s.to);
                it.gray = g.gray;
                it.style = g.style;
                it.shaft = fill.shaft;
                out.push_back(it);
            }
        }
        if (fill.tail != Glyph::None) {
            PlacedItem it;
            it.kind = ItemKind::TailGlyph;
            it.a = g.trimmed_start;
            it.b = tail_faces_backward(fill.tail) ? Point{-dx, -dy} : Point{dx, dy};
            it.gray = g.gray;
            it.style = g.style;
            it.glyph = fill.tail;
            out.push_back(it);
        }
        if (fill.head != Glyph::None) {
            PlacedItem it;
            it.kind = ItemKind::HeadGlyph;
            it.a = g.trimmed_end;
            it.b = {dx, dy};
            it.gray = g.gray;
            it.style = g.style;
            it.glyph = fill.head;
            out.push_back(it);
        }
        for (const LabelAnchor& l : g.labels) {
            PlacedItem it;
            it.kind = ItemKind::Label;
            it.a = l.pos;
            it.text = l.text;
            it.box = l.box;
            it.anchor = l.anchor;
            it.rotation = l.rotation;
            it.gray = g.gray;
            it.style = g.style;
            it.em = metrics.em(TextStyle::Label);
            out.push_back(it);
        }
    }

    if (flags.dotted) {
        auto dots = dotted_overlay(ast, grid, boxes);
        out.insert(out.end(), dots.begin(), dots.end());
    }
    if (flags.overgrid) {
        auto lines = grid_overlay(grid, registry);
        out.insert(out.end(), lines.begin(), lines.end());
    }
    return out;
}

void place_document(LayoutResult& layout, std::vector<PlacedItem> items, Sp pad) {
    Bounds b;
    bool any = false;
    for (Sp x : layout.grid.X) {
        for (Sp y : layout.grid.Y) grow(b, around({x, y}, 0), any);
    }
    for (const VertexBox& v : layout.boxes.all()) {
        grow(b, {checked(std::int64_t{v.x} - v.w / 2), checked(std::int64_t{v.y} - v.h),
                 checked(std::int64_t{v.x} + (v.w + 1) / 2), checked(std::int64_t{v.y} + v.d)},
             any);
    }
    for (const PlacedItem& it : items) grow(b, item_extent(it), any);
    if (!any) b = {};

    layout.pad = pad;
    layout.bounds = b;
    layout.origin = {checked(std::int64_t{b.x0} - pad), checked(std::int64_t{b.y0} - pad)};
    layout.doc_width = checked(std::int64_t{b.x1} - b.x0 + 2LL * pad);
    layout.doc_height = checked(std::int64_t{b.y1} - b.y0 + 2LL * pad);
    for (PlacedItem& it : items) {
        it.a = {checked(std::int64_t{it.a.x} - layout.origin.x), checked(std::int64_t{it.a.y} - layout.origin.y)};
        if (uses_b_as_point(it.kind)) {
            it.b = {checked(std::int64_t{it.b.x} - layout.origin.x), checked(std::int64_t{it.b.y} - layout.origin.y)};
        }
    }
    layout.items = std::move(items);
}

std::string render_svg(const LayoutResult& layout) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    const std::string w = pt(layout.doc_width);
    const std::string h = pt(layout.doc_height);
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w + "pt\" height=\"" + h +
           "pt\" viewBox=\"0 0 " + w + " " + h + "\">\n";
    out += "<g fill=\"none\" stroke-linecap=\"round\" font-family=\"serif\">\n";
    for (const PlacedItem& it : layout.items) out += svg_item(it);
    out += "</g>\n</svg>\n";
    return out;
}

nlohmann::json item_to_json(const PlacedItem& it) {
    return nlohmann::json{
        {"kind", std::string(item_kind_name(it.kind))},
        {"a", nlohmann::json::array({it.a.x, it.a.y})},
        {"b", nlohmann::json::array({it.b.x, it.b.y})},
        {"gray", it.gray},
        {"rotation", it.rotation},
        {"anchor", it.anchor},
        {"text", it.text},
        {"style", it.style},
        {"shaft", shaft_json(it.shaft)},
        {"glyph", glyph_name(it.glyph)},
        {"equals", it.equals},
        {"width", it.width},
        {"box", nlohmann::json::array({it.box.w, it.box.h, it.box.d})},
        {"em", it.em},
    };
}

PlacedItem item_from_json(const nlohmann::json& j) {
    PlacedItem it;
    const auto kind = item_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown item kind");
    it.kind = *kind;
    it.a = {j.at("a").at(0).get<Sp>(), j.at("a").at(1).get<Sp>()};
    it.b = {j.at("b").at(0).get<Sp>(), j.at("b").at(1).get<Sp>()};
    it.gray = j.at("gray").get<std::int32_t>();
    if (it.gray < 0 || it.gray > Fraction::one().raw) throw std::invalid_argument("gray out of range");
    it.rotation = j.at("rotation").get<int>();
    it.anchor = j.at("anchor").get<int>();
    if (it.anchor < 0 || it.anchor > 2) throw std::invalid_argument("bad anchor");
    it.text = j.at("text").get<std::string>();
    it.style = j.at("style").get<std::string>();
    const std::string shaft = j.at("shaft").get<std::string>();
    bool shaft_ok = false;
    for (Shaft s : {Shaft::Single, Shaft::Double, Shaft::Dots, Shaft::None}) {
        if (shaft_name(s) == shaft) {
            it.shaft = s;
            shaft_ok = true;
        }
    }
    if (!shaft_ok) throw std::invalid_argument("unknown shaft");
    const auto glyph = glyph_from_name(j.at("glyph").get<std::string>());
    if (!glyph) throw std::invalid_argument("unknown glyph");
    it.glyph = *glyph;
    it.equals = j.at("equals").get<bool>();
    it.width = j.at("width").get<Sp>();
    it.box = {j.at("box").at(0).get<Sp>(), j.at("box").at(1).get<Sp>(), j.at("box").at(2).get<Sp>()};
    it.em = j.at("em").get<Sp>();
    return it;
}

nlohmann::json layout_json(const LayoutResult& layout) {
    using nlohmann::json;
    json grid{
        {"x", layout.grid.X},
        {"y", layout.grid.Y},
        {"solved_x", layout.grid.solved_x},
        {"width", layout.grid.width},
        {"height", layout.grid.height},
        {"margins",
         {{"left", layout.grid.margin_left},
          {"right", layout.grid.margin_right},
          {"top", layout.grid.margin_top},
          {"bottom", layout.grid.margin_bottom}}},
        {"gravity", layout.grid.gravity},
        {"flexible", layout.grid.flexible},
        {"passes", layout.grid.passes},
        {"baseline_row", layout.grid.baseline_row ? json(*layout.grid.baseline_row) : json(nullptr)},
    };
    json boxes = json::array();
    for (const VertexBox& b : layout.boxes.all()) {
        boxes.push_back({{"row", b.row}, {"col", b.col}, {"w", b.w}, {"h", b.h}, {"d", b.d}, {"span", b.span},
                         {"x", b.x}, {"y", b.y}});
    }
    json constraints = json::array();
    for (const Constraint& c : layout.constraints) {
        constraints.push_back({{"kind", constraint_kind_name(c.kind)},
                               {"c1", c.c1},
                               {"c2", c.c2},
                               {"required", c.required},
                               {"index", c.index}});
    }
    json arrows = json::array();
    for (const ArrowGeometry& g : layout.arrows) {
        json spans = json::array();
        for (const ShaftInterval& s : g.spans) spans.push_back({s.from, s.to});
        json labels = json::array();
        for (const LabelAnchor& l : g.labels) {
            labels.push_back({{"x", l.pos.x},
                              {"y", l.pos.y},
                              {"anchor", l.anchor},
                              {"rotation", l.rotation},
                              {"text", l.text},
                              {"code", static_cast<int>(l.code)},
                              {"box", {l.box.w, l.box.h, l.box.d}}});
        }
        arrows.push_back({
            {"row", g.row},
            {"col", g.col},
            {"dircode", g.dircode},
            {"style", g.style},
            {"rule", g.is_rule},
            {"start", {g.start.x, g.start.y}},
            {"end", {g.end.x, g.end.y}},
            {"trimmed_start", {g.trimmed_start.x, g.trimmed_start.y}},
            {"trimmed_end", {g.trimmed_end.x, g.trimmed_end.y}},
            {"length", g.length},
            {"qb", g.qb},
            {"py", g.py},
            {"us", g.us},
            {"octant", g.octant ? json(std::string(octant_name(*g.octant))) : json(nullptr)},
            {"suppressed", g.suppressed},
            {"spans", spans},
            {"labels", labels},
            {"gray", g.gray},
        });
    }
    json points = json::object();
    for (const auto& [name, p] : layout.points) points[name] = {p.x, p.y};
    json items = json::array();
    for (const PlacedItem& it : layout.items) items.push_back(item_to_json(it));
    return json{
        {"format", "cdc-layout"},
        {"version", 1},
        {"kind", kind_name(layout.kind)},
        {"document",
         {{"width", layout.doc_width},
          {"height", layout.doc_height},
          {"pad", layout.pad},
          {"bounds", {layout.bounds.x0, layout.bounds.y0, layout.bounds.x1, layout.bounds.y1}},
          {"origin", {layout.origin.x, layout.origin.y}}}},
        {"rows", layout.rows},
        {"gravity", layout.gravity},
        {"baseline_row", layout.baseline_row ? json(*layout.baseline_row) : json(nullptr)},
        {"grid", grid},
        {"boxes", boxes},
        {"constraints", constraints},
        {"arrows", arrows},
        {"points", points},
        {"items", items},
        {"parameters", layout.parameters},
    };
}

std::string render_json(const LayoutResult& layout) { return layout_json(layout).dump(2) + "\n"; }

}  // namespace cdc::render
