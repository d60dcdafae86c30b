#include "cdc/styles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cdc/units.hpp"

namespace cdc {

std::string_view glyph_name(Glyph g) {
    switch (g) {
        case Glyph::None: return "none";
        case Glyph::Arrowhead: return "arrowhead";
        case Glyph::DoubleArrowhead: return "double-arrowhead";
        case Glyph::Hook: return "hook";
        case Glyph::Monotail: return "monotail";
        case Glyph::Bar: return "bar";
        case Glyph::EqualsHead: return "equals-head";
        case Glyph::HarpoonUp: return "harpoon-up";
        case Glyph::HarpoonDown: return "harpoon-down";
    }
    return "none";
}

std::optional<Glyph> glyph_from_name(std::string_view name) {
    for (Glyph g : {Glyph::None, Glyph::Arrowhead, Glyph::DoubleArrowhead, Glyph::Hook, Glyph::Monotail,
                    Glyph::Bar, Glyph::EqualsHead, Glyph::HarpoonUp, Glyph::HarpoonDown}) {
        if (glyph_name(g) == name) return g;
    }
    return std::nullopt;
}

std::string_view shaft_name(Shaft s) {
    switch (s) {
        case Shaft::Single: return "single";
        case Shaft::Double: return "double";
        case Shaft::Dots: return "dots";
        case Shaft::None: return "none";
    }
    return "none";
}

namespace {

using PT = ParamType;

constexpr std::array<ParamInfo, kParamCount> kParams{{
    {Param::Grid, "grid", PT::Length, "1cm", false},
    {Param::XGrid, "xgrid", PT::Length, "", false},
    {Param::YGrid, "ygrid", PT::Length, "", false},
    {Param::Range, "range", PT::Fraction, "1", false},
    {Param::DiagramPad, "Diagrampad", PT::Length, "5pt", false},
    {Param::FigurePad, "Figurepad", PT::Length, "0pt", false},
    {Param::GraphPad, "Graphpad", PT::Length, "0pt", false},
    {Param::VPad, "vpad", PT::Length, "0pt", false},
    {Param::HPad, "hpad", PT::Length, "0pt", false},
    {Param::GridGray, "gridgray", PT::Fraction, ".5", false},
    {Param::FrameGray, "framegray", PT::Fraction, "0", false},
    {Param::ShadeGray, "shadegray", PT::Fraction, "0", false},
    {Param::GrayGray, "graygray", PT::Fraction, ".5", false},
    {Param::FramePad, "framepad", PT::Length, "5pt", false},
    {Param::FrameRuleWidth, "framerulewidth", PT::Length, ".4pt", false},
    {Param::FrameRuleWidthOuter, "Framerulewidth", PT::Length, ".4pt", false},
    {Param::RuleWidth, "Rulewidth", PT::Length, "5pt", false},
    {Param::CellLength, "celllength", PT::Length, "1cm", false},
    {Param::CellWidth, "cellwidth", PT::Length, "1cm", false},
    {Param::ColumnDist, "columndist", PT::Length, "15mm", false},
    {Param::BraceWidth, "bracewidth", PT::Length, "1cm", false},
    {Param::MinimumCellLength, "MinimumCellLength", PT::Length, "0pt", false},
    {Param::LabelPoint, "labelpoint", PT::Fraction, ".5", true},
    {Param::PtPoint, "ptpoint", PT::Fraction, ".5", true},
    {Param::LabelWidthPad, "labelwidthpad", PT::Length, "5pt", true},
    {Param::LabelPad, "labelpad", PT::Length, "3pt", true},
    {Param::BreakPad, "breakpad", PT::Length, "2.5pt", true},
    {Param::CellPush, "cellpush", PT::Length, "2pt", true},
    {Param::PtPush, "ptpush", PT::Length, "0pt", true},
    {Param::AtPush, "atpush", PT::Length, "3pt", true},
    {Param::JoinPush, "joinpush", PT::Length, "-1pt", true},
}};

std::size_t index_of(Param p) { return static_cast<std::size_t>(p); }

std::optional<std::int32_t> parse_value(const ParamInfo& info, std::string_view text) {
    if (info.type == ParamType::Length) return units::parse_length(text);
    if (auto f = units::parse_fraction(text)) return f->raw;
    return std::nullopt;
}

bool is_clear_value(std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v.empty() || v == "{}";
}

}  // namespace

const std::array<ParamInfo, kParamCount>& param_table() { return kParams; }

const ParamInfo& param_info(Param p) { return kParams[index_of(p)]; }

std::optional<Param> param_from_name(std::string_view name) {
    for (const auto& info : kParams) {
        if (info.name == name) return info.param;
    }
    return std::nullopt;
}

StyleRegistry::StyleRegistry() {
    for (const auto& info : kParams) {
        if (!info.default_text.empty()) globals_[index_of(info.param)] = parse_value(info, info.default_text);
    }
}

StyleRegistry StyleRegistry::builtin() {
    StyleRegistry r;
    const FillSpec arrow{Glyph::None, Shaft::Single, Glyph::Arrowhead};
    r.register_cell("To", arrow);
    r.register_cell("One", arrow);
    r.register_cell("Bij", {Glyph::Arrowhead, Shaft::Single, Glyph::Arrowhead});
    r.register_cell("Mapsto", {Glyph::Bar, Shaft::Single, Glyph::Arrowhead});
    r.register_cell("Into", {Glyph::Hook, Shaft::Single, Glyph::Arrowhead});
    r.register_cell("Epi", {Glyph::None, Shaft::Single, Glyph::DoubleArrowhead});
    r.register_cell("Line", {Glyph::None, Shaft::Single, Glyph::None});
    r.register_cell("Nul", {Glyph::None, Shaft::None, Glyph::None});
    r.register_cell("Dots", {Glyph::None, Shaft::Dots, Glyph::None});
    r.register_cell("Two", {Glyph::None, Shaft::Double, Glyph::EqualsHead});
    r.register_cell("Impl", {Glyph::None, Shaft::Double, Glyph::EqualsHead});
    r.register_cell("Bar", {Glyph::None, Shaft::Double, Glyph::None});
    r.register_cell("Null", {Glyph::None, Shaft::None, Glyph::None});
    r.register_cell("Eq", {Glyph::None, Shaft::None, Glyph::None, true});
    for (const char* name : {"Two", "Impl", "Bar", "Null", "Eq"}) {
        r.set_param("labelpad", name, ".8pt", SetMode::Absolute);
        r.set_param("atpush", name, ".8pt", SetMode::Absolute);
        r.set_param("breakpad", name, ".8pt", SetMode::Absolute);
    }

    r.register_cell("Fillcell", {Glyph::None, Shaft::None, Glyph::None}, CellKind::Fillcell);
    r.register_cell("Boxcell", {Glyph::None, Shaft::None, Glyph::None}, CellKind::Boxcell);
    r.register_cell("Rule", {Glyph::None, Shaft::None, Glyph::None}, CellKind::Rule);
    for (const char* name : {"Fillcell", "Boxcell", "Rule"}) {
        for (const char* p : {"labelwidthpad", "labelpad", "breakpad", "cellpush", "ptpush", "atpush", "joinpush"}) {
            r.set_param(p, name, "0pt", SetMode::Absolute);
        }
    }
    r.set_param("cellpush", "Rule", "1pt", SetMode::Absolute);
    r.set_param("ptpush", "Rule", "1pt", SetMode::Absolute);
    r.set_param("joinpush", "Rule", "1pt", SetMode::Absolute);
    return r;
}

void StyleRegistry::register_cell(std::string name, FillSpec fill, CellKind kind) {
    if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) {
            return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
        })) {
        throw StyleError("cell name must be a non-empty run of letters: '" + name + "'");
    }
    if (const CellStyle* prior = find_cell(name)) {
        throw StyleError("cell '" + name + "' is already registered (registration #" +
                         std::to_string(prior->registration_index) + ")");
    }
    const std::size_t index = cells_.size();
    per_cell_.try_emplace(name);
    cells_.push_back(CellStyle{std::move(name), kind, fill, index});
}

const CellStyle* StyleRegistry::find_cell(std::string_view name) const {
    for (const auto& c : cells_) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void StyleRegistry::set_param(std::string_view name, std::string_view scope, std::string_view value,
                              SetMode mode) {
    const auto p = param_from_name(name);
    if (!p) throw StyleError("unknown parameter '" + std::string(name) + "'");
    const ParamInfo& info = param_info(*p);
    const bool clear = is_clear_value(value);
    std::optional<std::int32_t> parsed;
    if (!clear) {
        parsed = parse_value(info, value);
        if (!parsed) {
            throw StyleError(std::string(info.type == ParamType::Length ? "malformed length" : "malformed number") +
                             " '" + std::string(value) + "' for " + std::string(name));
        }
    }

    std::optional<std::int32_t>* slot = nullptr;
    std::int32_t base = 0;
    if (scope.empty()) {
        slot = &globals_[index_of(*p)];
        base = global_raw(*p);
    } else {
        if (!info.per_cell) {
            throw StyleError("parameter '" + std::string(name) + "' has no per-cell rows");
        }
        auto it = per_cell_.find(scope);
        if (it == per_cell_.end()) throw StyleError("unknown cell '" + std::string(scope) + "'");
        slot = &it->second[index_of(*p)];
        base = slot->value_or(0);
    }

    if (clear) {
        if (scope.empty() && !info.default_text.empty()) {
            throw StyleError("parameter '" + std::string(name) + "' cannot be cleared");
        }
        slot->reset();
        return;
    }
    if (mode == SetMode::Absolute) {
        *slot = *parsed;
        return;
    }
    std::int32_t sum = 0;
    if (__builtin_add_overflow(base, *parsed, &sum)) throw StyleError("parameter '" + std::string(name) + "' overflows");
    *slot = sum;
}

std::int32_t StyleRegistry::global_raw(Param p) const {
    if (const auto& v = globals_[index_of(p)]) return *v;
    // xgrid and ygrid inherit grid until set.
    return *globals_[index_of(Param::Grid)];
}

Sp StyleRegistry::length(Param p) const { return global_raw(p); }

Fraction StyleRegistry::fraction(Param p) const { return Fraction::from_raw(global_raw(p)); }

std::optional<std::int32_t> StyleRegistry::per_cell(Param p, std::string_view cell) const {
    auto it = per_cell_.find(cell);
    if (it == per_cell_.end()) return std::nullopt;
    return it->second[index_of(p)];
}

Sp StyleRegistry::effective_length(Param p, std::string_view cell) const {
    return global_raw(p) + per_cell(p, cell).value_or(0);
}

Fraction StyleRegistry::effective_fraction(Param p, std::string_view cell) const {
    if (const auto v = per_cell(p, cell)) return Fraction::from_raw(*v);
    return fraction(p);
}

std::string StyleRegistry::fingerprint() const {
    std::ostringstream out;
    for (const auto& info : kParams) {
        out << info.name << '=' << global_raw(info.param) << ';';
    }
    for (const auto& cell : cells_) {
        out << "\ncell " << cell.name << ' ' << static_cast<int>(cell.kind) << ' ' << glyph_name(cell.fill.tail)
            << ' ' << shaft_name(cell.fill.shaft) << ' ' << glyph_name(cell.fill.head) << ' '
            << cell.fill.centered_equals;
        const auto& row = per_cell_.find(cell.name)->second;
        for (const auto& info : kParams) {
            if (const auto& v = row[index_of(info.param)]) out << ' ' << info.name << '=' << *v;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::size_t codepoint_count(std::string_view utf8) {
    return static_cast<std::size_t>(
        std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

TextBox EmMetrics::measure(std::string_view text, TextStyle style) const {
    if (text.empty()) return {};
    const std::int64_t em_sp = em(style);
    const std::int64_t n = static_cast<std::int64_t>(codepoint_count(text));
    return TextBox{fixedmath::mul_div_exact(n, em_sp, 2), static_cast<Sp>(em_sp * 7 / 10),
                   static_cast<Sp>(em_sp * 2 / 10)};
}

std::string EmMetrics::fingerprint() const {
    return "em vertexstyle " + std::to_string(vertex_em_) + " labelstyle " + std::to_string(label_em_);
}

EmMetrics EmMetrics::parse(std::string_view text) {
    EmMetrics m;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string keyword, context, value, extra;
        if (!(words >> keyword)) continue;
        if (keyword != "em" || !(words >> context >> value) || (words >> extra)) {
            throw StyleError("metrics line " + std::to_string(lineno) + ": expected `em <context> <pt-value>`");
        }
        auto len = units::parse_length(value);
        if (!len) len = units::parse_length(value + "pt");
        if (!len || *len <= 0) {
            throw StyleError("metrics line " + std::to_string(lineno) + ": bad em value '" + value + "'");
        }
        if (context == "vertexstyle") {
            m.vertex_em_ = *len;
        } else if (context == "labelstyle") {
            m.label_em_ = *len;
        } else {
            throw StyleError("metrics line " + std::to_string(lineno) + ": unknown context '" + context + "'");
        }
    }
    return m;
}

EmMetrics EmMetrics::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StyleError("cannot read metrics file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace cdc
