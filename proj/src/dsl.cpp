#include "cdc/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "cdc/units.hpp"

namespace cdc {

std::string_view kind_name(DiagramKind k) {
    switch (k) {
        case DiagramKind::Diagram: return "Diagram";
        case DiagramKind::Diag: return "Diag";
        case DiagramKind::Dg: return "Dg";
        case DiagramKind::Long: return "Long";
        case DiagramKind::Graph: return "Graph";
    }
    return "Diagram";
}

std::string_view move_name(MoveKind k) {
    switch (k) {
        case MoveKind::Dx: return "dx";
        case MoveKind::Mx: return "mx";
        case MoveKind::Ax: return "ax";
        case MoveKind::Dl: return "dl";
        case MoveKind::Dr: return "dr";
        case MoveKind::Ml: return "ml";
        case MoveKind::Mr: return "mr";
        case MoveKind::Al: return "al";
        case MoveKind::Ar: return "ar";
        case MoveKind::Dy: return "dy";
        case MoveKind::My: return "my";
    }
    return "dx";
}

std::string_view dir_prefix(int dircode) {
    static constexpr std::array<std::string_view, 11> kPrefixes{"a", "r", "rd", "d", "ld", "l",
                                                                "lu", "u", "ru", "", "b"};
    if (dircode < 0 || dircode > 10 || dircode == 9) return "";
    return kPrefixes[static_cast<std::size_t>(dircode)];
}

bool DiagramOptions::has(std::string_view flag) const {
    return std::binary_search(flags.begin(), flags.end(), flag);
}

std::size_t DiagramAst::column_count() const {
    std::size_t n = 0;
    for (const auto& row : rows) n = std::max(n, row.size());
    return n;
}

namespace {

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string normalize_space(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

class LineMap {
public:
    explicit LineMap(std::string_view text) : text_(text) {
        starts_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\n') starts_.push_back(i + 1);
        }
    }

    SourcePos at(std::size_t offset) const {
        offset = std::min(offset, text_.size());
        const auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
        const std::size_t line = static_cast<std::size_t>(it - starts_.begin());
        const std::size_t start = starts_[line - 1];
        const std::size_t col = codepoint_count(text_.substr(start, offset - start)) + 1;
        return {static_cast<int>(line), static_cast<int>(col)};
    }

private:
    std::string_view text_;
    std::vector<std::size_t> starts_;
};

// Comments become spaces so offsets stay valid for diagnostics.
std::string strip_comments(std::string_view src) {
    std::string out(src);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '\\') {
            ++i;
            continue;
        }
        if (out[i] == '%') {
            while (i < out.size() && out[i] != '\n') out[i++] = ' ';
        }
    }
    return out;
}

struct Range {
    std::size_t begin;
    std::size_t end;
};

class Parser {
public:
    Parser(std::string_view original, const StyleRegistry& registry)
        : text_(strip_comments(original)), lines_(original), registry_(registry) {}

    ParseOutput run() {
        ParseOutput out;
        std::size_t body = parse_header(out.ast);
        const auto rows = split_body(body);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::vector<CellNode> row;
            for (const Range& cell : rows[r]) row.push_back(parse_cell(cell, out.ast));
            out.ast.rows.push_back(std::move(row));
        }
        out.warnings = std::move(warnings_);
        return out;
    }

private:
    [[noreturn]] void fail(std::size_t offset, const char* code, std::string message) const {
        throw CompileError({Diagnostic{Severity::Error, code, std::move(message), lines_.at(offset)}});
    }

    void warn(std::size_t offset, const char* code, std::string message) {
        warnings_.push_back(Diagnostic{Severity::Warning, code, std::move(message), lines_.at(offset)});
    }

    std::string_view slice(std::size_t b, std::size_t e) const { return std::string_view(text_).substr(b, e - b); }

    // ---------------------------------------------------------------- header

    std::size_t parse_header(DiagramAst& ast) {
        std::size_t i = 0;
        while (i < text_.size() && is_space(text_[i])) ++i;
        if (i >= text_.size() || text_[i] != '\\') return 0;
        std::size_t j = i + 1;
        while (j < text_.size() && is_letter(text_[j])) ++j;
        const std::string_view name = slice(i + 1, j);
        bool matched = false;
        for (auto k : {DiagramKind::Diagram, DiagramKind::Diag, DiagramKind::Dg, DiagramKind::Long,
                       DiagramKind::Graph}) {
            if (kind_name(k) == name) {
                ast.kind = k;
                matched = true;
            }
        }
        if (!matched) return 0;
        std::size_t k = j;
        while (k < text_.size() && is_space(text_[k])) ++k;
        if (k >= text_.size() || text_[k] != '[') return j;
        const std::size_t close = find_bracket_close(k, text_.size());
        parse_options(k + 1, close, ast);
        return close + 1;
    }

    // Matching ']' for the '[' at `open`, skipping braced groups.
    std::size_t find_bracket_close(std::size_t open, std::size_t end) const {
        int depth = 0;
        for (std::size_t i = open + 1; i < end; ++i) {
            const char c = text_[i];
            if (c == '\\') {
                ++i;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (depth == 0) fail(i, diag::kUnbalancedBraces, "unmatched '}'");
                --depth;
            } else if (c == ']' && depth == 0) {
                return i;
            }
        }
        fail(open, diag::kUnterminated, "unterminated '['");
    }

    void parse_options(std::size_t b, std::size_t e, DiagramAst& ast) {
        std::size_t start = b;
        int depth = 0;
        for (std::size_t i = b; i <= e; ++i) {
            if (i < e && text_[i] == '{') ++depth;
            if (i < e && text_[i] == '}') --depth;
            if (i == e || (text_[i] == ',' && depth == 0)) {
                parse_option(start, i, ast);
                start = i + 1;
            }
        }
        auto& flags = ast.options.flags;
        std::sort(flags.begin(), flags.end());
        flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
        if (ast.options.has("flexible") && ast.options.has("fixed")) {
            fail(b, diag::kBadOption, "options 'flexible' and 'fixed' conflict");
        }
        if (ast.options.has("gravitateleft") && ast.options.has("gravitateright")) {
            fail(b, diag::kBadOption, "options 'gravitateleft' and 'gravitateright' conflict");
        }
    }

    void parse_option(std::size_t b, std::size_t e, DiagramAst& ast) {
        std::size_t i = b;
        while (i < e && is_space(text_[i])) ++i;
        const std::size_t item = i;
        const std::string_view whole = trim(slice(b, e));
        if (whole.empty()) return;
        for (auto flag : kFlagNames) {
            if (whole == flag) {
                ast.options.flags.emplace_back(flag);
                return;
            }
        }
        std::size_t j = i;
        while (j < e && is_letter(text_[j])) ++j;
        const std::string name(slice(i, j));
        std::string cell;
        if (j < e && text_[j] == '{') {
            std::size_t k = j + 1;
            while (k < e && text_[k] != '}') ++k;
            cell = std::string(trim(slice(j + 1, k)));
            j = k + 1;
        }
        while (j < e && is_space(text_[j])) ++j;
        SetMode mode = SetMode::Absolute;
        if (j + 1 < e && text_[j] == '+' && text_[j + 1] == '=') {
            mode = SetMode::Relative;
            j += 2;
        } else if (j < e && text_[j] == '=') {
            j += 1;
        } else {
            fail(item, diag::kBadOption, "unknown option '" + std::string(whole) + "'");
        }
        const std::string_view value = trim(slice(j, e));

        if (ast.kind == DiagramKind::Graph && cell.empty() && mode == SetMode::Absolute) {
            if (name == "width" || name == "height") {
                int v = 0;
                const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                if (ec != std::errc{} || p != value.data() + value.size() || v < 0 || v > 10000) {
                    fail(item, diag::kBadOption, "graph " + name + " must be a non-negative integer");
                }
                (name == "width" ? ast.graph.width : ast.graph.height) = v;
                return;
            }
            if (name == "xrange" || name == "yrange") {
                const auto colon = value.find(':');
                int lo = 0, hi = 0;
                bool ok = colon != std::string_view::npos;
                if (ok) {
                    const auto a = trim(value.substr(0, colon));
                    const auto z = trim(value.substr(colon + 1));
                    const auto r1 = std::from_chars(a.data(), a.data() + a.size(), lo);
                    const auto r2 = std::from_chars(z.data(), z.data() + z.size(), hi);
                    ok = r1.ec == std::errc{} && r1.ptr == a.data() + a.size() && r2.ec == std::errc{} &&
                         r2.ptr == z.data() + z.size() && lo < hi && hi - lo <= 10000;
                }
                if (!ok) fail(item, diag::kBadOption, "graph " + name + " must be `lo:hi` with lo < hi");
                (name == "xrange" ? ast.graph.xrange : ast.graph.yrange) = std::make_pair(lo, hi);
                return;
            }
        }

        const auto param = param_from_name(name);
        if (!param) fail(item, diag::kBadOption, "unknown option '" + name + "'");
        const ParamInfo& info = param_info(*param);
        if (!cell.empty() && !info.per_cell) {
            fail(item, diag::kBadOption, "parameter '" + name + "' has no per-cell rows");
        }
        std::string normalized;
        if (value.empty() || value == "{}") {
            if (cell.empty() && !info.default_text.empty()) {
                fail(item, diag::kBadOption, "parameter '" + name + "' cannot be cleared");
            }
        } else if (info.type == ParamType::Length) {
            const auto v = units::parse_length(value);
            if (!v) fail(item, diag::kMalformedLength, "malformed length '" + std::string(value) + "'");
            normalized = units::format_length(*v);
        } else {
            const auto v = units::parse_fraction(value);
            if (!v) fail(item, diag::kMalformedLength, "malformed number '" + std::string(value) + "'");
            normalized = units::format_fraction(*v);
        }
        ast.options.assigns.push_back(OptionAssign{name, cell, normalized, mode});
    }

    // ------------------------------------------------------------------ body

    std::vector<std::vector<Range>> split_body(std::size_t begin) {
        std::vector<std::vector<Range>> rows(1);
        std::vector<std::size_t> open;
        std::size_t cell_start = begin;
        const std::size_t n = text_.size();
        for (std::size_t i = begin; i < n; ++i) {
            const char c = text_[i];
            if (c == '\\') {
                if (i + 1 < n && text_[i + 1] == '\\' && open.empty()) {
                    rows.back().push_back({cell_start, i});
                    rows.emplace_back();
                    cell_start = i + 2;
                }
                ++i;
            } else if (c == '{') {
                open.push_back(i);
            } else if (c == '}') {
                if (open.empty()) fail(i, diag::kUnbalancedBraces, "unmatched '}'");
                open.pop_back();
            } else if (c == '&' && open.empty()) {
                rows.back().push_back({cell_start, i});
                cell_start = i + 1;
            }
        }
        if (!open.empty()) fail(open.front(), diag::kUnbalancedBraces, "unclosed '{'");
        rows.back().push_back({cell_start, n});
        auto blank = [&](const std::vector<Range>& row) {
            return row.size() == 1 && trim(slice(row[0].begin, row[0].end)).empty();
        };
        if (rows.size() > 1 && blank(rows.back())) rows.pop_back();
        return rows;
    }

    // ------------------------------------------------------------------ cells

    struct Cursor {
        const Parser& p;
        std::size_t i;
        std::size_t end;

        bool eof() const { return i >= end; }
        char peek() const { return eof() ? '\0' : p.text_[i]; }
        void skip_ws() {
            while (!eof() && is_space(p.text_[i])) ++i;
        }
        std::string_view command_name() {
            // at '\'
            const std::size_t b = ++i;
            while (!eof() && is_letter(p.text_[i])) ++i;
            if (i == b && !eof()) ++i;  // control symbol
            return p.slice(b, i);
        }
        // Braced group at '{'; returns the inner text.
        std::string_view group() {
            const std::size_t open = i;
            int depth = 0;
            for (; i < end; ++i) {
                const char c = p.text_[i];
                if (c == '\\') {
                    ++i;
                } else if (c == '{') {
                    ++depth;
                } else if (c == '}' && --depth == 0) {
                    ++i;
                    return p.slice(open + 1, i - 1);
                }
            }
            p.fail(open, diag::kUnbalancedBraces, "unclosed '{'");
        }
        std::string_view until(char close, std::size_t open, const char* what) {
            const std::size_t b = i;
            int depth = 0;
            for (; i < end; ++i) {
                const char c = p.text_[i];
                if (c == '\\') {
                    ++i;
                } else if (c == '{') {
                    ++depth;
                } else if (c == '}') {
                    --depth;
                } else if (c == close && depth == 0) {
                    ++i;
                    return p.slice(b, i - 1);
                }
            }
            p.fail(open, diag::kUnterminated, std::string("unterminated ") + what);
        }
        bool try_group(std::string_view& out) {
            skip_ws();
            if (peek() != '{') return false;
            out = group();
            return true;
        }
    };

    CellNode parse_cell(Range r, DiagramAst& ast) {
        std::size_t b = r.begin;
        std::size_t e = r.end;
        while (b < e && is_space(text_[b])) ++b;
        while (e > b && is_space(text_[e - 1])) --e;
        CellNode node{EmptyCell{}, lines_.at(b)};
        if (b == e) return node;
        if (text_[b] == '\\') {
            std::size_t j = b + 1;
            while (j < e && is_letter(text_[j])) ++j;
            if (const auto match = match_arrow(slice(b + 1, j))) {
                Cursor cur{*this, j, e};
                node.cell = parse_arrow(cur, b, match->first, *match->second, ast);
                return node;
            }
        }
        node.cell = parse_vertex(Cursor{*this, b, e});
        return node;
    }

    std::optional<std::pair<int, const CellStyle*>> match_arrow(std::string_view name) const {
        static constexpr std::array<std::pair<std::string_view, int>, 10> kDirs{{
            {"rd", 2}, {"ld", 4}, {"lu", 6}, {"ru", 8}, {"a", 0}, {"r", 1}, {"d", 3}, {"l", 5}, {"u", 7}, {"b", 10},
        }};
        for (const auto& [prefix, code] : kDirs) {
            if (name.size() > prefix.size() && name.substr(0, prefix.size()) == prefix) {
                if (const CellStyle* s = registry_.find_cell(name.substr(prefix.size()))) {
                    return std::make_pair(code, s);
                }
            }
        }
        return std::nullopt;
    }

    Sp length_arg(Cursor& cur, std::string_view cmd) const {
        std::string_view g;
        const std::size_t at = cur.i;
        if (!cur.try_group(g)) fail(at, diag::kMalformedLength, "\\" + std::string(cmd) + " expects {length}");
        const auto v = units::parse_length(g);
        if (!v) fail(at, diag::kMalformedLength, "malformed length '" + std::string(g) + "'");
        return *v;
    }

    Fraction fraction_arg(Cursor& cur, std::string_view cmd) const {
        std::string_view g;
        const std::size_t at = cur.i;
        if (!cur.try_group(g)) fail(at, diag::kMalformedLength, "\\" + std::string(cmd) + " expects {number}");
        const auto v = units::parse_fraction(g);
        if (!v) fail(at, diag::kMalformedLength, "malformed number '" + std::string(g) + "'");
        return *v;
    }

    std::optional<GraySpec> gray_command(std::string_view name, Cursor& cur) const {
        if (name == "gr") return GraySpec{fraction_arg(cur, name), false};
        if (name == "white") return GraySpec{Fraction::one(), false};
        if (name == "black") return GraySpec{Fraction{0}, false};
        if (name == "gray" || name == "grey") return GraySpec{std::nullopt, true};
        return std::nullopt;
    }

    Cell parse_arrow(Cursor& cur, std::size_t cell_begin, int dircode, const CellStyle& style, DiagramAst&) {
        if (style.kind == CellKind::Fillcell || style.kind == CellKind::Boxcell) {
            fail(cell_begin, diag::kUnsupportedCell, style.name + " cells are not drawn by this compiler");
        }
        const bool is_rule = style.kind == CellKind::Rule;
        ArrowCell arrow;
        arrow.dircode = dircode;
        arrow.style = style.name;
        const bool needs_target = dircode == kDirA || dircode == kDirB;
        bool last_was_label = false;

        while (true) {
            cur.skip_ws();
            if (cur.eof()) break;
            const std::size_t at = cur.i;
            const char c = cur.peek();
            if (c == '^' || c == '_' || c == '<' || c == '>') {
                if (is_rule) fail(at, diag::kBadLabel, "Rule cells take no labels");
                ++cur.i;
                arrow.labels.push_back(Label{label_code(c), label_text(cur, at), std::nullopt});
                last_was_label = true;
                continue;
            }
            if (c == ':') {
                ++cur.i;
                Slide s = parse_slide(cur, at);
                if (last_was_label) {
                    if (arrow.labels.back().slide) fail(at, diag::kMalformedSlide, "label already has a slide");
                    arrow.labels.back().slide = s;
                } else {
                    if (arrow.slide) fail(at, diag::kMalformedSlide, "arrow already has a slide");
                    arrow.slide = s;
                }
                last_was_label = false;
                continue;
            }
            last_was_label = false;
            if (c == '(') {
                ++cur.i;
                if (!needs_target) {
                    fail(at, diag::kTargetOnCompass, "target given on compass arrow \\" +
                                                         std::string(dir_prefix(dircode)) + style.name);
                }
                if (arrow.target) fail(at, diag::kDuplicateTarget, "arrow already has a target");
                arrow.target = parse_target(cur.until(')', at, "'('"), at);
                continue;
            }
            if (c == '\\') {
                const std::string_view name = cur.command_name();
                parse_modifier(name, cur, at, arrow.mods);
                continue;
            }
            fail(at, diag::kUnexpectedText, "unexpected text in arrow cell");
        }
        if (needs_target && !arrow.target) {
            fail(cell_begin, diag::kMissingTarget,
                 "\\" + std::string(dir_prefix(dircode)) + style.name + " needs a target (x,y)");
        }
        if (is_rule) return RuleCell{arrow.dircode, arrow.target, arrow.mods};
        return arrow;
    }

    static LabelCode label_code(char c) {
        switch (c) {
            case '<': return LabelCode::Lt;
            case '>': return LabelCode::Gt;
            case '_': return LabelCode::Under;
            default: return LabelCode::Caret;
        }
    }

    std::string label_text(Cursor& cur, std::size_t at) const {
        cur.skip_ws();
        if (cur.eof()) fail(at, diag::kBadLabel, "label without text");
        const char c = cur.peek();
        if (c == '{') return normalize_space(cur.group());
        if (c == '[') {
            ++cur.i;
            return normalize_space(cur.until(']', at, "'['"));
        }
        if (c == '\\') {
            const std::size_t b = cur.i;
            cur.command_name();
            return std::string(slice(b, cur.i));
        }
        if (c == '}' || c == '&') fail(at, diag::kBadLabel, "label without text");
        // One UTF-8 codepoint.
        const std::size_t b = cur.i++;
        while (!cur.eof() && (static_cast<unsigned char>(cur.peek()) & 0xC0) == 0x80) ++cur.i;
        return std::string(slice(b, cur.i));
    }

    Slide parse_slide(Cursor& cur, std::size_t at) const {
        cur.skip_ws();
        if (cur.peek() != '{') fail(at, diag::kMalformedSlide, "slide expects :{t;x,y}");
        const std::string_view body = cur.group();
        Slide s;
        const auto semi = body.find(';');
        const std::string_view point = trim(body.substr(0, semi));
        if (!point.empty()) {
            const auto f = units::parse_fraction(point);
            if (!f || f->raw < 0 || f->raw > Fraction::one().raw) {
                fail(at, diag::kMalformedSlide, "slide point must be a fraction in [0,1]");
            }
            s.point = *f;
        }
        if (semi != std::string_view::npos) {
            const std::string_view offs = body.substr(semi + 1);
            const auto comma = offs.find(',');
            if (comma == std::string_view::npos && !trim(offs).empty()) {
                fail(at, diag::kMalformedSlide, "slide offset expects x,y");
            }
            const std::string_view x = trim(offs.substr(0, comma));
            const std::string_view y = comma == std::string_view::npos ? std::string_view{} : trim(offs.substr(comma + 1));
            if (!x.empty()) {
                s.offx = units::parse_length(x);
                if (!s.offx) fail(at, diag::kMalformedSlide, "malformed slide offset '" + std::string(x) + "'");
            }
            if (!y.empty()) {
                s.offy = units::parse_length(y);
                if (!s.offy) fail(at, diag::kMalformedSlide, "malformed slide offset '" + std::string(y) + "'");
            }
        }
        return s;
    }

    Target parse_target(std::string_view body, std::size_t at) const {
        body = trim(body);
        const auto comma = body.find(',');
        if (comma != std::string_view::npos) {
            const auto x = units::parse_fraction(trim(body.substr(0, comma)));
            const auto y = units::parse_fraction(trim(body.substr(comma + 1)));
            if (!x || !y) fail(at, diag::kMalformedTarget, "malformed target (" + std::string(body) + ")");
            return Target{Target::Offset{*x, *y}};
        }
        const bool ident = !body.empty() && std::all_of(body.begin(), body.end(), [](char c) {
            return is_letter(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
        }) && is_letter(body.front());
        if (!ident) fail(at, diag::kMalformedTarget, "target must be (x,y) or (pointname)");
        return Target{std::string(body)};
    }

    void parse_modifier(std::string_view name, Cursor& cur, std::size_t at, ArrowMods& mods) {
        auto set_len = [&](std::optional<Sp>& slot) { slot = length_arg(cur, name); };
        if (name == "hx") return set_len(mods.hx);
        if (name == "hy") return set_len(mods.hy);
        if (name == "tx") return set_len(mods.tx);
        if (name == "ty") return set_len(mods.ty);
        if (name == "fx") return set_len(mods.fx);
        if (name == "fy") return set_len(mods.fy);
        if (name == "lw") return set_len(mods.lw);
        if (name == "rw") return set_len(mods.rw);
        if (name == "nw") {
            mods.nw = true;
            return;
        }
        if (name == "br") {
            mods.br = true;
            return;
        }
        if (name == "join") {
            std::string_view g;
            if (!cur.try_group(g)) fail(at, diag::kUnknownCommand, "\\join expects {tail|head|both|none}");
            g = trim(g);
            if (g == "tail") mods.join = JoinMode::Tail;
            else if (g == "head") mods.join = JoinMode::Head;
            else if (g == "both") mods.join = JoinMode::Both;
            else if (g == "none") mods.join = JoinMode::None;
            else fail(at, diag::kUnknownCommand, "\\join expects {tail|head|both|none}");
            return;
        }
        if (name == "pt") {
            std::string_view g;
            if (!cur.try_group(g)) fail(at, diag::kMalformedTarget, "\\pt expects {name}");
            const std::string pname(trim(g));
            if (pname.empty() || !is_letter(pname.front()) ||
                !std::all_of(pname.begin(), pname.end(), [](char c) {
                    return is_letter(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
                })) {
                fail(at, diag::kMalformedTarget, "bad point name '" + pname + "'");
            }
            PointMark mark{pname, std::nullopt};
            const std::size_t save = cur.i;
            std::string_view f;
            if (cur.try_group(f)) {
                const auto v = units::parse_fraction(f);
                if (!v) fail(save, diag::kMalformedLength, "malformed point fraction '" + std::string(f) + "'");
                mark.fraction = *v;
            }
            mods.points.push_back(std::move(mark));
            return;
        }
        if (auto g = gray_command(name, cur)) {
            mods.gray = *g;
            return;
        }
        static constexpr std::array<std::string_view, 8> kIgnored{"dh", "dt", "up", "dn", "rt", "lf", "mv", "sh"};
        if (std::find(kIgnored.begin(), kIgnored.end(), name) != kIgnored.end()) {
            std::string raw = "\\" + std::string(name);
            std::string_view g;
            while (cur.try_group(g)) raw += "{" + std::string(g) + "}";
            warn(at, diag::kIgnoredModifier, "modifier " + raw + " is accepted but has no effect");
            mods.ignored.push_back(std::move(raw));
            return;
        }
        fail(at, diag::kUnknownCommand, "unknown command \\" + std::string(name));
    }

    VertexCell parse_vertex(Cursor cur) {
        VertexCell v;
        std::string text;
        while (!cur.eof()) {
            const std::size_t at = cur.i;
            const char c = cur.peek();
            if (c == '{') {
                cur.group();
                text += slice(at, cur.i);
                continue;
            }
            if (c != '\\') {
                // Removing a marker must not glue a letter onto a preceding control word.
                if (is_letter(c) && ends_with_control_word(text)) text += ' ';
                text += c;
                ++cur.i;
                continue;
            }
            const std::string_view name = cur.command_name();
            if (name == "stop") {
                v.stop = true;
            } else if (name == "nodot") {
                v.nodot = true;
            } else if (name == "grav") {
                v.grav = true;
            } else if (name == "base") {
                v.base = true;
            } else if (const auto kind = movement_kind(name)) {
                Movement m{*kind, std::monostate{}};
                if (takes_value(*kind)) {
                    std::string_view g;
                    if (!cur.try_group(g)) fail(at, diag::kMalformedLength, "\\" + std::string(name) + " expects {value}");
                    if (const auto f = units::parse_fraction(g)) {
                        m.value = *f;
                    } else if (const auto l = units::parse_length(g)) {
                        m.value = *l;
                    } else {
                        fail(at, diag::kMalformedLength, "malformed movement value '" + std::string(g) + "'");
                    }
                }
                v.movements.push_back(m);
            } else if (name == "W") {
                v.span = parse_span(cur, at);
            } else if (auto g = gray_command(name, cur)) {
                v.gray = *g;
            } else {
                text += slice(at, cur.i);
            }
        }
        v.text = normalize_space(text);
        return v;
    }

    static bool ends_with_control_word(const std::string& text) {
        std::size_t i = text.size();
        while (i > 0 && is_letter(text[i - 1])) --i;
        if (i == text.size() || i == 0 || text[i - 1] != '\\') return false;
        // An escaped backslash before the letters makes them plain text.
        std::size_t slashes = 0;
        while (i > slashes && text[i - 1 - slashes] == '\\') ++slashes;
        return slashes % 2 == 1;
    }

    static std::optional<MoveKind> movement_kind(std::string_view name) {
        for (auto k : {MoveKind::Dx, MoveKind::Mx, MoveKind::Ax, MoveKind::Dl, MoveKind::Dr, MoveKind::Ml,
                       MoveKind::Mr, MoveKind::Al, MoveKind::Ar, MoveKind::Dy, MoveKind::My}) {
            if (move_name(k) == name) return k;
        }
        return std::nullopt;
    }

    static bool takes_value(MoveKind k) {
        return k == MoveKind::Dx || k == MoveKind::Mx || k == MoveKind::Ax || k == MoveKind::Dy || k == MoveKind::My;
    }

    Span parse_span(Cursor& cur, std::size_t at) const {
        Span s;
        cur.skip_ws();
        if (cur.peek() == '[') {
            const std::size_t open = cur.i++;
            const std::string_view mode = trim(cur.until(']', open, "'['"));
            if (mode == "plain" || mode == "0") {
                s.mode = 0;
            } else if (mode == "braced" || mode == "1") {
                s.mode = 1;
            } else if (mode == "loose") {
                s.mode = 0;
                s.loose = true;
            } else if (mode == "2" || mode == "3") {
                s.mode = mode[0] - '0';
            } else {
                fail(at, diag::kBadSpan, "unknown span mode '" + std::string(mode) + "'");
            }
        }
        std::string_view g;
        if (!cur.try_group(g)) fail(at, diag::kBadSpan, "\\W expects {columns}");
        g = trim(g);
        int n = 0;
        const auto [p, ec] = std::from_chars(g.data(), g.data() + g.size(), n);
        if (ec != std::errc{} || p != g.data() + g.size() || n < 1 || n > 10000) {
            fail(at, diag::kBadSpan, "span width must be a positive integer");
        }
        s.columns = n;
        return s;
    }

    std::string text_;
    LineMap lines_;
    const StyleRegistry& registry_;
    std::vector<Diagnostic> warnings_;
};

// ------------------------------------------------------------ canonical form

std::string gray_text(const GraySpec& g) {
    if (g.use_graygray) return "\\gray";
    return "\\gr{" + units::format_fraction(*g.value) + "}";
}

std::string slide_text(const Slide& s) {
    std::string out = ":{";
    if (s.point) out += units::format_fraction(*s.point);
    if (s.offx || s.offy) {
        out += ';';
        if (s.offx) out += units::format_length(*s.offx);
        out += ',';
        if (s.offy) out += units::format_length(*s.offy);
    }
    out += '}';
    return out;
}

std::string target_text(const Target& t) {
    if (const auto* off = std::get_if<Target::Offset>(&t.where)) {
        return "(" + units::format_fraction(off->x) + "," + units::format_fraction(off->y) + ")";
    }
    return "(" + std::get<std::string>(t.where) + ")";
}

std::string mods_text(const ArrowMods& m) {
    std::string out;
    auto len = [&](const char* name, const std::optional<Sp>& v) {
        if (v) out += std::string(" \\") + name + "{" + units::format_length(*v) + "}";
    };
    len("hx", m.hx);
    len("hy", m.hy);
    len("tx", m.tx);
    len("ty", m.ty);
    len("fx", m.fx);
    len("fy", m.fy);
    len("lw", m.lw);
    len("rw", m.rw);
    if (m.nw) out += " \\nw";
    if (m.br) out += " \\br";
    switch (m.join) {
        case JoinMode::None: break;
        case JoinMode::Tail: out += " \\join{tail}"; break;
        case JoinMode::Head: out += " \\join{head}"; break;
        case JoinMode::Both: out += " \\join{both}"; break;
    }
    for (const auto& p : m.points) {
        out += " \\pt{" + p.name + "}";
        if (p.fraction) out += "{" + units::format_fraction(*p.fraction) + "}";
    }
    if (m.gray) out += " " + gray_text(*m.gray);
    for (const auto& raw : m.ignored) out += " " + raw;
    return out;
}

char label_char(LabelCode c) {
    switch (c) {
        case LabelCode::Lt: return '<';
        case LabelCode::Gt: return '>';
        case LabelCode::Under: return '_';
        case LabelCode::Caret: return '^';
    }
    return '^';
}

std::string cell_text(const Cell& cell) {
    if (std::holds_alternative<EmptyCell>(cell)) return "";
    if (const auto* v = std::get_if<VertexCell>(&cell)) {
        std::string out;
        auto add = [&](const std::string& s) {
            if (!out.empty()) out += ' ';
            out += s;
        };
        if (v->stop) add("\\stop");
        if (v->nodot) add("\\nodot");
        if (v->grav) add("\\grav");
        if (v->base) add("\\base");
        for (const auto& m : v->movements) {
            std::string s = "\\" + std::string(move_name(m.kind));
            if (const auto* l = std::get_if<Sp>(&m.value)) s += "{" + units::format_length(*l) + "}";
            if (const auto* f = std::get_if<Fraction>(&m.value)) s += "{" + units::format_fraction(*f) + "}";
            add(s);
        }
        if (v->span) {
            std::string s = "\\W";
            if (v->span->loose) s += "[loose]";
            else if (v->span->mode != 0) s += "[" + std::to_string(v->span->mode) + "]";
            add(s + "{" + std::to_string(v->span->columns) + "}");
        }
        if (v->gray) add(gray_text(*v->gray));
        // Markers go last unless the text opens with a command, which could then read as an arrow.
        if (v->text.empty()) return out;
        if (out.empty()) return v->text;
        return v->text.front() == '\\' ? out + ' ' + v->text : v->text + ' ' + out;
    }
    if (const auto* a = std::get_if<ArrowCell>(&cell)) {
        std::string out = "\\" + std::string(dir_prefix(a->dircode)) + a->style;
        if (a->slide) out += slide_text(*a->slide);
        for (const auto& l : a->labels) {
            out += label_char(l.code);
            out += "{" + l.text + "}";
            if (l.slide) out += slide_text(*l.slide);
        }
        if (a->target) out += target_text(*a->target);
        return out + mods_text(a->mods);
    }
    const auto& r = std::get<RuleCell>(cell);
    std::string out = "\\" + std::string(dir_prefix(r.dircode)) + "Rule";
    if (r.target) out += target_text(*r.target);
    return out + mods_text(r.mods);
}

}  // namespace

ParseOutput parse(std::string_view source, const StyleRegistry& registry) {
    return Parser(source, registry).run();
}

std::string canonicalize(const DiagramAst& ast) {
    std::string out = "\\" + std::string(kind_name(ast.kind));
    std::vector<std::string> opts(ast.options.flags.begin(), ast.options.flags.end());
    for (const auto& a : ast.options.assigns) {
        std::string s = a.name;
        if (!a.cell.empty()) s += "{" + a.cell + "}";
        s += a.mode == SetMode::Relative ? "+=" : "=";
        s += a.value.empty() ? "{}" : a.value;
        opts.push_back(std::move(s));
    }
    if (ast.graph.width) opts.push_back("width=" + std::to_string(*ast.graph.width));
    if (ast.graph.height) opts.push_back("height=" + std::to_string(*ast.graph.height));
    if (ast.graph.xrange) {
        opts.push_back("xrange=" + std::to_string(ast.graph.xrange->first) + ":" +
                       std::to_string(ast.graph.xrange->second));
    }
    if (ast.graph.yrange) {
        opts.push_back("yrange=" + std::to_string(ast.graph.yrange->first) + ":" +
                       std::to_string(ast.graph.yrange->second));
    }
    // Always bracketed, so a first vertex starting with '[' is not read as options.
    out += '[';
    for (std::size_t i = 0; i < opts.size(); ++i) {
        if (i > 0) out += ',';
        out += opts[i];
    }
    out += "]\n";
    for (std::size_t r = 0; r < ast.rows.size(); ++r) {
        const auto& row = ast.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += " & ";
            out += cell_text(row[c].cell);
        }
        out += r + 1 < ast.rows.size() ? " \\\\\n" : "\n";
    }
    // A blank single-cell last row would be taken for a trailing separator; keep it with one more.
    if (ast.rows.size() > 1 && ast.rows.back().size() == 1 &&
        std::holds_alternative<EmptyCell>(ast.rows.back()[0].cell)) {
        out.insert(out.size() - 1, " \\\\");
    }
    return out;
}

}  // namespace cdc
