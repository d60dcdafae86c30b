#include "cdc/router.hpp"

#include <algorithm>
#include <cstdlib>

namespace cdc::router {

namespace {

Sp checked(std::int64_t v) {
    if (v > (1LL << 30) - 1 || v < -((1LL << 30) - 1)) {
        throw MathError(MathError::Kind::Overflow, "arrow coordinate overflow");
    }
    return static_cast<Sp>(v);
}

Point cell_point(const Grid& grid, const BoxTable& boxes, int row, int col) {
    if (const VertexBox* b = boxes.at(row, col)) return {b->x, b->y};
    return {grid.X[static_cast<std::size_t>(col)], grid.Y[static_cast<std::size_t>(row)]};
}

Sp axis_unit(const std::vector<Sp>& axis, Sp fallback) {
    if (axis.size() >= 2) {
        const Sp gap = axis[axis.size() - 1] - axis[axis.size() - 2];
        if (gap != 0) return gap;
    }
    return fallback;
}

struct Pending {
    const CellNode* node;
    int row;
    int col;
};

class Router {
public:
    Router(const DiagramAst& ast, const BoxTable& boxes, const Grid& grid, const StyleRegistry& registry,
           const MetricsModel& metrics, const RouteFlags& flags)
        : ast_(ast), boxes_(boxes), grid_(grid), registry_(registry), metrics_(metrics), flags_(flags) {
        C_ = grid.last_col();
        R_ = grid.last_row();
    }

    RouteOutput run() {
        std::vector<Pending> deferred;
        std::vector<std::pair<std::pair<int, int>, ArrowGeometry>> done;
        for (std::size_t r = 0; r < ast_.rows.size(); ++r) {
            for (std::size_t c = 0; c < ast_.rows[r].size(); ++c) {
                const CellNode& node = ast_.rows[r][c];
                const Pending p{&node, static_cast<int>(r), static_cast<int>(c)};
                if (!std::holds_alternative<ArrowCell>(node.cell) && !std::holds_alternative<RuleCell>(node.cell)) {
                    continue;
                }
                if (point_target(node)) {
                    deferred.push_back(p);
                } else {
                    done.emplace_back(std::make_pair(p.row, p.col), route_one(p));
                }
            }
        }
        // Point targets may name points registered by other point-target arrows.
        while (!deferred.empty()) {
            bool progress = false;
            for (auto it = deferred.begin(); it != deferred.end();) {
                if (out_.points.count(*point_target(*it->node)) != 0) {
                    done.emplace_back(std::make_pair(it->row, it->col), route_one(*it));
                    it = deferred.erase(it);
                    progress = true;
                } else {
                    ++it;
                }
            }
            if (!progress) {
                const Pending& p = deferred.front();
                throw CompileError({Diagnostic{Severity::Error, diag::kUnknownPoint,
                                               "unknown point '" + *point_target(*p.node) + "'", p.node->pos}});
            }
        }
        std::stable_sort(done.begin(), done.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& entry : done) out_.arrows.push_back(std::move(entry.second));
        return std::move(out_);
    }

private:
    static const std::optional<Target>& target_of(const CellNode& node) {
        if (const auto* a = std::get_if<ArrowCell>(&node.cell)) return a->target;
        return std::get<RuleCell>(node.cell).target;
    }

    static std::optional<std::string> point_target(const CellNode& node) {
        const auto& t = target_of(node);
        if (t) {
            if (const auto* name = std::get_if<std::string>(&t->where)) return *name;
        }
        return std::nullopt;
    }

    ArrowGeometry route_one(const Pending& p) {
        const CellNode& node = *p.node;
        const auto* arrow = std::get_if<ArrowCell>(&node.cell);
        const auto* rule = std::get_if<RuleCell>(&node.cell);
        ArrowGeometry g;
        g.row = p.row;
        g.col = p.col;
        g.dircode = arrow ? arrow->dircode : rule->dircode;
        g.style = arrow ? arrow->style : "Rule";
        g.is_rule = rule != nullptr;
        const ArrowMods& mods = arrow ? arrow->mods : rule->mods;
        const std::optional<Target>& target = target_of(node);

        if (g.dircode != kDirA && g.dircode != kDirB) {
            const auto [dr, dc] = step_of(g.dircode);
            const auto from = scan(boxes_, C_, R_, p.row, p.col, -dr, -dc);
            const auto to = scan(boxes_, C_, R_, p.row, p.col, dr, dc);
            g.start_cell = from;
            g.end_cell = to;
            g.start = cell_point(grid_, boxes_, from.first, from.second);
            g.end = cell_point(grid_, boxes_, to.first, to.second);
            g.start_box = boxes_.at(from.first, from.second) != nullptr;
            g.end_box = boxes_.at(to.first, to.second) != nullptr;
        } else {
            const Point own{grid_.X[static_cast<std::size_t>(p.col)], grid_.Y[static_cast<std::size_t>(p.row)]};
            Point far;
            std::optional<std::pair<int, int>> far_cell;
            bool far_box = false;
            if (const auto* off = std::get_if<Target::Offset>(&target->where)) {
                const std::int64_t tx = (std::int64_t{p.col} << 16) + off->x.raw;
                const std::int64_t ty = (std::int64_t{p.row} << 16) - off->y.raw;
                if (tx > INT32_MAX || tx < INT32_MIN || ty > INT32_MAX || ty < INT32_MIN) {
                    throw MathError(MathError::Kind::Overflow, "target offset overflow");
                }
                const Sp xunit = axis_unit(grid_.X, registry_.length(Param::XGrid));
                const Sp yunit = axis_unit(grid_.Y, registry_.length(Param::YGrid));
                far = {layout::axis_coord(grid_.X, xunit, Fraction{static_cast<std::int32_t>(tx)}),
                       layout::axis_coord(grid_.Y, yunit, Fraction{static_cast<std::int32_t>(ty)})};
                if ((tx & 0xFFFF) == 0 && (ty & 0xFFFF) == 0) {
                    const int tc = static_cast<int>(tx >> 16);
                    const int tr = static_cast<int>(ty >> 16);
                    if (tc >= 0 && tc <= C_ && tr >= 0 && tr <= R_) {
                        far_cell = std::make_pair(tr, tc);
                        if (const VertexBox* b = boxes_.at(tr, tc)) {
                            far = {b->x, b->y};
                            far_box = true;
                        }
                    }
                }
            } else {
                far = out_.points.at(std::get<std::string>(target->where));
            }
            if (g.dircode == kDirA) {
                g.start = own;
                g.start_cell = std::make_pair(p.row, p.col);
                g.end = far;
                g.end_cell = far_cell;
                g.end_box = far_box;
            } else {
                g.start = far;
                g.start_cell = far_cell;
                g.start_box = far_box;
                g.end = own;
                g.end_cell = std::make_pair(p.row, p.col);
            }
        }

        const auto opt = [](const std::optional<Sp>& v) -> std::int64_t { return v.value_or(0); };
        g.start = {checked(std::int64_t{g.start.x} + opt(mods.tx) + opt(mods.fx)),
                   checked(std::int64_t{g.start.y} - opt(mods.ty) - opt(mods.fy))};
        g.end = {checked(std::int64_t{g.end.x} + opt(mods.hx) + opt(mods.fx)),
                 checked(std::int64_t{g.end.y} - opt(mods.hy) - opt(mods.fy))};
        finish(g, node, arrow, mods);
        return g;
    }

    Sp end_trim(const ArrowGeometry& g, bool at_start, bool box_end, bool joined, Sp rx, Sp ry) const {
        if (joined) return registry_.effective_length(Param::JoinPush, g.style);
        if (box_end) {
            const auto& cell = at_start ? g.start_cell : g.end_cell;
            const VertexBox* box = boxes_.at(cell->first, cell->second);
            return checked(std::int64_t{clip_to_box(*box, rx, ry, g.length, registry_.length(Param::HPad),
                                                    registry_.length(Param::VPad))} +
                           registry_.effective_length(Param::CellPush, g.style));
        }
        return checked(std::int64_t{registry_.effective_length(Param::PtPush, g.style)} +
                       registry_.effective_length(Param::AtPush, g.style));
    }

    void finish(ArrowGeometry& g, const CellNode& node, const ArrowCell* arrow, const ArrowMods& mods) {
        const Sp dx = checked(std::int64_t{g.end.x} - g.start.x);
        const Sp dy = checked(std::int64_t{g.end.y} - g.start.y);

        g.gray = 0;
        if (mods.gray) {
            const std::int32_t raw = mods.gray->use_graygray ? registry_.fraction(Param::GrayGray).raw
                                                             : mods.gray->value->raw;
            if (raw < 0 || raw > Fraction::one().raw) {
                out_.warnings.push_back(Diagnostic{Severity::Warning, diag::kGrayOutOfRange,
                                                   "gray level outside [0,1] ignored", node.pos});
            } else {
                g.gray = raw;
            }
        }
        g.rule_width = mods.rw.value_or(registry_.length(Param::RuleWidth));

        if (dx == 0 && dy == 0) {
            g.suppressed = true;
            g.trimmed_start = g.start;
            g.trimmed_end = g.end;
            register_points(g, node, mods);
            return;
        }
        g.length = arrow_length(dx, dy);
        g.octant = fixedmath::octant(dx, -dy);

        const bool join_tail = mods.join == JoinMode::Tail || mods.join == JoinMode::Both;
        const bool join_head = mods.join == JoinMode::Head || mods.join == JoinMode::Both;
        g.qb = end_trim(g, true, g.start_box, join_tail || (flags_.joined && !g.start_box), dx, dy);
        g.py = end_trim(g, false, g.end_box, join_head || (flags_.joined && !g.end_box), -dx, -dy);
        g.us = checked(std::int64_t{g.length} - g.qb - g.py);
        g.suppressed = suppressed(g.us, registry_);

        g.trimmed_start = {checked(std::int64_t{g.start.x} + fixedmath::mul_div_exact(dx, g.qb, g.length)),
                           checked(std::int64_t{g.start.y} + fixedmath::mul_div_exact(dy, g.qb, g.length))};
        g.trimmed_end = {checked(std::int64_t{g.end.x} - fixedmath::mul_div_exact(dx, g.py, g.length)),
                         checked(std::int64_t{g.end.y} - fixedmath::mul_div_exact(dy, g.py, g.length))};
        register_points(g, node, mods);
        if (g.suppressed) return;

        std::vector<std::pair<Sp, Sp>> holes;
        if (arrow != nullptr) {
            const bool horizontal = dy == 0;
            const Sp labelpad = registry_.effective_length(Param::LabelPad, g.style);
            const Fraction labelpoint = registry_.effective_fraction(Param::LabelPoint, g.style);
            for (const Label& label : arrow->labels) {
                const TextBox box = metrics_.measure(label.text, TextStyle::Label);
                g.labels.push_back(labels::place_label(label, g.trimmed_start, g.trimmed_end, box, labelpad, labelpoint,
                                                       flags_.rotated_labels));
                const bool online = mods.br || (horizontal && (label.code == LabelCode::Lt || label.code == LabelCode::Gt));
                if (!online) continue;
                const Fraction t = label.slide && label.slide->point ? *label.slide->point : labelpoint;
                const Sp center = checked(std::int64_t{g.qb} + fixedmath::scale(g.us, t));
                holes.emplace_back(center, hole_width(box.w, g.style, mods.lw, registry_));
            }
        }
        const bool too_wide =
            std::any_of(holes.begin(), holes.end(), [&](const auto& h) { return h.second > g.us; });
        if (too_wide) {
            out_.warnings.push_back(Diagnostic{Severity::Warning, diag::kHoleTooWide,
                                               "label break is wider than the shaft; shaft omitted", node.pos});
            return;
        }
        g.spans = break_spans(g.qb, checked(std::int64_t{g.length} - g.py), holes);
    }

    void register_points(const ArrowGeometry& g, const CellNode& node, const ArrowMods& mods) {
        for (const PointMark& mark : mods.points) {
            const Fraction f = mark.fraction.value_or(registry_.effective_fraction(Param::PtPoint, g.style));
            const Point pt = labels::point_on(g.trimmed_start, g.trimmed_end, f);
            if (!out_.points.emplace(mark.name, pt).second) {
                throw CompileError({Diagnostic{Severity::Error, diag::kDuplicatePoint,
                                               "point '" + mark.name + "' is already defined", node.pos}});
            }
        }
    }

    const DiagramAst& ast_;
    const BoxTable& boxes_;
    const Grid& grid_;
    const StyleRegistry& registry_;
    const MetricsModel& metrics_;
    RouteFlags flags_;
    int C_ = 0;
    int R_ = 0;
    RouteOutput out_;
};

}  // namespace

std::pair<int, int> step_of(int dircode) {
    switch (dircode) {
        case 1: return {0, 1};
        case 2: return {1, 1};
        case 3: return {1, 0};
        case 4: return {1, -1};
        case 5: return {0, -1};
        case 6: return {-1, -1};
        case 7: return {-1, 0};
        case 8: return {-1, 1};
        default: return {0, 0};
    }
}

std::pair<int, int> scan(const BoxTable& boxes, int C, int R, int row, int col, int drow, int dcol) {
    if (drow == 0 && dcol == 0) return {row, col};
    int r = row;
    int c = col;
    while (true) {
        const int nr = r + drow;
        const int nc = c + dcol;
        if (nr < 0 || nr > R || nc < 0 || nc > C) return {r, c};
        r = nr;
        c = nc;
        if (boxes.at(r, c) != nullptr) return {r, c};
    }
}

Sp label_measure(const std::vector<Label>& labels, const std::string& style, std::optional<Sp> lw,
                 const StyleRegistry& registry, const MetricsModel& metrics) {
    if (labels.empty()) return 0;
    Sp widest = 0;
    for (const Label& l : labels) widest = std::max(widest, metrics.measure(l.text, TextStyle::Label).w);
    const std::int64_t pads = std::int64_t{registry.effective_length(Param::LabelPad, style)} +
                              registry.effective_length(Param::LabelWidthPad, style) + lw.value_or(0);
    return checked(widest + 2 * pads);
}

Sp hole_width(Sp label_width, const std::string& style, std::optional<Sp> lw, const StyleRegistry& registry) {
    const std::int64_t pads = std::int64_t{registry.effective_length(Param::LabelPad, style)} +
                              registry.effective_length(Param::BreakPad, style) + lw.value_or(0);
    return checked(label_width + 2 * pads);
}

Sp clip_to_box(const VertexBox& box, Sp rx, Sp ry, Sp len, Sp hpad, Sp vpad) {
    const Sp ex = checked(std::int64_t{box.w} / 2 + hpad);
    const Sp ey = checked(std::int64_t{ry < 0 ? box.h : box.d} + vpad);
    return fixedmath::clip_distance(ex, ey, rx, ry, len);
}

Sp arrow_length(Sp dx, Sp dy) {
    if (dx == 0) return checked(std::llabs(dy));
    if (dy == 0) return checked(std::llabs(dx));
    return fixedmath::hypot(dx, dy);
}

std::vector<ShaftInterval> break_spans(Sp from, Sp to, const std::vector<std::pair<Sp, Sp>>& holes) {
    std::vector<ShaftInterval> out;
    if (from >= to) return out;
    std::vector<std::pair<std::int64_t, std::int64_t>> cuts;
    for (const auto& [center, width] : holes) {
        const std::int64_t lo = std::int64_t{center} - width / 2;
        cuts.emplace_back(lo, lo + width);
    }
    std::sort(cuts.begin(), cuts.end());
    std::int64_t cur = from;
    for (const auto& [lo, hi] : cuts) {
        if (hi <= cur || lo >= to) continue;
        if (lo > cur) out.push_back({static_cast<Sp>(cur), static_cast<Sp>(lo)});
        cur = std::max(cur, hi);
    }
    if (cur < to) out.push_back({static_cast<Sp>(cur), to});
    return out;
}

bool suppressed(Sp us, const StyleRegistry& registry) { return us < registry.length(Param::MinimumCellLength); }

RouteOutput route(const DiagramAst& ast, const BoxTable& boxes, const Grid& grid, const StyleRegistry& registry,
                  const MetricsModel& metrics, const RouteFlags& flags) {
    return Router(ast, boxes, grid, registry, metrics, flags).run();
}

}  // namespace cdc::router
