#include "cdc/layout.hpp"

#include <algorithm>
#include <limits>

#include "cdc/router.hpp"

namespace cdc {

namespace {

Sp add_checked(std::int64_t a, std::int64_t b) {
    const std::int64_t r = a + b;
    if (r > (1LL << 30) - 1 || r < -((1LL << 30) - 1)) {
        throw MathError(MathError::Kind::Overflow, "layout coordinate overflow");
    }
    return static_cast<Sp>(r);
}

}  // namespace

void BoxTable::add(VertexBox box) {
    index_[{box.row, box.col}] = boxes_.size();
    boxes_.push_back(box);
}

const VertexBox* BoxTable::at(int row, int col) const {
    const auto it = index_.find({row, col});
    return it == index_.end() ? nullptr : &boxes_[it->second];
}

VertexBox* BoxTable::at(int row, int col) {
    const auto it = index_.find({row, col});
    return it == index_.end() ? nullptr : &boxes_[it->second];
}

std::string_view constraint_kind_name(Constraint::Kind k) {
    switch (k) {
        case Constraint::Kind::A: return "A";
        case Constraint::Kind::W: return "W";
        case Constraint::Kind::C: return "C";
    }
    return "C";
}

void Bindings::bind(int follower, int leader) {
    auto& list = followers[static_cast<std::size_t>(leader)];
    if (std::find(list.begin(), list.end(), follower) == list.end()) list.push_back(follower);
}

std::vector<int> Bindings::closure(int col) const {
    std::vector<int> out{col};
    std::vector<bool> seen(followers.size(), false);
    seen[static_cast<std::size_t>(col)] = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int f : followers[static_cast<std::size_t>(out[i])]) {
            if (!seen[static_cast<std::size_t>(f)]) {
                seen[static_cast<std::size_t>(f)] = true;
                out.push_back(f);
            }
        }
    }
    return out;
}

namespace layout {

std::pair<int, int> grid_extent(const DiagramAst& ast) {
    int C = std::max(static_cast<int>(ast.column_count()) - 1, 0);
    int R = std::max(static_cast<int>(ast.rows.size()) - 1, 0);
    if (ast.kind == DiagramKind::Graph) {
        if (ast.graph.width) C = std::max(C, *ast.graph.width);
        if (ast.graph.height) R = std::max(R, *ast.graph.height);
        if (ast.graph.xrange) C = std::max(C, ast.graph.xrange->second - ast.graph.xrange->first);
        if (ast.graph.yrange) R = std::max(R, ast.graph.yrange->second - ast.graph.yrange->first);
    }
    return {C, R};
}

BoxTable collect_vertices(const DiagramAst& ast, const MetricsModel& metrics) {
    BoxTable table;
    const int C = grid_extent(ast).first;
    for (std::size_t r = 0; r < ast.rows.size(); ++r) {
        for (std::size_t c = 0; c < ast.rows[r].size(); ++c) {
            const auto* v = std::get_if<VertexCell>(&ast.rows[r][c].cell);
            if (v == nullptr) continue;
            const TextBox box = metrics.measure(v->text, TextStyle::Vertex);
            if (std::int64_t{box.w} + box.h + box.d <= 0 && !v->stop) continue;
            VertexBox vb;
            vb.row = static_cast<int>(r);
            vb.col = static_cast<int>(c);
            vb.w = box.w;
            vb.h = box.h;
            vb.d = box.d;
            if (v->span) vb.span = std::min(v->span->columns, C - vb.col);
            table.add(vb);
        }
    }
    return table;
}

Grid fixed_positions(int C, int R, const StyleRegistry& registry) {
    Grid g;
    const Sp xgrid = registry.length(Param::XGrid);
    const Sp ygrid = registry.length(Param::YGrid);
    for (int c = 0; c <= C; ++c) g.X.push_back(add_checked(0, std::int64_t{c} * xgrid));
    for (int r = 0; r <= R; ++r) g.Y.push_back(add_checked(0, std::int64_t{r} * ygrid));
    return g;
}

int gravity_default(int C, const LayoutFlags& flags, std::optional<int> grav_col) {
    if (grav_col) return 10 * *grav_col;
    if (flags.gravitate_left) return 0;
    if (flags.gravitate_right) return 10 * C;
    return 5 * C;
}

std::vector<Constraint> build_constraints(const DiagramAst& ast, const BoxTable& boxes,
                                          const StyleRegistry& registry, const MetricsModel& metrics) {
    const auto [C, R] = grid_extent(ast);
    std::vector<Constraint> out;
    auto width_at = [&](int r, int c) -> Sp {
        const VertexBox* b = boxes.at(r, c);
        return b ? b->w : 0;
    };
    const Sp cellwidth = registry.length(Param::CellWidth);

    for (std::size_t r = 0; r < ast.rows.size(); ++r) {
        for (std::size_t c = 0; c < ast.rows[r].size(); ++c) {
            const auto* a = std::get_if<ArrowCell>(&ast.rows[r][c].cell);
            if (a == nullptr || a->mods.nw) continue;
            const int row = static_cast<int>(r);
            const int col = static_cast<int>(c);
            std::pair<int, int> p1;
            std::pair<int, int> p2;
            if (a->dircode == 1 || a->dircode == 5) {
                p1 = router::scan(boxes, C, R, row, col, 0, -1);
                p2 = router::scan(boxes, C, R, row, col, 0, 1);
            } else if (a->dircode == kDirA || a->dircode == kDirB) {
                const auto* off = a->target ? std::get_if<Target::Offset>(&a->target->where) : nullptr;
                if (off == nullptr || off->y.raw != 0 || off->x.raw % 65536 != 0) continue;
                const int tc = col + off->x.raw / 65536;
                if (tc < 0 || tc > C) continue;
                p1 = {row, col};
                p2 = {row, tc};
            } else {
                continue;
            }
            if (p1.second > p2.second) std::swap(p1, p2);
            if (p1.second == p2.second) continue;
            const Sp lmeas = router::label_measure(a->labels, a->style, a->mods.lw, registry, metrics);
            const std::int64_t req = std::int64_t{width_at(p1.first, p1.second)} / 2 +
                                     width_at(p2.first, p2.second) / 2 + std::max(lmeas, cellwidth);
            out.push_back({Constraint::Kind::A, p1.second, p2.second, add_checked(0, req), 0});
        }
    }

    for (std::size_t r = 0; r < ast.rows.size(); ++r) {
        for (std::size_t c = 0; c < ast.rows[r].size(); ++c) {
            const auto* v = std::get_if<VertexCell>(&ast.rows[r][c].cell);
            if (v == nullptr || !v->span) continue;
            if (v->span->mode >= 2) {
                throw CompileError({Diagnostic{Severity::Error, diag::kUnsupportedSpan,
                                               "span mode " + std::to_string(v->span->mode) + " is not supported",
                                               ast.rows[r][c].pos}});
            }
            const int c1 = static_cast<int>(c);
            const int c2 = std::min(c1 + v->span->columns, C);
            if (c2 <= c1) continue;
            Sp req = registry.length(Param::ColumnDist);
            if (v->span->loose) req = 0;
            else if (v->span->mode == 1) req = registry.length(Param::BraceWidth);
            out.push_back({Constraint::Kind::W, c1, c2, req, 0});
        }
    }

    const Sp xgrid = registry.length(Param::XGrid);
    for (int c = 0; c < C; ++c) {
        Sp req = xgrid;
        for (int r = 0; r <= R; ++r) {
            const VertexBox* l = boxes.at(r, c);
            const VertexBox* rt = boxes.at(r, c + 1);
            const Sp wl = l && l->span == 0 ? l->w : 0;
            const Sp wr = rt && rt->span == 0 ? rt->w : 0;
            req = std::max(req, add_checked(0, (std::int64_t{wl} + wr) / 2));
        }
        out.push_back({Constraint::Kind::C, c, c + 1, req, 0});
    }

    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
    return out;
}

Sp deficiency(const Constraint& c, const std::vector<Sp>& X) {
    return add_checked(c.required, -(std::int64_t{X[static_cast<std::size_t>(c.c2)]} - X[static_cast<std::size_t>(c.c1)]));
}

SolveResult flexible_solve(const std::vector<Constraint>& constraints, int C, int gravity) {
    SolveResult res;
    res.X.assign(static_cast<std::size_t>(C) + 1, 0);
    res.bindings = Bindings(static_cast<std::size_t>(C) + 1);
    auto move = [&](int col, std::int64_t amount) {
        for (int k : res.bindings.closure(col)) {
            auto& x = res.X[static_cast<std::size_t>(k)];
            x = add_checked(x, amount);
        }
    };
    const int cap = 10 * std::max(C, 1);
    for (int pass = 0; pass < cap; ++pass) {
        bool changed = false;
        for (const Constraint& con : constraints) {
            const Sp delta = deficiency(con, res.X);
            if (delta <= 0) continue;
            changed = true;
            const std::int64_t di = 10LL * con.c1 - gravity;
            const std::int64_t dj = 10LL * con.c2 - gravity;
            if (di * dj < 0) {
                const Sp left = delta / 2;
                move(con.c1, -left);
                move(con.c2, delta - left);
            } else if (di < 0) {
                move(con.c1, -delta);
                res.bindings.bind(con.c1, con.c2);
            } else {
                move(con.c2, delta);
                res.bindings.bind(con.c2, con.c1);
            }
        }
        res.passes = pass + 1;
        if (!changed) return res;
    }
    for (const Constraint& con : constraints) {
        if (deficiency(con, res.X) > 0) {
            throw CompileError({Diagnostic{Severity::Error, diag::kNoConvergence,
                                           "column solver did not converge within " + std::to_string(cap) + " passes",
                                           SourcePos{}}});
        }
    }
    return res;
}

void apply_movement(std::vector<Sp>& X, const Bindings& bindings, const BoxTable& boxes, MoveKind kind, int row,
                    int col, const std::variant<std::monostate, Sp, Fraction>& value) {
    const bool on_rows = kind == MoveKind::Dy || kind == MoveKind::My;
    const int idx = on_rows ? row : col;
    const int n = static_cast<int>(X.size());
    if (idx < 0 || idx >= n) return;

    std::int64_t amount = 0;
    if (const auto* len = std::get_if<Sp>(&value)) {
        amount = *len;
    } else if (const auto* f = std::get_if<Fraction>(&value)) {
        if (idx + 1 < n) {
            const Sp gap = add_checked(X[static_cast<std::size_t>(idx) + 1], -std::int64_t{X[static_cast<std::size_t>(idx)]});
            amount = fixedmath::scale(gap, *f);
        }
    } else {
        // Edge moves: close the gap to the nearest box in the same row.
        const VertexBox* self = boxes.at(row, col);
        const Sp w = self ? self->w : 0;
        const bool leftward = kind == MoveKind::Dl || kind == MoveKind::Ml || kind == MoveKind::Al;
        const VertexBox* other = nullptr;
        if (leftward) {
            for (int c = col - 1; c >= 0 && other == nullptr; --c) other = boxes.at(row, c);
        } else {
            for (int c = col + 1; c < n && other == nullptr; ++c) other = boxes.at(row, c);
        }
        if (other == nullptr) return;
        const std::int64_t dist = std::int64_t{X[static_cast<std::size_t>(col)]} - X[static_cast<std::size_t>(other->col)];
        const std::int64_t gap = (dist < 0 ? -dist : dist) - (std::int64_t{w} + other->w) / 2;
        amount = leftward ? -gap : gap;
    }

    auto shift = [&](int k) {
        auto& x = X[static_cast<std::size_t>(k)];
        x = add_checked(x, amount);
    };
    switch (kind) {
        case MoveKind::Dx:
        case MoveKind::Dy:
        case MoveKind::Dl:
            for (int k = idx; k < n; ++k) shift(k);
            break;
        case MoveKind::Dr:
            for (int k = 0; k <= idx; ++k) shift(k);
            break;
        case MoveKind::Mx:
        case MoveKind::My:
        case MoveKind::Ml:
        case MoveKind::Mr:
            shift(idx);
            break;
        case MoveKind::Ax:
        case MoveKind::Al:
        case MoveKind::Ar:
            if (static_cast<std::size_t>(idx) < bindings.followers.size()) {
                for (int k : bindings.closure(idx)) shift(k);
            } else {
                shift(idx);
            }
            break;
    }
}

Sp axis_coord(const std::vector<Sp>& axis, Sp unit, Fraction t) {
    const int n = static_cast<int>(axis.size());
    if (n == 0) return 0;
    if (t.raw < 0) {
        return add_checked(axis[0], -std::int64_t{fixedmath::scale(unit, Fraction{-t.raw})});
    }
    const int i = t.raw >> 16;
    const Fraction f{t.raw & 0xFFFF};
    if (i < n - 1) {
        const Sp gap = add_checked(axis[static_cast<std::size_t>(i) + 1], -std::int64_t{axis[static_cast<std::size_t>(i)]});
        return add_checked(axis[static_cast<std::size_t>(i)], fixedmath::scale(gap, f));
    }
    const std::int64_t whole = std::int64_t{i - (n - 1)} * unit;
    return add_checked(add_checked(axis.back(), whole), fixedmath::scale(unit, f));
}

std::pair<Sp, Sp> graph_coords(const Grid& grid, Sp xunit, Sp yunit, Fraction x, Fraction y) {
    const std::int64_t row = (std::int64_t{grid.last_row()} << 16) - y.raw;
    if (row > std::numeric_limits<std::int32_t>::max() || row < std::numeric_limits<std::int32_t>::min()) {
        throw MathError(MathError::Kind::Overflow, "graph coordinate overflow");
    }
    // Rows below the origin grow downward, so the lookup runs on row indices.
    return {axis_coord(grid.X, xunit, x), axis_coord(grid.Y, yunit, Fraction{static_cast<std::int32_t>(row)})};
}

Grid run(const DiagramAst& ast, BoxTable& boxes, const StyleRegistry& registry, const MetricsModel& metrics,
         const LayoutFlags& flags, std::vector<Constraint>* constraints_out) {
    const auto [C, R] = grid_extent(ast);
    Grid grid = fixed_positions(C, R, registry);
    grid.flexible = flags.flexible;

    std::optional<int> grav_col;
    for (std::size_t r = 0; r < ast.rows.size(); ++r) {
        for (std::size_t c = 0; c < ast.rows[r].size(); ++c) {
            if (const auto* v = std::get_if<VertexCell>(&ast.rows[r][c].cell)) {
                if (v->grav && !grav_col) grav_col = static_cast<int>(c);
                if (v->base && !grid.baseline_row) grid.baseline_row = static_cast<int>(r);
            }
        }
    }
    grid.gravity = gravity_default(C, flags, grav_col);

    Bindings bindings(static_cast<std::size_t>(C) + 1);
    std::vector<Constraint> constraints = build_constraints(ast, boxes, registry, metrics);
    if (flags.flexible) {
        SolveResult solved = flexible_solve(constraints, C, grid.gravity);
        grid.X = std::move(solved.X);
        bindings = std::move(solved.bindings);
        grid.passes = solved.passes;
    }
    grid.solved_x = grid.X;
    if (constraints_out) *constraints_out = std::move(constraints);

    static constexpr MoveKind kOrder[] = {MoveKind::Dx, MoveKind::Ax, MoveKind::Mx, MoveKind::Dl,
                                          MoveKind::Dr, MoveKind::Al, MoveKind::Ar, MoveKind::Ml,
                                          MoveKind::Mr, MoveKind::Dy, MoveKind::My};
    for (MoveKind kind : kOrder) {
        const bool on_rows = kind == MoveKind::Dy || kind == MoveKind::My;
        for (std::size_t r = 0; r < ast.rows.size(); ++r) {
            for (std::size_t c = 0; c < ast.rows[r].size(); ++c) {
                const auto* v = std::get_if<VertexCell>(&ast.rows[r][c].cell);
                if (v == nullptr) continue;
                for (const Movement& m : v->movements) {
                    if (m.kind != kind) continue;
                    apply_movement(on_rows ? grid.Y : grid.X, bindings, boxes, kind, static_cast<int>(r),
                                   static_cast<int>(c), m.value);
                }
            }
        }
    }

    const Sp minx = *std::min_element(grid.X.begin(), grid.X.end());
    const Sp miny = *std::min_element(grid.Y.begin(), grid.Y.end());
    for (auto& x : grid.X) x = add_checked(x, -std::int64_t{minx});
    for (auto& y : grid.Y) y = add_checked(y, -std::int64_t{miny});
    const Sp solved_min = *std::min_element(grid.solved_x.begin(), grid.solved_x.end());
    for (auto& x : grid.solved_x) x = add_checked(x, -std::int64_t{solved_min});

    for (VertexBox& b : boxes.all()) {
        const Sp x0 = grid.X[static_cast<std::size_t>(b.col)];
        const Sp x1 = grid.X[static_cast<std::size_t>(b.col + b.span)];
        b.x = static_cast<Sp>((std::int64_t{x0} + x1) / 2);
        b.y = grid.Y[static_cast<std::size_t>(b.row)];
    }

    const Sp left = *std::min_element(grid.X.begin(), grid.X.end());
    const Sp right = *std::max_element(grid.X.begin(), grid.X.end());
    const Sp top = *std::min_element(grid.Y.begin(), grid.Y.end());
    const Sp bottom = *std::max_element(grid.Y.begin(), grid.Y.end());
    grid.width = right - left;
    grid.height = bottom - top;
    for (const VertexBox& b : boxes.all()) {
        grid.margin_left = std::max<Sp>(grid.margin_left, add_checked(b.w / 2, -(std::int64_t{b.x} - left)));
        grid.margin_right = std::max<Sp>(grid.margin_right, add_checked(std::int64_t{b.x} + b.w / 2, -std::int64_t{right}));
        grid.margin_top = std::max<Sp>(grid.margin_top, add_checked(b.h, -(std::int64_t{b.y} - top)));
        grid.margin_bottom = std::max<Sp>(grid.margin_bottom, add_checked(std::int64_t{b.y} + b.d, -std::int64_t{bottom}));
    }
    return grid;
}

}  // namespace layout
}  // namespace cdc
