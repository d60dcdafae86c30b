#pragma once

// Column and row positions: the fixed grid, or the flexible solver that starts
// every column at 0 and widens gaps until every stretch is satisfied.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cdc/dsl.hpp"
#include "cdc/fixedmath.hpp"
#include "cdc/styles.hpp"

namespace cdc {

/// Measured vertex. (x, y) is the anchor after layout; y is the row axis.
struct VertexBox {
    int row = 0;
    int col = 0;
    Sp w = 0;
    Sp h = 0;
    Sp d = 0;
    int span = 0;  // extra columns covered by a \W span
    Sp x = 0;
    Sp y = 0;

    friend bool operator==(const VertexBox&, const VertexBox&) = default;
};

class BoxTable {
public:
    void add(VertexBox box);
    const VertexBox* at(int row, int col) const;
    VertexBox* at(int row, int col);
    const std::vector<VertexBox>& all() const { return boxes_; }
    std::vector<VertexBox>& all() { return boxes_; }

private:
    std::vector<VertexBox> boxes_;
    std::map<std::pair<int, int>, std::size_t> index_;
};

struct Constraint {
    enum class Kind { A, W, C };
    Kind kind = Kind::C;
    int c1 = 0;
    int c2 = 0;
    Sp required = 0;
    int index = 0;
};

std::string_view constraint_kind_name(Constraint::Kind k);

/// Directional bindings: moving a column drags every follower, transitively.
struct Bindings {
    std::vector<std::vector<int>> followers;

    explicit Bindings(std::size_t n = 0) : followers(n) {}
    void bind(int follower, int leader);
    /// The column and everything reachable from it, each once.
    std::vector<int> closure(int col) const;
};

struct Grid {
    std::vector<Sp> X;  // column centers
    std::vector<Sp> Y;  // row axes, growing downward
    std::vector<Sp> solved_x;  // solver output before movements and normalization
    Sp width = 0;
    Sp height = 0;
    Sp margin_left = 0;
    Sp margin_right = 0;
    Sp margin_top = 0;
    Sp margin_bottom = 0;
    std::optional<int> baseline_row;
    int gravity = 0;  // tenths of a column
    int passes = 0;
    bool flexible = false;

    int last_col() const { return static_cast<int>(X.size()) - 1; }
    int last_row() const { return static_cast<int>(Y.size()) - 1; }
};

struct LayoutFlags {
    bool flexible = false;
    bool gravitate_left = false;
    bool gravitate_right = false;
};

namespace layout {

/// Grid extent in last-index form: C = columns - 1, R = rows - 1.
std::pair<int, int> grid_extent(const DiagramAst& ast);

BoxTable collect_vertices(const DiagramAst& ast, const MetricsModel& metrics);

Grid fixed_positions(int C, int R, const StyleRegistry& registry);

/// 5*C by default; 0 or 10*C when gravitating; 10*col for a \grav marker.
int gravity_default(int C, const LayoutFlags& flags, std::optional<int> grav_col = std::nullopt);

std::vector<Constraint> build_constraints(const DiagramAst& ast, const BoxTable& boxes,
                                          const StyleRegistry& registry, const MetricsModel& metrics);

/// required - (X[c2] - X[c1]); positive means violated.
Sp deficiency(const Constraint& c, const std::vector<Sp>& X);

struct SolveResult {
    std::vector<Sp> X;
    Bindings bindings;
    int passes = 0;
};

/// Throws CompileError(E108) if the pass cap is reached with a violation left.
SolveResult flexible_solve(const std::vector<Constraint>& constraints, int C, int gravity);

/// One column or row movement. `value` is a length, a fraction of the next gap,
/// or nothing for the edge moves.
void apply_movement(std::vector<Sp>& X, const Bindings& bindings, const BoxTable& boxes, MoveKind kind,
                    int row, int col, const std::variant<std::monostate, Sp, Fraction>& value);

/// Coordinate along one axis: integer part indexes `axis`, the fraction
/// interpolates the following gap; beyond the ends the step is `unit`.
Sp axis_coord(const std::vector<Sp>& axis, Sp unit, Fraction t);

/// Graph coordinates: x rightward in columns, y upward in rows from the last row.
std::pair<Sp, Sp> graph_coords(const Grid& grid, Sp xunit, Sp yunit, Fraction x, Fraction y);

/// Full layout: positions, movements, normalization, box anchors, margins.
Grid run(const DiagramAst& ast, BoxTable& boxes, const StyleRegistry& registry, const MetricsModel& metrics,
         const LayoutFlags& flags, std::vector<Constraint>* constraints_out = nullptr);

}  // namespace layout
}  // namespace cdc
