#pragma once

// Arrow geometry: endpoint scanning, box clipping, pushes, shaft breaks,
// suppression and named points.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdc/diagnostics.hpp"
#include "cdc/labels.hpp"
#include "cdc/layout.hpp"

namespace cdc {

/// Drawn part of a shaft as along-arrow distances from the untrimmed start.
struct ShaftInterval {
    Sp from = 0;
    Sp to = 0;

    friend bool operator==(const ShaftInterval&, const ShaftInterval&) = default;
};

struct ArrowGeometry {
    int row = 0;
    int col = 0;
    int dircode = 1;
    std::string style;
    bool is_rule = false;
    Point start;  // anchors after endpoint offsets
    Point end;
    std::optional<std::pair<int, int>> start_cell;
    std::optional<std::pair<int, int>> end_cell;
    bool start_box = false;
    bool end_box = false;
    Sp length = 0;
    Sp qb = 0;  // start trim
    Sp py = 0;  // end trim
    Sp us = 0;  // length - qb - py
    std::optional<Octant> octant;
    bool suppressed = false;
    Point trimmed_start;
    Point trimmed_end;
    std::vector<ShaftInterval> spans;
    std::vector<LabelAnchor> labels;
    std::int32_t gray = 0;  // 16.16
    Sp rule_width = 0;
};

using PointTable = std::map<std::string, Point, std::less<>>;

struct RouteFlags {
    bool joined = false;
    bool rotated_labels = false;
};

namespace router {

/// (drow, dcol) for a compass code; rows grow downward.
std::pair<int, int> step_of(int dircode);

/// Walk from (row, col) by the step until a recorded box, or stop at the last
/// in-range cell.
std::pair<int, int> scan(const BoxTable& boxes, int C, int R, int row, int col, int drow, int dcol);

/// Widest label plus both side pads, as seen by arrow-length stretches.
Sp label_measure(const std::vector<Label>& labels, const std::string& style, std::optional<Sp> lw,
                 const StyleRegistry& registry, const MetricsModel& metrics);

Sp hole_width(Sp label_width, const std::string& style, std::optional<Sp> lw, const StyleRegistry& registry);

/// Along-arrow distance from a box anchor to the padded box edge for a ray
/// leaving the anchor with document-space direction (rx, ry).
Sp clip_to_box(const VertexBox& box, Sp rx, Sp ry, Sp len, Sp hpad, Sp vpad);

/// Length used for an arrow: |delta| when axis-aligned, hypot otherwise.
Sp arrow_length(Sp dx, Sp dy);

/// Split [from, to] around centered holes (center, width). Holes wider than the
/// whole interval remove everything.
std::vector<ShaftInterval> break_spans(Sp from, Sp to, const std::vector<std::pair<Sp, Sp>>& holes);

bool suppressed(Sp us, const StyleRegistry& registry);

struct RouteOutput {
    std::vector<ArrowGeometry> arrows;
    PointTable points;
    std::vector<Diagnostic> warnings;
};

RouteOutput route(const DiagramAst& ast, const BoxTable& boxes, const Grid& grid, const StyleRegistry& registry,
                  const MetricsModel& metrics, const RouteFlags& flags);

}  // namespace router
}  // namespace cdc
