#pragma once

// Source to LayoutResult: parse, configure parameters, lay out, route, place.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/diagnostics.hpp"
#include "cdc/dsl.hpp"
#include "cdc/render.hpp"
#include "cdc/styles.hpp"

namespace cdc {

struct ParamSetting {
    std::string name;
    std::string cell;  // empty: global
    std::string value;
    SetMode mode = SetMode::Absolute;
};

/// Parses `name=value`, `name+=value` or `name{Cell}=value`.
std::optional<ParamSetting> parse_setting(std::string_view text);

struct CompileOptions {
    /// Preset deltas applied after the diagram's own options.
    std::optional<DiagramKind> preset;
    /// Overrides the diagram's flexible/fixed choice.
    std::optional<bool> flexible;
    /// Extra flags: gridlines, overgrid, dotted, rotatedlabels, joined,
    /// gravitateleft, gravitateright.
    std::vector<std::string> flags;
    /// Applied last, in order.
    std::vector<ParamSetting> settings;
    /// Defaults to EmMetrics when null.
    std::shared_ptr<const MetricsModel> metrics;
};

/// Applies a kind's parameter deltas; returns whether the kind is flexible.
bool apply_preset(StyleRegistry& registry, DiagramKind kind);

/// Everything decided before layout runs. Cheap; used for cache lookups.
struct Prepared {
    DiagramAst ast;
    StyleRegistry registry;
    std::shared_ptr<const MetricsModel> metrics;
    std::vector<std::string> flags;  // effective, sorted
    bool flexible = false;
    std::string canonical;
    std::string digest;  // sha256 hex of canonical form plus configuration
    std::vector<Diagnostic> warnings;

    bool has(std::string_view flag) const;
};

/// Throws CompileError.
Prepared prepare(std::string_view source, const CompileOptions& options);

/// Throws CompileError; numeric failures surface as E107.
LayoutResult run_layout(const Prepared& prepared, std::vector<Diagnostic>* warnings = nullptr);

struct Compiled {
    Prepared prepared;
    LayoutResult layout;
    std::vector<Diagnostic> warnings;
};

Compiled compile(std::string_view source, const CompileOptions& options);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace cdc
