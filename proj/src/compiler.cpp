#include "cdc/compiler.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>

#include "cdc/layout.hpp"
#include "cdc/router.hpp"

namespace cdc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_parameter(const std::string& message, SourcePos pos = {}) {
    throw CompileError({Diagnostic{Severity::Error, diag::kBadParameter, message, pos}});
}

void set_checked(StyleRegistry& registry, std::string_view name, std::string_view cell, std::string_view value,
                 SetMode mode) {
    try {
        registry.set_param(name, cell, value, mode);
    } catch (const StyleError& e) {
        bad_parameter(e.what());
    } catch (const MathError& e) {
        bad_parameter(std::string(name) + ": " + e.what());
    }
}

}  // namespace

std::optional<ParamSetting> parse_setting(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) return std::nullopt;
    ParamSetting s;
    std::string_view lhs = text.substr(0, eq);
    if (lhs.back() == '+') {
        s.mode = SetMode::Relative;
        lhs.remove_suffix(1);
    }
    lhs = trim(lhs);
    const auto brace = lhs.find('{');
    if (brace != std::string_view::npos) {
        if (lhs.back() != '}') return std::nullopt;
        s.cell = std::string(trim(lhs.substr(brace + 1, lhs.size() - brace - 2)));
        lhs = trim(lhs.substr(0, brace));
    }
    if (lhs.empty()) return std::nullopt;
    s.name = std::string(lhs);
    s.value = std::string(trim(text.substr(eq + 1)));
    return s;
}

bool apply_preset(StyleRegistry& registry, DiagramKind kind) {
    switch (kind) {
        case DiagramKind::Diagram:
        case DiagramKind::Graph: return false;
        case DiagramKind::Diag:
            registry.set_param("xgrid", "", "0pt", SetMode::Absolute);
            return true;
        case DiagramKind::Dg:
            registry.set_param("xgrid", "", "0pt", SetMode::Absolute);
            registry.set_param("ygrid", "", "-2mm", SetMode::Relative);
            registry.set_param("cellwidth", "", "3mm", SetMode::Relative);
            registry.set_param("bracewidth", "", "-2.5mm", SetMode::Relative);
            return true;
        case DiagramKind::Long:
            registry.set_param("xgrid", "", "0pt", SetMode::Absolute);
            registry.set_param("ygrid", "", "-5mm", SetMode::Relative);
            registry.set_param("bracewidth", "", "-2.5mm", SetMode::Relative);
            return true;
    }
    return false;
}

bool Prepared::has(std::string_view flag) const { return std::binary_search(flags.begin(), flags.end(), flag); }

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 15];
    }
    return out;
}

Prepared prepare(std::string_view source, const CompileOptions& options) {
    const StyleRegistry catalog = StyleRegistry::builtin();
    ParseOutput parsed = parse(source, catalog);
    Prepared p{std::move(parsed.ast), catalog, options.metrics, {}, false, {}, {}, std::move(parsed.warnings)};
    if (!p.metrics) p.metrics = std::make_shared<EmMetrics>();

    bool flexible = apply_preset(p.registry, p.ast.kind);
    for (const OptionAssign& a : p.ast.options.assigns) set_checked(p.registry, a.name, a.cell, a.value, a.mode);
    if (options.preset && apply_preset(p.registry, *options.preset)) flexible = true;
    for (const ParamSetting& s : options.settings) set_checked(p.registry, s.name, s.cell, s.value, s.mode);

    std::vector<std::string> flags = p.ast.options.flags;
    const auto cli_has = [&](std::string_view f) {
        return std::find(options.flags.begin(), options.flags.end(), f) != options.flags.end();
    };
    // A command-line gravity choice replaces the diagram's.
    if (cli_has("gravitateleft") || cli_has("gravitateright")) {
        std::erase_if(flags, [](const std::string& f) { return f == "gravitateleft" || f == "gravitateright"; });
    }
    if (p.ast.options.has("flexible")) flexible = true;
    if (p.ast.options.has("fixed")) flexible = false;
    if (options.flexible) flexible = *options.flexible;
    flags.insert(flags.end(), options.flags.begin(), options.flags.end());
    std::erase_if(flags, [](const std::string& f) { return f == "flexible" || f == "fixed"; });
    std::sort(flags.begin(), flags.end());
    flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
    if (std::binary_search(flags.begin(), flags.end(), "gravitateleft") &&
        std::binary_search(flags.begin(), flags.end(), "gravitateright")) {
        bad_parameter("gravitateleft and gravitateright conflict");
    }
    p.flags = std::move(flags);
    p.flexible = flexible;

    p.canonical = canonicalize(p.ast);
    std::string config = p.canonical;
    config += "\n--registry\n" + p.registry.fingerprint();
    config += "\n--metrics\n" + p.metrics->fingerprint();
    config += "\n--flags\n";
    for (const auto& f : p.flags) config += f + ",";
    config += p.flexible ? "flexible" : "fixed";
    p.digest = sha256_hex(config);
    return p;
}

LayoutResult run_layout(const Prepared& p, std::vector<Diagnostic>* warnings) {
    try {
        LayoutResult out;
        out.kind = p.ast.kind;
        out.boxes = layout::collect_vertices(p.ast, *p.metrics);
        const LayoutFlags lf{p.flexible, p.has("gravitateleft"), p.has("gravitateright")};
        out.grid = layout::run(p.ast, out.boxes, p.registry, *p.metrics, lf, &out.constraints);
        router::RouteOutput routed =
            router::route(p.ast, out.boxes, out.grid, p.registry, *p.metrics, {p.has("joined"), p.has("rotatedlabels")});
        out.arrows = std::move(routed.arrows);
        out.points = std::move(routed.points);
        if (warnings) warnings->insert(warnings->end(), routed.warnings.begin(), routed.warnings.end());
        const RenderFlags rf{p.has("gridlines"), p.has("overgrid"), p.has("dotted")};
        auto items = render::build_items(p.ast, out.grid, out.boxes, out.arrows, p.registry, *p.metrics, rf);
        const Sp pad = p.ast.kind == DiagramKind::Graph ? p.registry.length(Param::GraphPad)
                                                         : p.registry.length(Param::DiagramPad);
        render::place_document(out, std::move(items), pad);
        out.rows = static_cast<int>(p.ast.rows.size());
        out.baseline_row = out.grid.baseline_row;
        out.gravity = out.grid.gravity;
        for (const ParamInfo& info : param_table()) {
            out.parameters[std::string(info.name)] =
                info.type == ParamType::Length ? p.registry.length(info.param) : p.registry.fraction(info.param).raw;
        }
        return out;
    } catch (const MathError& e) {
        throw CompileError({Diagnostic{Severity::Error, diag::kNumeric, e.what(), SourcePos{}}});
    } catch (const std::invalid_argument& e) {
        throw CompileError({Diagnostic{Severity::Error, diag::kNumeric, e.what(), SourcePos{}}});
    }
}

Compiled compile(std::string_view source, const CompileOptions& options) {
    Compiled c{prepare(source, options), {}, {}};
    c.warnings = c.prepared.warnings;
    c.layout = run_layout(c.prepared, &c.warnings);
    return c;
}

}  // namespace cdc
