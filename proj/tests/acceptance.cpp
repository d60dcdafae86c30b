// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--fuzz-seconds N] [--seed S]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdc/cache.hpp"
#include "cdc/compiler.hpp"
#include "cdc/dsl.hpp"
#include "cdc/fixedmath.hpp"
#include "cdc/render.hpp"
#include "cdc/styles.hpp"
#include "support/testkit.hpp"

using namespace cdc;

namespace {

/// Collects failure notes for one criterion; the first few are printed.
class Report {
public:
    void fail(const std::string& note) {
        if (notes_.size() < 5) notes_.push_back(note);
        ++failures_;
    }
    void check(bool ok, const std::string& note) {
        if (!ok) fail(note);
    }
    void info(const std::string& note) { infos_.push_back(note); }
    bool ok() const { return failures_ == 0; }
    long failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }
    const std::vector<std::string>& infos() const { return infos_; }

private:
    long failures_ = 0;
    std::vector<std::string> notes_;
    std::vector<std::string> infos_;
};

std::string str(long double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------------------

void defaults(Report& r) {
    constexpr Sp k1cm = 1864679;
    const std::pair<Param, std::int32_t> expected[] = {
        {Param::Grid, k1cm},          {Param::XGrid, k1cm},         {Param::YGrid, k1cm},
        {Param::Range, 65536},        {Param::DiagramPad, 327680},  {Param::FigurePad, 0},
        {Param::GraphPad, 0},         {Param::VPad, 0},             {Param::HPad, 0},
        {Param::GridGray, 32768},     {Param::FrameGray, 0},        {Param::ShadeGray, 0},
        {Param::GrayGray, 32768},     {Param::FramePad, 327680},    {Param::FrameRuleWidth, 26214},
        {Param::FrameRuleWidthOuter, 26214}, {Param::RuleWidth, 327680}, {Param::CellLength, k1cm},
        {Param::CellWidth, k1cm},     {Param::ColumnDist, 2797019}, {Param::BraceWidth, k1cm},
        {Param::MinimumCellLength, 0}, {Param::LabelPoint, 32768},  {Param::PtPoint, 32768},
        {Param::LabelWidthPad, 327680}, {Param::LabelPad, 196608},  {Param::BreakPad, 163840},
        {Param::CellPush, 131072},    {Param::PtPush, 0},           {Param::AtPush, 196608},
        {Param::JoinPush, -65536},
    };
    const StyleRegistry reg = StyleRegistry::builtin();
    r.check(std::size(expected) == kParamCount, "parameter table size " + std::to_string(kParamCount));
    for (const auto& [p, raw] : expected) {
        const ParamInfo& info = param_info(p);
        const std::int32_t got = info.type == ParamType::Length ? reg.length(p) : reg.fraction(p).raw;
        r.check(got == raw, std::string(info.name) + " = " + std::to_string(got) + ", want " + std::to_string(raw));
    }
    for (const char* cell : {"Two", "Impl", "Bar", "Null", "Eq"}) {
        for (Param p : {Param::LabelPad, Param::AtPush, Param::BreakPad}) {
            r.check(reg.per_cell(p, cell) == 52429, std::string(cell) + " " + std::string(param_info(p).name));
        }
    }
    for (Param p : {Param::CellPush, Param::PtPush, Param::JoinPush}) {
        r.check(reg.per_cell(p, "Rule") == 65536, "Rule " + std::string(param_info(p).name));
    }
    r.info(std::to_string(std::size(expected)) + " globals, 15 double-class and 3 Rule overrides");
}

// ---------------------------------------------------------------------------

void math_kernel(Report& r) {
    using namespace fixedmath;
    std::mt19937_64 rng(20261016);

    for (std::int32_t n = 0; n <= (1 << 20); ++n) {
        const std::int64_t s = isqrt(n);
        if (s * s > n || (s + 1) * (s + 1) <= n) r.fail("isqrt(" + std::to_string(n) + ")");
    }
    std::uniform_int_distribution<std::int32_t> below(0, 32768 * 32768 - 1);
    for (int i = 0; i < 100000; ++i) {
        const std::int32_t n = below(rng);
        const std::int64_t s = isqrt(n);
        if (s * s > n || (s + 1) * (s + 1) <= n) r.fail("isqrt(" + std::to_string(n) + ")");
    }

    // hypot: criterion |h - exact| <= k; the halving trace only guarantees (1 + sqrt 2) k.
    std::uniform_int_distribution<std::int32_t> mag(1, 1 << 29);
    long over_k = 0;
    long over_bound = 0;
    long double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const Sp dx = mag(rng) * (rng() & 1 ? 1 : -1);
        const Sp dy = mag(rng) * (rng() & 1 ? 1 : -1);
        const long double exact = std::sqrt(static_cast<long double>(dx) * dx + static_cast<long double>(dy) * dy);
        const long double k = hypot_scale(dx, dy);
        const long double err = std::fabs(hypot(dx, dy) - exact);
        worst = std::max(worst, err / k);
        over_k += err > k;
        over_bound += err > (1 + std::sqrt(2.0L)) * k;
    }
    r.check(over_k == 0, "hypot: " + std::to_string(over_k) + "/10000 pairs exceed k (worst " + str(worst) + "k)");
    r.info("hypot within (1+sqrt2)k on " + std::to_string(10000 - over_bound) + "/10000 pairs");
    if (over_bound != 0) r.fail("hypot exceeds (1+sqrt2)k on " + std::to_string(over_bound) + " pairs");

    // muldiv fast path: within 2% + 1 of the exact quotient.
    std::uniform_int_distribution<std::int32_t> pa(1, 1 << 14), pb(1, 10737417);
    int tested = 0;
    while (tested < 10000) {
        const std::int32_t a = pa(rng);
        const std::int32_t b = pb(rng);
        const std::int32_t c = std::uniform_int_distribution<std::int32_t>(1, b)(rng);
        if (std::int64_t{b} * 100 / c * a > INT32_MAX) continue;
        ++tested;
        const long double exact = static_cast<long double>(a) * b / c;
        const long double got = muldiv(a, b, c);
        if (std::fabs(got - exact) > 0.02L * exact + 1) {
            r.fail("muldiv(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
        }
    }

    for (int x = -10000; x <= 10000; ++x) {
        if (mod360(x) != ((x % 360) + 360) % 360) r.fail("mod360(" + std::to_string(x) + ")");
    }

    const struct {
        int sx, sy;
        std::optional<Octant> want;
    } patterns[] = {
        {1, 0, Octant::R},   {1, -1, Octant::RD}, {0, -1, Octant::D},  {-1, -1, Octant::LD}, {-1, 0, Octant::L},
        {-1, 1, Octant::LU}, {0, 1, Octant::U},   {1, 1, Octant::RU},  {0, 0, std::nullopt},
    };
    for (const auto& p : patterns) {
        for (Sp m : {1, 7, 65536, 1 << 29}) {
            if (octant(p.sx * m, p.sy * m) != p.want) r.fail("octant sign pattern " + std::to_string(p.sx) + "," + std::to_string(p.sy));
        }
    }
}

// ---------------------------------------------------------------------------

void clipping(Report& r) {
    using namespace fixedmath;
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::int32_t> ext(1, 30 * 65536), del(1, 200 * 65536);
    int cases = 0;
    while (cases < 1000) {
        const Sp ex = ext(rng), ey = ext(rng);
        const Sp dx = del(rng) * (rng() & 1 ? 1 : -1);
        const Sp dy = del(rng) * (rng() & 1 ? 1 : -1);
        if (std::abs(dx) <= ex && std::abs(dy) <= ey) continue;  // the arrow never leaves the box
        ++cases;
        const Sp len = hypot(dx, dy);
        const Sp got = clip_distance(ex, ey, dx, dy, len);
        // The exit side is the axis whose padded half extent is reached first.
        const bool x_first = static_cast<long double>(std::abs(dx)) * ey >= static_cast<long double>(std::abs(dy)) * ex;
        const auto iv = x_first ? testkit::muldiv_interval(ex, len, std::abs(dx))
                                : testkit::muldiv_interval(ey, len, std::abs(dy));
        if (got < iv.lo || got > iv.hi) {
            r.fail("clip(" + std::to_string(ex) + "," + std::to_string(ey) + "," + std::to_string(dx) + "," +
                   std::to_string(dy) + ") = " + std::to_string(got) + " outside [" + str(iv.lo) + "," + str(iv.hi) + "]");
        }
    }
    for (int i = 0; i < 1000; ++i) {
        const Sp ex = ext(rng), ey = ext(rng), d = del(rng);
        r.check(clip_distance(ex, ey, d, 0, d) == ex, "horizontal clip not exact");
        r.check(clip_distance(ex, ey, -d, 0, d) == ex, "leftward clip not exact");
        r.check(clip_distance(ex, ey, 0, d, d) == ey, "vertical clip not exact");
        r.check(clip_distance(ex, ey, 0, -d, d) == ey, "downward clip not exact");
    }

    // End to end: a horizontal arrow between 10pt boxes trims to the padded faces exactly.
    const Compiled c = compile("\\Diagram[fixed, xgrid=20pt]\nAB & \\rTo & CD", {});
    const ArrowGeometry& a = c.layout.arrows.front();
    r.check(a.qb == 7 * 65536 && a.py == 7 * 65536, "axis trims: qb " + std::to_string(a.qb) + " py " + std::to_string(a.py));
    r.info(std::to_string(cases) + " random exits, 4000 axis cases");
}

// ---------------------------------------------------------------------------

void layout_satisfaction(Report& r) {
    const auto files = testkit::corpus_files();
    r.check(files.size() == 25, "corpus has " + std::to_string(files.size()) + " diagrams");
    long requirements = 0;
    for (const auto& f : files) {
        const std::string src = testkit::read_file(f);
        CompileOptions flex;
        flex.flexible = true;
        const Compiled c = compile(src, flex);
        const testkit::ConstraintOracle oracle(c.prepared.ast, c.prepared.registry, *c.prepared.metrics);
        requirements += static_cast<long>(oracle.requirements().size());
        for (const auto& v : oracle.violations(c.layout.grid.solved_x)) {
            r.fail(f.filename().string() + ": " + v.kind + "(" + std::to_string(v.c1) + "," + std::to_string(v.c2) +
                   ") needs " + std::to_string(v.required));
        }
        CompileOptions fixed;
        fixed.flexible = false;
        const Compiled g = compile(src, fixed);
        const Sp xgrid = g.prepared.registry.length(Param::XGrid);
        const auto& X = g.layout.grid.solved_x;
        for (std::size_t i = 1; i < X.size(); ++i) {
            if (X[i] - X[i - 1] != xgrid) r.fail(f.filename().string() + ": fixed gap " + std::to_string(X[i] - X[i - 1]));
        }
    }
    CompileOptions worked;
    worked.metrics = testkit::worked_metrics();
    const Compiled w = compile("\\Diag[cellwidth=20pt]\nA & \\rTo^{f} & B", worked);
    const Sp gap = w.layout.grid.X[2] - w.layout.grid.X[0];
    r.check(gap == 31 * 65536, "worked example gap " + std::to_string(gap) + " sp, want 31pt");
    r.info(std::to_string(files.size()) + " diagrams, " + std::to_string(requirements) + " requirements, worked gap 31pt");
}

// ---------------------------------------------------------------------------

void determinism_and_cache(Report& r) {
    testkit::TempDir dir("acceptance-cache");
    for (const auto& f : testkit::corpus_files()) {
        const std::string src = testkit::read_file(f);
        const auto path = dir.path() / (f.stem().string() + ".kuv");
        const std::string fresh = render::render_svg(compile(src, {}).layout);
        const auto first = cache::compile_with_cache(src, {}, path);
        const auto second = cache::compile_with_cache(src, {}, path);
        const std::string name = f.filename().string();
        r.check(first.status == cache::Status::Miss, name + ": first compile " + std::string(cache::status_name(first.status)));
        r.check(second.status == cache::Status::Hit, name + ": replay " + std::string(cache::status_name(second.status)));
        r.check(render::render_svg(first.layout) == fresh, name + ": compile output differs");
        r.check(render::render_svg(second.layout) == fresh, name + ": replay output differs");

        // Whitespace-only edit: pad every separator.
        std::string spaced;
        for (char ch : src) {
            spaced += ch;
            if (ch == '&') spaced += "   ";
        }
        spaced += "\n\n";
        const auto ws = cache::compile_with_cache(spaced, {}, path);
        r.check(ws.status == cache::Status::Hit, name + ": whitespace edit " + std::string(cache::status_name(ws.status)));

        // Semantic edit: an extra vertex in a new row.
        const auto sem = cache::compile_with_cache(src + " \\\\ Zq", {}, path);
        r.check(sem.status == cache::Status::Stale, name + ": semantic edit " + std::string(cache::status_name(sem.status)));

        // Truncation: the next compile detects it, recompiles and rewrites the file.
        const std::string full = testkit::read_file(path);
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << full.substr(0, full.size() / 3);
        }
        const auto rec = cache::compile_with_cache(src + " \\\\ Zq", {}, path);
        r.check(rec.status == cache::Status::Corrupt, name + ": truncated cache " + std::string(cache::status_name(rec.status)));
        r.check(testkit::read_file(path) == full, name + ": cache not rewritten after recovery");
        const auto again = cache::compile_with_cache(src + " \\\\ Zq", {}, path);
        r.check(again.status == cache::Status::Hit, name + ": after recovery " + std::string(cache::status_name(again.status)));
    }
}

// ---------------------------------------------------------------------------

/// Byte-level and token-level mutations of corpus sources.
class Mutator {
public:
    explicit Mutator(std::uint64_t seed) : rng_(seed) {
        for (const auto& f : testkit::corpus_files()) seeds_.push_back(testkit::read_file(f));
    }

    std::string next() {
        switch (pick(4)) {
            case 0: return random_bytes();
            case 1: return random_tokens();
            default: return mutate(seeds_[pick(seeds_.size())]);
        }
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::string random_bytes() {
        std::string s(pick(64), '\0');
        for (char& c : s) c = static_cast<char>(pick(256));
        return s;
    }

    std::string random_tokens() {
        static const char* const kTokens[] = {
            "A", "&", "\\\\", "\\rTo", "\\dTo", "\\aTo", "\\bTo", "\\ldTwo", "\\ruMapsto", "\\rRule", "^{f}", "_{g}",
            "<{h}", ">{k}", "^[x]", "(1,0)", "(m)", "(-1,2)", ":{.3;1pt,2pt}", "\\pt{m}", "\\pt{m}{.2}", "\\gr{.5}",
            "\\gray", "\\white", "\\br", "\\nw", "\\lw{2pt}", "\\hx{1pt}", "\\join{tail}", "\\stop", "\\nodot",
            "\\grav", "\\base", "\\dx{3pt}", "\\mx{.5}", "\\ax{1}", "\\dy{2pt}", "\\W{2}{X}", "\\Diagram[flexible]",
            "\\Graph[width=3]", "\\Dg", "{", "}", "[", "]", "%", "\n", " ", "\\", "(", ",", ")", "\\frob", "1e9pt",
        };
        std::string s;
        const std::size_t n = pick(24);
        for (std::size_t i = 0; i < n; ++i) s += kTokens[pick(std::size(kTokens))];
        return s;
    }

    std::string mutate(std::string s) {
        const std::size_t edits = 1 + pick(6);
        for (std::size_t e = 0; e < edits; ++e) {
            const std::size_t at = s.empty() ? 0 : pick(s.size() + 1);
            switch (pick(5)) {
                case 0:
                    if (!s.empty() && at < s.size()) s.erase(at, 1 + pick(8));
                    break;
                case 1: s.insert(at, 1, "{}[]()\\&^_<>:;,.%0123456789pt-"[pick(30)]); break;
                case 2: s.insert(at, 1, static_cast<char>(pick(256))); break;
                case 3:
                    if (!s.empty()) {
                        const std::size_t from = pick(s.size());
                        s.insert(at, s.substr(from, 1 + pick(16)));
                    }
                    break;
                default:
                    if (!s.empty() && at < s.size()) s[at] = static_cast<char>(pick(256));
            }
        }
        return s;
    }

    std::mt19937_64 rng_;
    std::vector<std::string> seeds_;
};

void dsl_totality(Report& r, double fuzz_seconds, std::uint64_t seed) {
    const StyleRegistry reg = StyleRegistry::builtin();

    for (const auto& f : testkit::corpus_files()) {
        const DiagramAst first = parse(testkit::read_file(f), reg).ast;
        const std::string text = canonicalize(first);
        const DiagramAst second = parse(text, reg).ast;
        r.check(first == second, f.filename().string() + ": round trip changes the tree");
        r.check(canonicalize(second) == text, f.filename().string() + ": canonical form not stable");
    }

    Mutator gen(seed);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(fuzz_seconds);
    long inputs = 0, accepted = 0, compiled = 0;
    while (std::chrono::steady_clock::now() < deadline) {
        const std::string src = gen.next();
        ++inputs;
        try {
            const DiagramAst ast = parse(src, reg).ast;
            ++accepted;
            const std::string text = canonicalize(ast);
            const DiagramAst again = parse(text, reg).ast;
            if (!(again == ast)) r.fail("round trip differs for input: " + nlohmann::json(src).dump());
        } catch (const CompileError&) {
            continue;
        } catch (const std::exception& e) {
            r.fail(std::string("parser threw ") + e.what());
            continue;
        }
        // Accepted sources also go through the remaining stages.
        try {
            compile(src, {});
            ++compiled;
        } catch (const CompileError&) {
        } catch (const std::exception& e) {
            r.fail(std::string("compile threw ") + e.what());
        }
    }
    r.info(std::to_string(inputs) + " fuzz inputs, " + std::to_string(accepted) + " parsed, " +
           std::to_string(compiled) + " compiled");
}

// ---------------------------------------------------------------------------

template <class F>
std::string grid_source(int C, int R, F cell) {
    std::string s;
    for (int row = 0; row <= R; ++row) {
        if (row) s += " \\\\\n";
        for (int col = 0; col <= C; ++col) {
            if (col) s += " & ";
            s += cell(row, col);
        }
    }
    return s;
}

std::size_t count_kind(const LayoutResult& l, ItemKind k) {
    return static_cast<std::size_t>(std::count_if(l.items.begin(), l.items.end(), [&](const PlacedItem& i) { return i.kind == k; }));
}

void render_contracts(Report& r) {
    for (int C = 0; C <= 6; ++C) {
        for (int R = 0; R <= 6; ++R) {
            int occupied = 0, nodot = 0;
            const auto src = grid_source(C, R, [&](int row, int col) -> std::string {
                // A blank single-cell last row would read as a trailing separator.
                const int k = C == 0 && row == R ? 0 : (row * 5 + col * 3 + C + R) % 4;
                if (k == 0) return ++occupied, "v";
                if (k == 1) return ++nodot, "\\nodot";
                return "";
            });
            CompileOptions o;
            o.flags = {"dotted", "gridlines"};
            const LayoutResult l = compile(src, o).layout;
            const std::size_t dots = count_kind(l, ItemKind::Dot);
            const std::size_t want = static_cast<std::size_t>((C + 1) * (R + 1) - occupied - nodot);
            const std::string tag = std::to_string(C) + "x" + std::to_string(R);
            r.check(dots == want, tag + ": " + std::to_string(dots) + " dots, want " + std::to_string(want));
            const std::size_t lines = count_kind(l, ItemKind::Gridline);
            r.check(lines == static_cast<std::size_t>(C + 1 + R + 1), tag + ": " + std::to_string(lines) + " gridlines");
        }
    }

    for (int i = 0; i <= 65536; i += 1) {
        const int want = static_cast<int>(std::lround(255.0L * i / 65536));
        if (render::gray_channel(i) != want) r.fail("gray " + std::to_string(i));
    }
    for (const char* g : {".25", ".5", ".75", "1", "0"}) {
        const std::string svg = render::render_svg(compile(std::string("A & \\rTo\\gr{") + g + "} & B", {}).layout);
        const int ch = static_cast<int>(std::lround(255.0 * std::stod(g)));
        const std::string rgb = "rgb(" + std::to_string(ch) + "," + std::to_string(ch) + "," + std::to_string(ch) + ")";
        r.check(svg.find("stroke=\"" + rgb + "\"") != std::string::npos, std::string("gray ") + g + " not drawn as " + rgb);
    }

    CompileOptions o;
    o.flags = {"dotted", "gridlines"};
    for (const auto& f : testkit::corpus_files()) {
        const LayoutResult l = compile(testkit::read_file(f), o).layout;
        const std::string name = f.filename().string();
        r.check(l.doc_width == l.bounds.x1 - l.bounds.x0 + 2 * l.pad, name + ": width is not bounds + 2 pad");
        r.check(l.doc_height == l.bounds.y1 - l.bounds.y0 + 2 * l.pad, name + ": height is not bounds + 2 pad");
        for (const auto& it : l.items) {
            const Bounds b = render::item_extent(it);
            if (b.x0 < 0 || b.y0 < 0 || b.x1 > l.doc_width || b.y1 > l.doc_height) {
                r.fail(name + ": " + std::string(item_kind_name(it.kind)) + " outside the document");
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    double fuzz_seconds = 60;
    std::uint64_t seed = 4242;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--fuzz-seconds" && i + 1 < argc) {
            fuzz_seconds = std::stod(argv[++i]);
        } else if (arg == "--seed" && i + 1 < argc) {
            seed = std::stoull(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--fuzz-seconds N] [--seed S]\n";
            return 2;
        }
    }

    const std::pair<const char*, std::function<void(Report&)>> criteria[] = {
        {"defaults fidelity", defaults},
        {"math kernel", math_kernel},
        {"clipping", clipping},
        {"layout satisfaction", layout_satisfaction},
        {"determinism and cache", determinism_and_cache},
        {"dsl totality", [&](Report& r) { dsl_totality(r, fuzz_seconds, seed); }},
        {"render contracts", render_contracts},
    };

    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Report report;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(report);
        } catch (const std::exception& e) {
            report.fail(std::string("uncaught exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %d %s (%.2fs)", report.ok() ? "PASS" : "FAIL", index, name, secs);
        std::cout << line << '\n';
        for (const auto& note : report.infos()) std::cout << "       " << note << '\n';
        for (const auto& note : report.notes()) std::cout << "       - " << note << '\n';
        if (report.failures() > static_cast<long>(report.notes().size())) {
            std::cout << "       ... " << report.failures() - static_cast<long>(report.notes().size()) << " more\n";
        }
        failed += !report.ok();
    }
    std::cout << (failed ? std::to_string(failed) + " of 7 criteria failed" : std::string("all 7 criteria passed")) << '\n';
    return failed ? 1 : 0;
}
