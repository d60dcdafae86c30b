#include "cdc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cdc/cache.hpp"
#include "cdc/compiler.hpp"
#include "cdc/render.hpp"

namespace cdc::cli {

namespace {

namespace fs = std::filesystem;

struct Settings {
    std::vector<std::string> inputs;
    std::string output;
    std::string format = "svg";
    std::string preset;
    bool flexible = false;
    bool fixed = false;
    std::string grid, xgrid, ygrid;
    std::vector<std::string> sets;
    bool gridlines = false;
    bool overgrid = false;
    bool dotted = false;
    bool rotated_labels = false;
    bool joined = false;
    std::string gravitate;
    std::string cache_dir = ".cdc-cache";
    bool no_cache = false;
    std::string metrics;
    std::string config;
    bool verbose = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Settings& s) {
    app->add_option("inputs", s.inputs, "Diagram files, or - for stdin")->required();
    app->add_option("--preset", s.preset, "Parameter preset")
        ->check(CLI::IsMember({"diagram", "diag", "dg", "long"}, CLI::ignore_case));
    app->add_flag("--flexible", s.flexible, "Use the flexible column solver");
    app->add_flag("--fixed", s.fixed, "Use the fixed grid");
    app->add_option("--grid", s.grid, "Grid spacing (length)");
    app->add_option("--xgrid", s.xgrid, "Column spacing (length)");
    app->add_option("--ygrid", s.ygrid, "Row spacing (length)");
    app->add_option("--set", s.sets, "Parameter assignment name=value, name+=value or name{Cell}=value");
    app->add_flag("--gridlines", s.gridlines, "Draw grid lines under the diagram");
    app->add_flag("--overgrid", s.overgrid, "Draw grid lines over the diagram");
    app->add_flag("--dotted", s.dotted, "Mark empty grid points with dots");
    app->add_flag("--rotated-labels", s.rotated_labels, "Rotate labels along their arrows");
    app->add_flag("--joined", s.joined, "Join arrow ends that meet no vertex");
    app->add_option("--gravitate", s.gravitate, "Solver gravity side")->check(CLI::IsMember({"left", "right"}));
    app->add_option("--cache-dir", s.cache_dir, "Layout cache directory");
    app->add_flag("--no-cache", s.no_cache, "Disable the layout cache");
    app->add_option("--metrics", s.metrics, "Text metrics file");
    app->add_option("--config", s.config, "File of `key = value` parameter lines");
    app->add_flag("-v,--verbose", s.verbose, "Report cache status");
}

std::vector<ParamSetting> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::vector<ParamSetting> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto s = parse_setting(line);
        if (!s) throw UsageError(path + ":" + std::to_string(lineno) + ": expected `key = value`");
        out.push_back(std::move(*s));
    }
    return out;
}

CompileOptions options_from(const Settings& s) {
    CompileOptions o;
    if (!s.preset.empty()) {
        std::string p = s.preset;
        std::transform(p.begin(), p.end(), p.begin(), [](unsigned char c) { return std::tolower(c); });
        if (p == "diagram") o.preset = DiagramKind::Diagram;
        if (p == "diag") o.preset = DiagramKind::Diag;
        if (p == "dg") o.preset = DiagramKind::Dg;
        if (p == "long") o.preset = DiagramKind::Long;
    }
    if (s.flexible && s.fixed) throw UsageError("--flexible and --fixed are exclusive");
    if (s.flexible) o.flexible = true;
    if (s.fixed) o.flexible = false;
    if (s.gridlines) o.flags.emplace_back("gridlines");
    if (s.overgrid) o.flags.emplace_back("overgrid");
    if (s.dotted) o.flags.emplace_back("dotted");
    if (s.rotated_labels) o.flags.emplace_back("rotatedlabels");
    if (s.joined) o.flags.emplace_back("joined");
    if (!s.gravitate.empty()) o.flags.push_back("gravitate" + s.gravitate);
    if (!s.config.empty()) o.settings = read_config(s.config);
    if (!s.grid.empty()) o.settings.push_back({"grid", "", s.grid, SetMode::Absolute});
    if (!s.xgrid.empty()) o.settings.push_back({"xgrid", "", s.xgrid, SetMode::Absolute});
    if (!s.ygrid.empty()) o.settings.push_back({"ygrid", "", s.ygrid, SetMode::Absolute});
    for (const auto& text : s.sets) {
        auto setting = parse_setting(text);
        if (!setting) throw UsageError("malformed --set '" + text + "'");
        o.settings.push_back(std::move(*setting));
    }
    if (!s.metrics.empty()) {
        std::ifstream in(s.metrics, std::ios::binary);
        if (!in) throw IoError("cannot read metrics file '" + s.metrics + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            o.metrics = std::make_shared<EmMetrics>(EmMetrics::parse(buf.str()));
        } catch (const StyleError& e) {
            throw UsageError(e.what());
        }
    }
    return o;
}

std::string read_input(const std::string& path, std::istream& in) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot read '" + path + "'");
    buf << file.rdbuf();
    return buf.str();
}

std::string display_name(const std::string& path) { return path == "-" ? "<stdin>" : path; }

fs::path cache_file_for(const Settings& s, const std::string& input) {
    if (input == "-") return fs::path(s.cache_dir) / "stdin.kuv";
    std::error_code ec;
    const fs::path abs = fs::absolute(input, ec);
    const std::string key = sha256_hex(abs.string()).substr(0, 12);
    return fs::path(s.cache_dir) / (fs::path(input).stem().string() + "-" + key + ".kuv");
}

enum class Mode { Compile, Check, Dump };

struct Outcome {
    int code = kExitOk;
    std::string text;   // rendered output
    std::string diags;  // stderr lines
};

Outcome process(Mode mode, const Settings& s, const CompileOptions& opts, const std::string& input,
                const std::string& source) {
    Outcome out;
    const std::string name = display_name(input);
    try {
        std::vector<Diagnostic> warnings;
        LayoutResult layout;
        if (mode == Mode::Compile && s.format == "svg" && !s.no_cache) {
            cache::CachedCompile cc = cache::compile_with_cache(source, opts, cache_file_for(s, input));
            warnings = std::move(cc.warnings);
            layout = std::move(cc.layout);
            if (s.verbose) out.diags += name + ": cache " + std::string(cache::status_name(cc.status)) + "\n";
        } else {
            Compiled c = compile(source, opts);
            warnings = std::move(c.warnings);
            layout = std::move(c.layout);
        }
        for (const Diagnostic& d : warnings) out.diags += d.format(name) + "\n";
        if (mode == Mode::Compile) out.text = s.format == "json" ? render::render_json(layout) : render::render_svg(layout);
        if (mode == Mode::Dump) out.text = render::render_json(layout);
    } catch (const CompileError& e) {
        for (const Diagnostic& d : e.diagnostics()) out.diags += d.format(name) + "\n";
        out.code = kExitDiagnostics;
    }
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw IoError("cannot write '" + path.string() + "'");
}

int execute(Mode mode, const Settings& s, std::istream& in, std::ostream& out, std::ostream& err) {
    if (s.format != "svg" && s.format != "json") throw UsageError("--format must be svg or json");
    if (mode == Mode::Dump && s.inputs.size() != 1) throw UsageError("dump takes exactly one input");
    if (std::count(s.inputs.begin(), s.inputs.end(), "-") > 1) throw UsageError("stdin can be read only once");
    const CompileOptions opts = options_from(s);

    std::vector<std::string> sources;
    for (const auto& path : s.inputs) sources.push_back(read_input(path, in));

    std::vector<std::future<Outcome>> jobs;
    for (std::size_t i = 0; i < s.inputs.size(); ++i) {
        jobs.push_back(std::async(std::launch::async, process, mode, std::cref(s), std::cref(opts),
                                  std::cref(s.inputs[i]), std::cref(sources[i])));
    }
    int code = kExitOk;
    const bool many = s.inputs.size() > 1;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Outcome o = jobs[i].get();
        err << o.diags;
        code = std::max(code, o.code);
        if (o.code != kExitOk || mode == Mode::Check) continue;
        if (!many) {
            if (s.output.empty() || s.output == "-") {
                out << o.text;
            } else {
                write_file(s.output, o.text);
            }
            continue;
        }
        const std::string stem = s.inputs[i] == "-" ? "stdin" : fs::path(s.inputs[i]).stem().string();
        const fs::path dir = s.output.empty() ? fs::path(".") : fs::path(s.output);
        std::error_code ec;
        fs::create_directories(dir, ec);
        write_file(dir / (stem + "." + s.format), o.text);
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Commutative diagram compiler", "cdc"};
    app.require_subcommand(1);
    Settings compile_s, check_s, dump_s;
    CLI::App* compile_cmd = app.add_subcommand("compile", "Compile diagrams to SVG or JSON");
    add_common(compile_cmd, compile_s);
    compile_cmd->add_option("-o,--output", compile_s.output, "Output file (directory for several inputs)");
    compile_cmd->add_option("--format", compile_s.format, "svg or json")->check(CLI::IsMember({"svg", "json"}));
    CLI::App* check_cmd = app.add_subcommand("check", "Parse and lay out, reporting diagnostics only");
    add_common(check_cmd, check_s);
    CLI::App* dump_cmd = app.add_subcommand("dump", "Print the layout dump as JSON");
    add_common(dump_cmd, dump_s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "cdc: " << e.what() << "\n";
        if (e.get_exit_code() == 0) return kExitOk;
        return kExitUsage;
    }

    try {
        if (compile_cmd->parsed()) return execute(Mode::Compile, compile_s, in, out, err);
        if (check_cmd->parsed()) return execute(Mode::Check, check_s, in, out, err);
        return execute(Mode::Dump, dump_s, in, out, err);
    } catch (const UsageError& e) {
        err << "cdc: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "cdc: " << e.what() << "\n";
        return kExitIo;
    } catch (const CompileError& e) {
        for (const Diagnostic& d : e.diagnostics()) err << d.format() << "\n";
        return kExitDiagnostics;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace cdc::cli
