#include "cdc/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

namespace cdc::cache {

namespace {

bool parse_int(std::string_view s, long long& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_sp(std::string_view s, Sp& out) {
    long long v = 0;
    if (!parse_int(s, v) || v > (1LL << 30) || v < -(1LL << 30)) return false;
    out = static_cast<Sp>(v);
    return true;
}

std::vector<std::string_view> fields(std::string_view line, std::size_t max_fields) {
    std::vector<std::string_view> out;
    while (!line.empty() && out.size() + 1 < max_fields) {
        const auto sp = line.find(' ');
        if (sp == std::string_view::npos) break;
        out.push_back(line.substr(0, sp));
        line.remove_prefix(sp + 1);
    }
    out.push_back(line);
    return out;
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}
    // Every line, including the last, must end in LF.
    bool next(std::string_view& line) {
        const auto nl = text_.find('\n', pos_);
        if (nl == std::string_view::npos) return false;
        line = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        return true;
    }
    bool at_end() const { return pos_ == text_.size(); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

ReadResult corrupt() { return {Status::Corrupt, std::nullopt}; }

}  // namespace

std::string_view status_name(Status s) {
    switch (s) {
        case Status::Hit: return "hit";
        case Status::Miss: return "miss";
        case Status::Stale: return "stale";
        case Status::Corrupt: return "corrupt";
        case Status::Disabled: return "disabled";
    }
    return "miss";
}

Record record_of(const LayoutResult& layout, const std::string& digest) {
    return Record{digest,
                  layout.doc_width,
                  layout.doc_height,
                  layout.rows,
                  layout.baseline_row.value_or(-1),
                  layout.gravity,
                  layout.items};
}

LayoutResult replay(const Record& r) {
    LayoutResult out;
    out.doc_width = r.width;
    out.doc_height = r.height;
    out.rows = r.rows;
    if (r.baseline_row >= 0) out.baseline_row = r.baseline_row;
    out.gravity = r.gravity;
    out.items = r.items;
    return out;
}

std::string serialize(const Record& r, int engine_version) {
    std::string out = "kuvio-cache " + std::to_string(engine_version) + " " + std::to_string(kFormatVersion) + "\n";
    out += "digest sha256 " + r.digest + "\n";
    out += "header " + std::to_string(r.width) + " " + std::to_string(r.height) + " " + std::to_string(r.rows) + " " +
           std::to_string(r.baseline_row) + " " + std::to_string(r.gravity) + "\n";
    for (const PlacedItem& it : r.items) {
        nlohmann::json payload = render::item_to_json(it);
        payload.erase("a");
        payload.erase("anchor");
        out += std::to_string(it.a.x) + " " + std::to_string(it.a.y) + " " + std::to_string(it.anchor) + " " +
               payload.dump() + "\n";
    }
    out += "end " + std::to_string(r.items.size()) + "\n";
    return out;
}

ReadResult parse(std::string_view text, std::string_view expected_digest) {
    LineReader in(text);
    std::string_view line;
    if (!in.next(line)) return corrupt();
    {
        const auto f = fields(line, 4);
        long long engine = 0, format = 0;
        if (f.size() != 3 || f[0] != "kuvio-cache" || !parse_int(f[1], engine) || !parse_int(f[2], format)) {
            return corrupt();
        }
        if (engine != kEngineVersion || format != kFormatVersion) return {Status::Stale, std::nullopt};
    }
    Record r;
    if (!in.next(line)) return corrupt();
    {
        const auto f = fields(line, 4);
        if (f.size() != 3 || f[0] != "digest" || f[1] != "sha256" || f[2].size() != 64) return corrupt();
        r.digest = std::string(f[2]);
    }
    if (!in.next(line)) return corrupt();
    {
        const auto f = fields(line, 7);
        long long rows = 0, base = 0, grav = 0;
        if (f.size() != 6 || f[0] != "header" || !parse_sp(f[1], r.width) || !parse_sp(f[2], r.height) ||
            !parse_int(f[3], rows) || !parse_int(f[4], base) || !parse_int(f[5], grav) || rows < 0 || rows > 1000000 ||
            base < -1 || base >= rows || grav < -100000000 || grav > 100000000) {
            return corrupt();
        }
        r.rows = static_cast<int>(rows);
        r.baseline_row = static_cast<int>(base);
        r.gravity = static_cast<int>(grav);
    }
    while (true) {
        if (!in.next(line)) return corrupt();
        if (line.starts_with("end ")) {
            long long count = 0;
            if (!parse_int(line.substr(4), count) || count != static_cast<long long>(r.items.size()) || !in.at_end()) {
                return corrupt();
            }
            break;
        }
        const auto f = fields(line, 4);
        if (f.size() != 4) return corrupt();
        Sp x = 0, y = 0;
        long long anchor = 0;
        if (!parse_sp(f[0], x) || !parse_sp(f[1], y) || !parse_int(f[2], anchor)) return corrupt();
        try {
            nlohmann::json payload = nlohmann::json::parse(f[3]);
            if (!payload.is_object()) return corrupt();
            payload["a"] = {x, y};
            payload["anchor"] = anchor;
            r.items.push_back(render::item_from_json(payload));
        } catch (const std::exception&) {
            return corrupt();
        }
    }
    if (r.digest != expected_digest) return {Status::Stale, std::nullopt};
    return {Status::Hit, std::move(r)};
}

std::string digest(std::string_view source) {
    return sha256_hex(canonicalize(cdc::parse(source, StyleRegistry::builtin()).ast));
}

bool write_atomic(const std::filesystem::path& file, const std::string& contents) {
    static std::atomic<unsigned> counter{0};
    std::error_code ec;
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
    const std::string lock_path = file.string() + ".lock";
    const int lock_fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (lock_fd < 0) return false;
    if (::flock(lock_fd, LOCK_EX) != 0) {
        ::close(lock_fd);
        return false;
    }
    const std::string tmp = file.string() + ".tmp." + std::to_string(::getpid()) + "." +
                            std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                            std::to_string(counter++);
    bool ok = false;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out) {
            out << contents;
            out.flush();
            ok = static_cast<bool>(out);
        }
    }
    if (ok) {
        std::filesystem::rename(tmp, file, ec);
        ok = !ec;
    }
    if (!ok) std::filesystem::remove(tmp, ec);
    ::flock(lock_fd, LOCK_UN);
    ::close(lock_fd);
    return ok;
}

CachedCompile compile_with_cache(std::string_view source, const CompileOptions& options,
                                 const std::filesystem::path& cache_file) {
    Prepared prepared = prepare(source, options);
    CachedCompile out;
    out.digest = prepared.digest;
    out.warnings = prepared.warnings;

    std::ifstream in(cache_file, std::ios::binary);
    if (in) {
        std::ostringstream buf;
        buf << in.rdbuf();
        ReadResult read = parse(buf.str(), prepared.digest);
        if (read.status == Status::Hit) {
            out.status = Status::Hit;
            out.layout = replay(*read.record);
            return out;
        }
        out.status = read.status;
    } else {
        out.status = Status::Miss;
    }

    out.layout = run_layout(prepared, &out.warnings);
    if (!write_atomic(cache_file, serialize(record_of(out.layout, prepared.digest)))) {
        out.warnings.push_back(Diagnostic{Severity::Warning, diag::kCacheUnwritable,
                                          "cannot write cache file " + cache_file.string(), SourcePos{}});
    }
    return out;
}

}  // namespace cdc::cache
