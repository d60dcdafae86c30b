#pragma once

// Digest-guarded layout cache. One text file per diagram:
//
//   kuvio-cache 216 <format>
//   digest sha256 <64 hex>
//   header <width> <height> <rows> <baseline-row> <gravity>
//   <x> <y> <anchor> <json payload>      one line per placed item
//   end <item count>
//
// Lengths are integer sp, LF line endings, fields separated by one space.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/compiler.hpp"
#include "cdc/render.hpp"

namespace cdc::cache {

inline constexpr int kEngineVersion = 216;
inline constexpr int kFormatVersion = 1;

enum class Status { Hit, Miss, Stale, Corrupt, Disabled };

std::string_view status_name(Status s);

struct Record {
    std::string digest;
    Sp width = 0;
    Sp height = 0;
    int rows = 0;
    int baseline_row = -1;
    int gravity = 0;
    std::vector<PlacedItem> items;
};

Record record_of(const LayoutResult& layout, const std::string& digest);

/// LayoutResult carrying only what rendering needs (document size, header, items).
LayoutResult replay(const Record& record);

std::string serialize(const Record& record, int engine_version = kEngineVersion);

struct ReadResult {
    Status status = Status::Miss;
    std::optional<Record> record;
};

/// Classifies file contents against the expected digest: Hit, Stale (version or
/// digest differ) or Corrupt (anything unparsable, including truncation).
ReadResult parse(std::string_view text, std::string_view expected_digest);

/// Digest of the canonical form of a source alone.
std::string digest(std::string_view source);

struct CachedCompile {
    LayoutResult layout;
    Status status = Status::Miss;
    std::vector<Diagnostic> warnings;
    std::string digest;
};

/// Replays on a hit; otherwise compiles and atomically rewrites the file. An
/// unwritable path yields a W004 warning and the compile still succeeds.
CachedCompile compile_with_cache(std::string_view source, const CompileOptions& options,
                                 const std::filesystem::path& cache_file);

/// Temp file plus rename, under an advisory lock on `<file>.lock`.
bool write_atomic(const std::filesystem::path& file, const std::string& contents);

}  // namespace cdc::cache
