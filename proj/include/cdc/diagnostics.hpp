#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cdc {

struct SourcePos {
    int line = 1;
    int column = 1;
};

enum class Severity { Warning, Error };

/// A located message with a stable code such as "E002".
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourcePos pos;

    /// "file:line:col: error[E002]: message"
    std::string format(const std::string& file = "<input>") const;
};

/// Thrown by every stage that rejects its input. Carries at least one
/// diagnostic.
class CompileError : public std::runtime_error {
public:
    explicit CompileError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

namespace diag {
// Parser
inline constexpr const char* kUnknownCommand = "E001";
inline constexpr const char* kUnbalancedBraces = "E002";
inline constexpr const char* kTargetOnCompass = "E003";
inline constexpr const char* kMissingTarget = "E004";
inline constexpr const char* kMalformedLength = "E005";
inline constexpr const char* kBadOption = "E006";
inline constexpr const char* kMalformedTarget = "E007";
inline constexpr const char* kMalformedSlide = "E008";
inline constexpr const char* kUnterminated = "E009";
inline constexpr const char* kUnexpectedText = "E010";
inline constexpr const char* kDuplicateTarget = "E011";
inline constexpr const char* kBadLabel = "E012";
inline constexpr const char* kBadSpan = "E013";
// Later stages
inline constexpr const char* kUnknownStyle = "E101";
inline constexpr const char* kBadParameter = "E102";
inline constexpr const char* kUnknownPoint = "E103";
inline constexpr const char* kDuplicatePoint = "E104";
inline constexpr const char* kUnsupportedSpan = "E105";
inline constexpr const char* kUnsupportedCell = "E106";
inline constexpr const char* kNumeric = "E107";
inline constexpr const char* kNoConvergence = "E108";
// Warnings
inline constexpr const char* kIgnoredModifier = "W001";
inline constexpr const char* kHoleTooWide = "W002";
inline constexpr const char* kGrayOutOfRange = "W003";
inline constexpr const char* kCacheUnwritable = "W004";
}  // namespace diag

}  // namespace cdc
