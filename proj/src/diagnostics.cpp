#include "cdc/diagnostics.hpp"

namespace cdc {

std::string Diagnostic::format(const std::string& file) const {
    return file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
           (severity == Severity::Error ? "error" : "warning") + "[" + code + "]: " + message;
}

namespace {
std::string first_message(const std::vector<Diagnostic>& d) {
    return d.empty() ? std::string("compile error") : d.front().format();
}
}  // namespace

CompileError::CompileError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(first_message(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace cdc
