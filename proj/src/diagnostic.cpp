#include "mural2scene/diagnostic.hpp"

#include <algorithm>

namespace mural2scene {

Diagnostic make_error(std::string code, std::string message, std::string path,
                      SourceLoc loc) {
  return Diagnostic{Severity::Error, std::move(code), std::move(message),
                    std::move(path), loc};
}

Diagnostic make_warning(std::string code, std::string message,
                        std::string path, SourceLoc loc) {
  return Diagnostic{Severity::Warning, std::move(code), std::move(message),
                    std::move(path), loc};
}

bool has_errors(const Diagnostics &diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic &d) { return d.is_error(); });
}

bool has_code(const Diagnostics &diags, const std::string &code) {
  return std::any_of(diags.begin(), diags.end(),
                     [&](const Diagnostic &d) { return d.code == code; });
}

std::size_t count_errors(const Diagnostics &diags) {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(),
                    [](const Diagnostic &d) { return d.is_error(); }));
}

std::string format_diagnostic(const Diagnostic &d) {
  std::string out = d.is_error() ? "ERROR " : "WARNING ";
  out += d.code;
  out += ' ';
  out += d.path.empty() ? std::string("-") : d.path;
  if (d.loc.known()) {
    out += ':' + std::to_string(d.loc.line) + ':' +
           std::to_string(d.loc.column);
  }
  out += ' ';
  out += d.message;
  return out;
}

namespace {

std::string summarize(const Diagnostics &diags) {
  if (diags.empty()) return "compile error";
  std::string s = diags.front().code + ": " + diags.front().message;
  if (diags.size() > 1) {
    s += " (+" + std::to_string(diags.size() - 1) + " more)";
  }
  return s;
}

}  // namespace

CompileError::CompileError(Diagnostic diag)
    : CompileError(Diagnostics{std::move(diag)}) {}

CompileError::CompileError(Diagnostics diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {
  if (diags_.empty()) {
    diags_.push_back(make_error("INTERNAL", "compile error without detail"));
  }
}

IoError::IoError(std::string path, const std::string &what)
    : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

}  // namespace mural2scene
