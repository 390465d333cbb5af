#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mural2scene {

/// Position inside a manifest or script document. Line and column are
/// 1-based; a zero line means the value was not produced from text.
///
/// Locations never take part in structural equality: two manifests that
/// differ only in where their fields were written compare equal.
struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;

  bool known() const { return line != 0; }

  friend bool operator==(const SourceLoc &, const SourceLoc &) { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  /// Document path ("foguang.scene") or logical path ("slices[2].mask").
  std::string path;
  SourceLoc loc;

  bool is_error() const { return severity == Severity::Error; }

  friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

using Diagnostics = std::vector<Diagnostic>;

Diagnostic make_error(std::string code, std::string message,
                      std::string path = {}, SourceLoc loc = {});
Diagnostic make_warning(std::string code, std::string message,
                        std::string path = {}, SourceLoc loc = {});

bool has_errors(const Diagnostics &diags);
bool has_code(const Diagnostics &diags, const std::string &code);
std::size_t count_errors(const Diagnostics &diags);

/// Renders `LEVEL CODE path:line:col message`, the log format the CLI uses.
std::string format_diagnostic(const Diagnostic &d);

/// Raised by operations whose failure is a single well-defined condition
/// (DEGENERATE_MASK, CLIP_TOO_LARGE, BEHIND_CAMERA, ...). Validators return
/// lists instead of throwing.
class CompileError : public std::runtime_error {
 public:
  explicit CompileError(Diagnostic diag);
  explicit CompileError(Diagnostics diags);

  const Diagnostics &diagnostics() const { return diags_; }
  const std::string &code() const { return diags_.front().code; }

 private:
  Diagnostics diags_;
};

/// File-system failures. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string &what);

  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace mural2scene
