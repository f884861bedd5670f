#ifndef GKA_DIAGNOSTICS_HPP
#define GKA_DIAGNOSTICS_HPP

#include <string>
#include <string_view>
#include <vector>

namespace gka {

enum class Severity { Note, Warning, Error };

const char* severity_name(Severity s);

/// A single located message. Line and column are 1-based; 0 means
/// "no location" (whole-model problems such as a hierarchy cycle).
struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 0;
  int col = 0;
  std::string message;
};

/// Ordered collector of diagnostics. Functions that can fail take a
/// Diagnostics& sink and return an empty optional on error; callers
/// decide how to render the accumulated messages.
class Diagnostics {
 public:
  void error(int line, int col, std::string message);
  void warning(int line, int col, std::string message);
  void note(int line, int col, std::string message);
  void add(Diagnostic d);
  void append(const Diagnostics& other);

  bool has_errors() const { return error_count_ > 0; }
  bool empty() const { return items_.empty(); }
  std::size_t error_count() const { return error_count_; }
  const std::vector<Diagnostic>& all() const { return items_; }

  /// Renders "file:line:col: severity: message" lines, one per entry.
  std::string to_string(std::string_view file) const;

 private:
  std::vector<Diagnostic> items_;
  std::size_t error_count_ = 0;
};

}  // namespace gka

#endif
