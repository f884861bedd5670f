#include "gka/diagnostics.hpp"

#include <sstream>

namespace gka {

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::Note: return "note";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "error";
}

void Diagnostics::error(int line, int col, std::string message) {
  add({Severity::Error, line, col, std::move(message)});
}

void Diagnostics::warning(int line, int col, std::string message) {
  add({Severity::Warning, line, col, std::move(message)});
}

void Diagnostics::note(int line, int col, std::string message) {
  add({Severity::Note, line, col, std::move(message)});
}

void Diagnostics::add(Diagnostic d) {
  if (d.severity == Severity::Error) ++error_count_;
  items_.push_back(std::move(d));
}

void Diagnostics::append(const Diagnostics& other) {
  for (const auto& d : other.items_) add(d);
}

std::string Diagnostics::to_string(std::string_view file) const {
  std::ostringstream out;
  for (const auto& d : items_) {
    out << file << ':' << d.line << ':' << d.col << ": "
        << severity_name(d.severity) << ": " << d.message << '\n';
  }
  return out.str();
}

}  // namespace gka
