#pragma once

#include <string>
#include <vector>

namespace tabletop {

// One problem found while checking a plan or action sequence. step_index is
// the offending element's position, or -1 for whole-document issues.
struct Diagnostic {
  int step_index = -1;
  std::string code;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

struct ValidationReport {
  std::vector<Diagnostic> issues;

  bool ok() const { return issues.empty(); }

  std::string summary() const {
    std::string out;
    for (const auto& d : issues) {
      if (!out.empty()) out += "; ";
      if (d.step_index >= 0) out += "step " + std::to_string(d.step_index) + ": ";
      out += d.message;
    }
    return out;
  }
};

}  // namespace tabletop
