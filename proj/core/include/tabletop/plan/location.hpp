#pragma once

#include <string>
#include <string_view>

namespace tabletop::plan {

// A symbolic place in the workspace. Only three phrasings exist; anything
// else is a parse error rather than a guess.
enum class LocationKind { OriginalOf, CurrentOf, Home };

struct LocationExpr {
  LocationKind kind = LocationKind::Home;
  std::string object;  // empty iff kind == Home

  bool operator==(const LocationExpr&) const = default;

  static LocationExpr original_of(std::string name) {
    return {LocationKind::OriginalOf, std::move(name)};
  }
  static LocationExpr current_of(std::string name) {
    return {LocationKind::CurrentOf, std::move(name)};
  }
  static LocationExpr home() { return {LocationKind::Home, {}}; }
};

// "original position of X" / "current position of X" / "robot home pose"
LocationExpr parse_location(std::string_view text);
std::string serialize_location(const LocationExpr& loc);

}  // namespace tabletop::plan
