#include "tabletop/plan/location.hpp"

#include "tabletop/common/errors.hpp"
#include "tabletop/common/strings.hpp"

namespace tabletop::plan {

namespace {
constexpr std::string_view kOriginalPrefix = "original position of ";
constexpr std::string_view kCurrentPrefix = "current position of ";
constexpr std::string_view kHomePhrase = "robot home pose";
}  // namespace

LocationExpr parse_location(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == kHomePhrase) return LocationExpr::home();
  if (t.starts_with(kOriginalPrefix)) {
    const std::string_view name = trim(t.substr(kOriginalPrefix.size()));
    if (name.empty())
      throw Error(ErrorCode::ParseError, "location is missing an object name: '" + std::string(t) + "'");
    return LocationExpr::original_of(std::string(name));
  }
  if (t.starts_with(kCurrentPrefix)) {
    const std::string_view name = trim(t.substr(kCurrentPrefix.size()));
    if (name.empty())
      throw Error(ErrorCode::ParseError, "location is missing an object name: '" + std::string(t) + "'");
    return LocationExpr::current_of(std::string(name));
  }
  throw Error(ErrorCode::ParseError, "unrecognized location phrase: '" + std::string(t) + "'");
}

std::string serialize_location(const LocationExpr& loc) {
  switch (loc.kind) {
    case LocationKind::OriginalOf: return std::string(kOriginalPrefix) + loc.object;
    case LocationKind::CurrentOf: return std::string(kCurrentPrefix) + loc.object;
    case LocationKind::Home: return std::string(kHomePhrase);
  }
  return {};
}

}  // namespace tabletop::plan
