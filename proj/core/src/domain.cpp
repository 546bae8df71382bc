#include "vru/domain.hpp"

#include <cctype>

#include "vru/error.hpp"

namespace vru {

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

GeometryClass geometry_of(UseCase uc) noexcept {
  switch (uc) {
    case UseCase::kUC3:
    case UseCase::kUC4:
    case UseCase::kUC10:
    case UseCase::kUC11:
      return GeometryClass::kCrossing;
    case UseCase::kUC1:
    case UseCase::kUC2:
    case UseCase::kUC5:
    case UseCase::kUC6:
      return GeometryClass::kTurning;
    case UseCase::kUC9:
    case UseCase::kUC12:
      return GeometryClass::kLongitudinal;
  }
  return GeometryClass::kCrossing;
}

VruType vru_type_of(UseCase uc) noexcept {
  switch (uc) {
    case UseCase::kUC10:
    case UseCase::kUC11:
    case UseCase::kUC12:
      return VruType::kPedestrian;
    default:
      return VruType::kCyclist;
  }
}

AlgorithmFamily test_family_of(UseCase uc) noexcept {
  return is_longitudinal(uc) ? AlgorithmFamily::kBrakingAndSteering
                             : AlgorithmFamily::kBrakingOnly;
}

std::optional<UseCase> parse_use_case(std::string_view text) {
  if (iequals(text, "UC7") || iequals(text, "UC8")) {
    throw UseCaseError(std::string(text) +
                       " (dooring) is outside the assessed use cases");
  }
  return parse_enum<UseCase>(text);
}

std::string canonical_category(std::string_view text) {
  std::string out(text);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    out[i] = static_cast<char>(i == 0 ? std::toupper(c) : std::tolower(c));
  }
  return out;
}

}  // namespace vru
