#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace vru {

// Canonical names for every enumeration that crosses a file boundary. Parsing
// is case-insensitive; emission always uses the spelling listed here.
template <class E>
struct EnumNames;

#define VRU_ENUM_NAMES(E, ...)                                    \
  template <>                                                     \
  struct EnumNames<E> {                                           \
    static constexpr std::array names = {__VA_ARGS__};            \
  }

enum class UseCase { kUC1, kUC2, kUC3, kUC4, kUC5, kUC6, kUC9, kUC10, kUC11, kUC12 };
enum class GeometryClass { kCrossing, kTurning, kLongitudinal };
enum class VruType { kCyclist, kPedestrian };
enum class SightObstruction { kNo, kNotPermanent, kPermanent, kOther };
enum class Location { kUrban, kRural };
enum class AlgorithmFamily { kBrakingOnly, kBrakingAndSteering };
enum class Injury { kSlight, kSerious, kFatal };
enum class Gender { kMale, kFemale };

using namespace std::string_view_literals;
VRU_ENUM_NAMES(UseCase, "UC1"sv, "UC2"sv, "UC3"sv, "UC4"sv, "UC5"sv, "UC6"sv,
               "UC9"sv, "UC10"sv, "UC11"sv, "UC12"sv);
VRU_ENUM_NAMES(GeometryClass, "Crossing"sv, "Turning"sv, "Longitudinal"sv);
VRU_ENUM_NAMES(VruType, "Cyclist"sv, "Pedestrian"sv);
VRU_ENUM_NAMES(SightObstruction, "No"sv, "NotPermanent"sv, "Permanent"sv,
               "Other"sv);
VRU_ENUM_NAMES(Location, "Urban"sv, "Rural"sv);
VRU_ENUM_NAMES(AlgorithmFamily, "BrakingOnly"sv, "BrakingAndSteering"sv);
VRU_ENUM_NAMES(Injury, "Slight"sv, "Serious"sv, "Fatal"sv);
VRU_ENUM_NAMES(Gender, "Male"sv, "Female"sv);

bool iequals(std::string_view a, std::string_view b) noexcept;

template <class E>
constexpr std::size_t enum_count() {
  return EnumNames<E>::names.size();
}

template <class E>
std::string_view to_string(E value) {
  return EnumNames<E>::names[static_cast<std::size_t>(value)];
}

template <class E>
std::optional<E> parse_enum(std::string_view text) {
  const auto& names = EnumNames<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (iequals(names[i], text)) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <class E>
constexpr std::array<E, EnumNames<E>::names.size()> all_values() {
  std::array<E, EnumNames<E>::names.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
  return out;
}

GeometryClass geometry_of(UseCase uc) noexcept;
VruType vru_type_of(UseCase uc) noexcept;
inline bool is_longitudinal(UseCase uc) noexcept {
  return geometry_of(uc) == GeometryClass::kLongitudinal;
}
// Test algorithm family used on proving grounds for this use case.
AlgorithmFamily test_family_of(UseCase uc) noexcept;

// Parses "UC1".."UC12". UC7/UC8 (dooring) throw UseCaseError, anything else
// unknown returns nullopt.
std::optional<UseCase> parse_use_case(std::string_view text);

constexpr double kKmhPerMs = 3.6;
constexpr double kmh_to_ms(double kmh) noexcept { return kmh / kKmhPerMs; }
constexpr double ms_to_kmh(double ms) noexcept { return ms * kKmhPerMs; }

// Longitudinal overlap bound applied at ingestion (|lat_dist| < car width).
constexpr double kCarWidthM = 1.8;

struct CrashRecord {
  std::string id;
  UseCase use_case = UseCase::kUC1;
  VruType vru_type = VruType::kCyclist;
  double car_speed_init_kmh = 0.0;
  double vru_speed_init_kmh = 0.0;
  double long_dist_m = 0.0;  // car front to conflict point (gap for longitudinal)
  double lat_dist_m = 0.0;   // VRU to conflict point, signed by approach side
  SightObstruction sight_obstruction = SightObstruction::kNo;
  Location location = Location::kUrban;
  double orig_collision_speed_kmh = 0.0;

  bool operator==(const CrashRecord&) const = default;
};

struct TestObservation {
  UseCase use_case = UseCase::kUC1;
  double car_speed_init_kmh = 0.0;
  bool avoided = true;
  std::optional<double> collision_speed_kmh;
  AlgorithmFamily algorithm_family = AlgorithmFamily::kBrakingOnly;

  bool operator==(const TestObservation&) const = default;
};

struct PersonRecord {
  VruType vru_type = VruType::kCyclist;
  Injury injury = Injury::kSlight;
  std::optional<double> age;
  std::optional<Gender> gender;
  // Free categorical covariates; empty means missing.
  std::string weather;
  std::string surface;
  std::string light;
  std::string site;
  std::optional<bool> urban;
  double collision_speed_kmh = 0.0;

  bool operator==(const PersonRecord&) const = default;
};

// Capitalizes the first letter and lower-cases the rest ("dRY" -> "Dry").
std::string canonical_category(std::string_view text);

}  // namespace vru
