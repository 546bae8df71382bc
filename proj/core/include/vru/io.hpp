#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vru/csv.hpp"
#include "vru/domain.hpp"
#include "vru/error.hpp"

namespace vru {

inline constexpr std::string_view kCrashesHeader =
    "id,use_case,vru_type,car_speed_init_kmh,vru_speed_init_kmh,long_dist_m,"
    "lat_dist_m,sight_obstruction,location,orig_collision_speed_kmh";
inline constexpr std::string_view kTestsHeader =
    "use_case,car_speed_init_kmh,avoided,collision_speed_kmh,algorithm_family";
inline constexpr std::string_view kPersonsHeader =
    "vru_type,injury,age,gender,weather,surface,light,site,urban,"
    "collision_speed_kmh";

// Throws SchemaError unless `header` equals the comma-joined `expected`.
void require_header(const std::vector<std::string>& header,
                    std::string_view expected, std::string_view what);

// Strict field parsers; `row` is only used for error location.
double parse_double_field(std::string_view text, std::size_t row,
                          std::string_view column);
bool parse_bool_field(std::string_view text, std::size_t row,
                      std::string_view column);

template <class E>
E parse_enum_field(std::string_view text, std::size_t row,
                   std::string_view column) {
  if (auto v = parse_enum<E>(text)) return *v;
  throw ValueError(row, "unrecognized value '" + std::string(text) +
                            "' in column " + std::string(column));
}

std::vector<CrashRecord> parse_crashes_text(std::string_view csv);
std::vector<CrashRecord> parse_crashes(const std::filesystem::path& path);

std::vector<TestObservation> parse_tests_text(std::string_view csv);
std::vector<TestObservation> parse_tests(const std::filesystem::path& path);

std::vector<PersonRecord> parse_persons_text(std::string_view csv);
std::vector<PersonRecord> parse_persons(const std::filesystem::path& path);

// Throws ValueError (with `row`) when a crash violates its invariants.
void validate_crash(const CrashRecord& crash, std::size_t row = 0);

Table crashes_table(const std::vector<CrashRecord>& crashes);
Table tests_table(const std::vector<TestObservation>& tests);
Table persons_table(const std::vector<PersonRecord>& persons);

}  // namespace vru
