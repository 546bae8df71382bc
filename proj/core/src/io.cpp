#include "vru/io.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>

namespace vru {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_header(std::string_view expected) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = expected.find(',', start);
    out.push_back(expected.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Rows of a parsed document with the field count checked and fields trimmed.
template <class Fn>
void for_each_row(const CsvDocument& doc, std::size_t columns, Fn&& fn) {
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const std::size_t row = i + 1;
    const auto& raw = doc.rows[i];
    if (raw.size() != columns) {
      throw ValueError(row, "expected " + std::to_string(columns) +
                                " fields, found " + std::to_string(raw.size()));
    }
    std::vector<std::string_view> fields;
    fields.reserve(raw.size());
    for (const auto& f : raw) fields.push_back(trim(f));
    fn(row, fields);
  }
}

std::optional<double> parse_optional_double(std::string_view text,
                                            std::size_t row,
                                            std::string_view column) {
  if (text.empty()) return std::nullopt;
  return parse_double_field(text, row, column);
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

void require_header(const std::vector<std::string>& header,
                    std::string_view expected, std::string_view what) {
  const auto cols = split_header(expected);
  bool ok = header.size() == cols.size();
  for (std::size_t i = 0; ok && i < cols.size(); ++i) {
    ok = trim(header[i]) == cols[i];
  }
  if (!ok) {
    std::string got;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) got += ',';
      got += header[i];
    }
    throw SchemaError(std::string(what) + " header mismatch: expected '" +
                      std::string(expected) + "', found '" + got + "'");
  }
}

double parse_double_field(std::string_view text, std::size_t row,
                          std::string_view column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ValueError(row, "column " + std::string(column) +
                              ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool_field(std::string_view text, std::size_t row,
                      std::string_view column) {
  if (iequals(text, "true") || iequals(text, "yes") || text == "1") return true;
  if (iequals(text, "false") || iequals(text, "no") || text == "0") return false;
  throw ValueError(row, "column " + std::string(column) +
                            ": not a boolean: '" + std::string(text) + "'");
}

void validate_crash(const CrashRecord& c, std::size_t row) {
  if (c.vru_type != vru_type_of(c.use_case)) {
    throw ValueError(row, "vru_type " + std::string(to_string(c.vru_type)) +
                              " does not match " +
                              std::string(to_string(c.use_case)));
  }
  if (!(c.car_speed_init_kmh > 0.0)) {
    throw ValueError(row, "car_speed_init_kmh must be > 0");
  }
  if (!(c.vru_speed_init_kmh >= 0.0)) {
    throw ValueError(row, "vru_speed_init_kmh must be >= 0");
  }
  if (!(c.long_dist_m > 0.0)) throw ValueError(row, "long_dist_m must be > 0");
  if (!(c.orig_collision_speed_kmh >= 0.0) ||
      c.orig_collision_speed_kmh > c.car_speed_init_kmh) {
    throw ValueError(row,
                     "orig_collision_speed_kmh must lie in [0, car_speed_init_kmh]");
  }
  if (is_longitudinal(c.use_case) && !(std::abs(c.lat_dist_m) < kCarWidthM)) {
    throw ValueError(row, "longitudinal lateral offset must be below the car width");
  }
}

std::vector<CrashRecord> parse_crashes_text(std::string_view csv) {
  const CsvDocument doc = parse_csv(csv);
  require_header(doc.header, kCrashesHeader, "crashes");
  std::vector<CrashRecord> out;
  out.reserve(doc.rows.size());
  std::unordered_set<std::string> ids;
  for_each_row(doc, 10, [&](std::size_t row, const std::vector<std::string_view>& f) {
    CrashRecord c;
    c.id = std::string(f[0]);
    if (c.id.empty()) throw ValueError(row, "empty id");
    const auto uc = parse_use_case(f[1]);
    if (!uc) throw ValueError(row, "unknown use case '" + std::string(f[1]) + "'");
    c.use_case = *uc;
    c.vru_type = parse_enum_field<VruType>(f[2], row, "vru_type");
    c.car_speed_init_kmh = parse_double_field(f[3], row, "car_speed_init_kmh");
    c.vru_speed_init_kmh = parse_double_field(f[4], row, "vru_speed_init_kmh");
    c.long_dist_m = parse_double_field(f[5], row, "long_dist_m");
    c.lat_dist_m = parse_double_field(f[6], row, "lat_dist_m");
    c.sight_obstruction =
        parse_enum_field<SightObstruction>(f[7], row, "sight_obstruction");
    c.location = parse_enum_field<Location>(f[8], row, "location");
    c.orig_collision_speed_kmh =
        parse_double_field(f[9], row, "orig_collision_speed_kmh");
    validate_crash(c, row);
    if (!ids.insert(c.id).second) {
      throw ValueError(row, "duplicate crash id '" + c.id + "'");
    }
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<CrashRecord> parse_crashes(const std::filesystem::path& path) {
  return parse_crashes_text(read_file(path));
}

std::vector<TestObservation> parse_tests_text(std::string_view csv) {
  const CsvDocument doc = parse_csv(csv);
  require_header(doc.header, kTestsHeader, "tests");
  std::vector<TestObservation> out;
  out.reserve(doc.rows.size());
  for_each_row(doc, 5, [&](std::size_t row, const std::vector<std::string_view>& f) {
    TestObservation t;
    const auto uc = parse_use_case(f[0]);
    if (!uc) throw ValueError(row, "unknown use case '" + std::string(f[0]) + "'");
    t.use_case = *uc;
    t.car_speed_init_kmh = parse_double_field(f[1], row, "car_speed_init_kmh");
    if (!(t.car_speed_init_kmh > 0.0)) {
      throw ValueError(row, "car_speed_init_kmh must be > 0");
    }
    t.avoided = parse_bool_field(f[2], row, "avoided");
    t.collision_speed_kmh = parse_optional_double(f[3], row, "collision_speed_kmh");
    t.algorithm_family =
        parse_enum_field<AlgorithmFamily>(f[4], row, "algorithm_family");
    if (t.avoided && t.collision_speed_kmh) {
      throw MismatchError("row " + std::to_string(row) +
                          ": avoided test carries a collision speed");
    }
    if (!t.avoided && !t.collision_speed_kmh) {
      throw ValueError(row, "collision_speed_kmh required when not avoided");
    }
    if (t.collision_speed_kmh && (*t.collision_speed_kmh < 0.0 ||
                                  *t.collision_speed_kmh > t.car_speed_init_kmh)) {
      throw ValueError(row, "collision_speed_kmh must lie in [0, car_speed_init_kmh]");
    }
    if (t.algorithm_family != test_family_of(t.use_case)) {
      throw ValueError(row, std::string(to_string(t.use_case)) + " requires " +
                                std::string(to_string(test_family_of(t.use_case))));
    }
    out.push_back(t);
  });
  return out;
}

std::vector<TestObservation> parse_tests(const std::filesystem::path& path) {
  return parse_tests_text(read_file(path));
}

std::vector<PersonRecord> parse_persons_text(std::string_view csv) {
  const CsvDocument doc = parse_csv(csv);
  require_header(doc.header, kPersonsHeader, "persons");
  std::vector<PersonRecord> out;
  out.reserve(doc.rows.size());
  for_each_row(doc, 10, [&](std::size_t row, const std::vector<std::string_view>& f) {
    PersonRecord p;
    p.vru_type = parse_enum_field<VruType>(f[0], row, "vru_type");
    p.injury = parse_enum_field<Injury>(f[1], row, "injury");
    p.age = parse_optional_double(f[2], row, "age");
    if (p.age && *p.age < 0.0) throw ValueError(row, "age must be >= 0");
    if (!f[3].empty()) p.gender = parse_enum_field<Gender>(f[3], row, "gender");
    p.weather = canonical_category(f[4]);
    p.surface = canonical_category(f[5]);
    p.light = canonical_category(f[6]);
    p.site = canonical_category(f[7]);
    if (!f[8].empty()) p.urban = parse_bool_field(f[8], row, "urban");
    p.collision_speed_kmh = parse_double_field(f[9], row, "collision_speed_kmh");
    if (p.collision_speed_kmh < 0.0) {
      throw ValueError(row, "collision_speed_kmh must be >= 0");
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<PersonRecord> parse_persons(const std::filesystem::path& path) {
  return parse_persons_text(read_file(path));
}

Table crashes_table(const std::vector<CrashRecord>& crashes) {
  Table t;
  for (auto col : split_header(kCrashesHeader)) t.header.emplace_back(col);
  for (const auto& c : crashes) {
    t.rows.push_back({c.id, std::string(to_string(c.use_case)),
                      std::string(to_string(c.vru_type)), c.car_speed_init_kmh,
                      c.vru_speed_init_kmh, c.long_dist_m, c.lat_dist_m,
                      std::string(to_string(c.sight_obstruction)),
                      std::string(to_string(c.location)),
                      c.orig_collision_speed_kmh});
  }
  return t;
}

Table tests_table(const std::vector<TestObservation>& tests) {
  Table t;
  for (auto col : split_header(kTestsHeader)) t.header.emplace_back(col);
  for (const auto& o : tests) {
    t.rows.push_back({std::string(to_string(o.use_case)), o.car_speed_init_kmh,
                      std::string(o.avoided ? "true" : "false"),
                      optional_number(o.collision_speed_kmh),
                      std::string(to_string(o.algorithm_family))});
  }
  return t;
}

Table persons_table(const std::vector<PersonRecord>& persons) {
  Table t;
  for (auto col : split_header(kPersonsHeader)) t.header.emplace_back(col);
  for (const auto& p : persons) {
    t.rows.push_back(
        {std::string(to_string(p.vru_type)), std::string(to_string(p.injury)),
         optional_number(p.age),
         p.gender ? std::string(to_string(*p.gender)) : std::string(),
         p.weather, p.surface, p.light, p.site,
         p.urban ? std::string(*p.urban ? "true" : "false") : std::string(),
         p.collision_speed_kmh});
  }
  return t;
}

}  // namespace vru
