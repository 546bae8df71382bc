#include <gtest/gtest.h>

#include <map>

#include "vru/csv.hpp"
#include "vru/error.hpp"
#include "vru/io.hpp"
#include "vru_test_support.hpp"

namespace vru {
namespace {

const std::string kHeader = std::string(kCrashesHeader) + "\n";

TEST(ParseCrashes, MapsFieldsDirectly) {
  const auto crashes = parse_crashes_text(kHeader + "c1,UC5,Cyclist,40,15,30,8,No,Urban,32\n");
  ASSERT_EQ(crashes.size(), 1u);
  EXPECT_EQ(crashes[0].id, "c1");
  EXPECT_EQ(crashes[0].use_case, UseCase::kUC5);
  EXPECT_EQ(crashes[0].car_speed_init_kmh, 40.0);
  EXPECT_EQ(crashes[0].vru_speed_init_kmh, 15.0);
  EXPECT_EQ(crashes[0].long_dist_m, 30.0);
  EXPECT_EQ(crashes[0].lat_dist_m, 8.0);
  EXPECT_EQ(crashes[0].orig_collision_speed_kmh, 32.0);
}

TEST(ParseCrashes, CollisionFasterThanInitialIsRowError) {
  try {
    parse_crashes_text(kHeader + "c1,UC5,Cyclist,40,15,30,8,No,Urban,32\n"
                                 "c2,UC5,Cyclist,40,15,30,8,No,Urban,45\n");
    FAIL() << "expected ValueError";
  } catch (const ValueError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
}

TEST(ParseCrashes, HeaderOnlyIsEmpty) { EXPECT_TRUE(parse_crashes_text(kHeader).empty()); }

TEST(ParseCrashes, RenamedColumnIsSchemaError) {
  std::string header = kHeader;
  header.replace(header.find("lat_dist_m"), 10, "lateral");
  EXPECT_THROW(parse_crashes_text(header), SchemaError);
}

TEST(ParseCrashes, DooringUseCasesRejected) {
  EXPECT_THROW(parse_crashes_text(kHeader + "c1,UC7,Cyclist,40,15,30,8,No,Urban,32\n"),
               UseCaseError);
  EXPECT_THROW(parse_crashes_text(kHeader + "c1,UC8,Cyclist,40,15,30,8,No,Urban,32\n"),
               UseCaseError);
}

TEST(ParseCrashes, DuplicateIdsRejected) {
  EXPECT_THROW(parse_crashes_text(kHeader + "c1,UC5,Cyclist,40,15,30,8,No,Urban,32\n"
                                            "c1,UC5,Cyclist,40,15,30,8,No,Urban,30\n"),
               Error);
}

TEST(ParseCrashes, LongitudinalOverlapBound) {
  EXPECT_THROW(parse_crashes_text(kHeader + "c1,UC9,Cyclist,50,15,30,2.5,No,Urban,32\n"),
               ValueError);
  EXPECT_NO_THROW(parse_crashes_text(kHeader + "c1,UC9,Cyclist,50,15,30,0.5,No,Urban,32\n"));
}

TEST(ParseCrashes, CategoriesAreCaseInsensitive) {
  const auto crashes =
      parse_crashes_text(kHeader + "c1,uc5,CYCLIST,40,15,30,8,notpermanent,rural,32\n");
  ASSERT_EQ(crashes.size(), 1u);
  EXPECT_EQ(crashes[0].sight_obstruction, SightObstruction::kNotPermanent);
  EXPECT_EQ(crashes[0].location, Location::kRural);
  EXPECT_NE(to_csv(crashes_table(crashes)).find("NotPermanent,Rural"), std::string::npos);
}

TEST(ParseTests, FixtureMatchesTestCountsPerCell) {
  const auto tests = parse_tests(std::filesystem::path(VRU_FIXTURE_DIR) / "prospect_tests.csv");
  EXPECT_EQ(tests.size(), 44u);
  std::map<std::pair<UseCase, int>, int> cells;
  std::map<UseCase, int> per_uc;
  for (const auto& t : tests) {
    EXPECT_TRUE(t.avoided);
    ++cells[{t.use_case, static_cast<int>(t.car_speed_init_kmh)}];
    ++per_uc[t.use_case];
  }
  EXPECT_EQ((cells[{UseCase::kUC4, 50}]), 7);
  EXPECT_EQ((cells[{UseCase::kUC2, 10}]), 3);
  EXPECT_EQ(per_uc[UseCase::kUC1], 3);
  EXPECT_EQ(per_uc[UseCase::kUC4], 13);
  EXPECT_EQ(per_uc[UseCase::kUC9], 4);
  EXPECT_EQ(per_uc[UseCase::kUC12], 4);
  EXPECT_EQ(per_uc.count(UseCase::kUC11), 0u);
}

TEST(ParseTests, AvoidedWithCollisionSpeedIsMismatch) {
  EXPECT_THROW(parse_tests_text(std::string(kTestsHeader) + "\nUC5,15,true,12.0,BrakingOnly\n"),
               MismatchError);
}

TEST(ParseTests, FamilyMustMatchGeometry) {
  EXPECT_THROW(parse_tests_text(std::string(kTestsHeader) + "\nUC9,30,true,,BrakingOnly\n"),
               ValueError);
}

TEST(ParseTests, MissingCollisionSpeedIsEmptyNotZero) {
  const auto tests =
      parse_tests_text(std::string(kTestsHeader) + "\nUC5,15,false,0,BrakingOnly\n");
  ASSERT_TRUE(tests[0].collision_speed_kmh.has_value());
  EXPECT_EQ(*tests[0].collision_speed_kmh, 0.0);
}

TEST(EmitTable, NumberFormatting) {
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(693.0), "693");
  Table t;
  t.header = {"a", "b"};
  EXPECT_EQ(to_csv(t), "a,b\n");
  t.rows.push_back({std::string("x,y"), 1.5});
  EXPECT_EQ(to_csv(t), "a,b\n\"x,y\",1.5\n");
}

TEST(EmitTable, BitIdenticalAcrossRuns) {
  testing::TempDir dir("emit");
  Table t;
  t.header = {"v"};
  for (int i = 0; i < 50; ++i) t.rows.push_back({std::sqrt(static_cast<double>(i))});
  emit_table(t, dir / "a.csv");
  emit_table(t, dir / "b.csv");
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
}

TEST(EmitTable, UnwritablePathIsIoError) {
  testing::TempDir dir("unwritable");
  write_file(dir / "plain", "x");
  Table t;
  t.header = {"v"};
  EXPECT_THROW(emit_table(t, dir / "plain" / "y.csv"), IoError);
}

TEST(Csv, QuotedFieldsAndCrlf) {
  const CsvDocument doc = parse_csv("a,b\r\n\"x \"\"q\"\", y\",2\r\n\r\n");
  ASSERT_EQ(doc.rows.size(), 1u);
  EXPECT_EQ(doc.rows[0][0], "x \"q\", y");
  EXPECT_EQ(doc.rows[0][1], "2");
}

TEST(RoundTrip, CrashesSurviveEmitAndParse) {
  std::vector<CrashRecord> crashes;
  for (int i = 0; i < 30; ++i) {
    const auto uc = all_values<UseCase>()[static_cast<std::size_t>(i % 10)];
    auto c = testing::make_crash("r" + std::to_string(i), uc, 30.0 + i, 4.125 + 0.5 * i,
                                 12.5 + i, is_longitudinal(uc) ? 0.375 : -3.25 + i, 10.0 + 0.5 * i,
                                 static_cast<SightObstruction>(i % 4),
                                 i % 3 ? Location::kUrban : Location::kRural);
    crashes.push_back(c);
  }
  EXPECT_EQ(parse_crashes_text(to_csv(crashes_table(crashes))), crashes);
}

TEST(RoundTrip, TestsAndPersonsSurviveEmitAndParse) {
  std::vector<TestObservation> tests = {
      {UseCase::kUC1, 10.0, true, std::nullopt, AlgorithmFamily::kBrakingOnly},
      {UseCase::kUC9, 40.0, false, 12.5, AlgorithmFamily::kBrakingAndSteering}};
  EXPECT_EQ(parse_tests_text(to_csv(tests_table(tests))), tests);

  PersonRecord full;
  full.vru_type = VruType::kPedestrian;
  full.injury = Injury::kSerious;
  full.age = 61.0;
  full.gender = Gender::kFemale;
  full.weather = "Rain";
  full.surface = "Wet";
  full.light = "Dark";
  full.site = "Junction";
  full.urban = false;
  full.collision_speed_kmh = 37.5;
  PersonRecord sparse;
  sparse.collision_speed_kmh = 12.0;
  const std::vector<PersonRecord> persons = {full, sparse};
  EXPECT_EQ(parse_persons_text(to_csv(persons_table(persons))), persons);
}

TEST(Domain, GeometryAndFamilies) {
  int longitudinal = 0;
  for (UseCase uc : all_values<UseCase>()) {
    if (is_longitudinal(uc)) {
      ++longitudinal;
      EXPECT_EQ(test_family_of(uc), AlgorithmFamily::kBrakingAndSteering);
    } else {
      EXPECT_EQ(test_family_of(uc), AlgorithmFamily::kBrakingOnly);
    }
  }
  EXPECT_EQ(longitudinal, 2);
  EXPECT_TRUE(is_longitudinal(UseCase::kUC9));
  EXPECT_TRUE(is_longitudinal(UseCase::kUC12));
  EXPECT_DOUBLE_EQ(kmh_to_ms(36.0), 10.0);
}

}  // namespace
}  // namespace vru
