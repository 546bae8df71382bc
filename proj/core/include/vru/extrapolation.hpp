#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vru/csv.hpp"
#include "vru/domain.hpp"
#include "vru/severity.hpp"

namespace vru {

enum class TreeVariable { kAge, kGender, kLight, kSite, kSurface, kUrban, kWeather };
VRU_ENUM_NAMES(TreeVariable, "age"sv, "gender"sv, "light"sv, "site"sv, "surface"sv,
               "urban"sv, "weather"sv);

inline bool is_numeric(TreeVariable v) noexcept { return v == TreeVariable::kAge; }

// Categorical value of a person ("Urban"/"NotUrban" for the urban flag);
// nullopt when missing. Not valid for age.
std::optional<std::string> category_of(const PersonRecord& person, TreeVariable variable);

struct Split {
  TreeVariable variable = TreeVariable::kAge;
  double threshold = 0.0;               // numeric: left iff value <= threshold
  std::vector<std::string> left_levels;  // categorical: left iff value in set

  bool operator==(const Split&) const = default;
};

// Rule text for the left (true) or right branch.
std::string branch_rule(const Split& split, bool left);

// Class counts indexed by Injury (Slight, Serious, Fatal).
using ClassCounts = std::array<std::int64_t, 3>;

struct TreeNode {
  int id = 1;
  int depth = 0;
  std::optional<Split> split;
  int left = -1;   // index into Tree::nodes
  int right = -1;
  ClassCounts counts{};
  Injury predicted = Injury::kSlight;
  std::string rule;  // conjunction of branch rules from the root
};

Injury predicted_class(const ClassCounts& counts) noexcept;
double gini(const ClassCounts& counts) noexcept;

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& root() const { return nodes.front(); }
  std::vector<int> leaf_ids() const;
  const TreeNode& node(int id) const;
};

struct TreeParams {
  int max_depth = 3;
  int min_leaf = 30;
  int max_exhaustive_levels = 8;
};

Tree build_tree(const std::vector<PersonRecord>& persons, const TreeParams& params = {});

// Leaf id reached by a person; MissingVariableError when a needed variable is
// absent (`row` is used in the message).
int route(const Tree& tree, const PersonRecord& person, std::size_t row = 0);

// Counts per leaf; every leaf appears, possibly with zeros.
std::map<int, ClassCounts> apply_tree(const Tree& tree, const std::vector<PersonRecord>& persons);
std::map<int, ClassCounts> leaf_counts(const Tree& tree);

// Level-specific frequency: fatal count, or serious + fatal.
std::int64_t level_count(const ClassCounts& counts, RiskLevel level) noexcept;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// target / indepth reduced by their gcd; ZeroDenominatorError when indepth is 0.
Rational make_factor(std::int64_t target, std::int64_t indepth, const std::string& where);

struct ExtrapolationFactor {
  RiskLevel level = RiskLevel::kFatal;
  int node = 0;
  std::string rule;
  std::int64_t indepth = 0;
  std::int64_t target = 0;
  Rational factor;
};

// One factor per (level, leaf) with a positive in-depth frequency.
std::vector<ExtrapolationFactor> compute_factors(const Tree& tree,
                                                 const std::map<int, ClassCounts>& indepth,
                                                 const std::map<int, ClassCounts>& target);

// Sum over nodes of reduction * factor; a nonzero reduction in a node without
// a factor is a ZeroDenominatorError.
double extrapolate_reduction(const std::map<int, double>& per_node_reduction,
                             const std::vector<ExtrapolationFactor>& factors, RiskLevel level);

// Leaf weights for a crash. Splits on variables the crash does not carry are
// shared between children in proportion to their in-depth level frequency
// (total count when that frequency is zero in both).
std::map<int, double> route_crash(const Tree& tree, const CrashRecord& crash, RiskLevel level);

std::string tree_text(const Tree& tree, const std::string& title);
Table factors_table(VruType type, const std::vector<ExtrapolationFactor>& factors);

}  // namespace vru
