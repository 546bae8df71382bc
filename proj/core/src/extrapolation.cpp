#include "vru/extrapolation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "vru/error.hpp"

namespace vru {

namespace {

constexpr double kMinGain = 1e-12;

std::string join_levels(const std::vector<std::string>& levels) {
  std::string out = "{";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ", ";
    out += levels[i];
  }
  return out + "}";
}

std::int64_t total(const ClassCounts& c) noexcept { return c[0] + c[1] + c[2]; }

ClassCounts count_classes(const std::vector<PersonRecord>& persons,
                          const std::vector<std::size_t>& idx) {
  ClassCounts c{};
  for (std::size_t i : idx) ++c[static_cast<std::size_t>(persons[i].injury)];
  return c;
}

double split_gain(const ClassCounts& parent, const ClassCounts& left) {
  ClassCounts right{};
  for (std::size_t k = 0; k < 3; ++k) right[k] = parent[k] - left[k];
  const double n = static_cast<double>(total(parent));
  const double nl = static_cast<double>(total(left));
  const double nr = static_cast<double>(total(right));
  return gini(parent) - nl / n * gini(left) - nr / n * gini(right);
}

struct Candidate {
  Split split;
  double gain = 0.0;
  bool found = false;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<PersonRecord>& persons, const TreeParams& params)
      : persons_(persons), params_(params) {}

  Tree build() {
    std::vector<std::size_t> all(persons_.size());
    std::iota(all.begin(), all.end(), 0);
    tree_.nodes.push_back({});
    grow(0, 1, 0, all, "");
    return std::move(tree_);
  }

 private:
  void grow(int index, int id, int depth, const std::vector<std::size_t>& idx,
            const std::string& rule) {
    TreeNode node;
    node.id = id;
    node.depth = depth;
    node.counts = count_classes(persons_, idx);
    node.predicted = predicted_class(node.counts);
    node.rule = rule;
    tree_.nodes[static_cast<std::size_t>(index)] = node;

    if (depth >= params_.max_depth || gini(node.counts) == 0.0 ||
        idx.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) {
      return;
    }
    Candidate best;
    for (TreeVariable var : all_values<TreeVariable>()) {
      consider(var, idx, node.counts, best);
    }
    if (!best.found) return;

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : idx) {
      (goes_left(best.split, persons_[i]) ? left_idx : right_idx).push_back(i);
    }
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    const int right = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    auto& parent = tree_.nodes[static_cast<std::size_t>(index)];
    parent.split = best.split;
    parent.left = left;
    parent.right = right;
    const std::string prefix = rule.empty() ? "" : rule + " and ";
    grow(left, 2 * id, depth + 1, left_idx, prefix + branch_rule(best.split, true));
    grow(right, 2 * id + 1, depth + 1, right_idx, prefix + branch_rule(best.split, false));
  }

  static bool goes_left(const Split& s, const PersonRecord& p) {
    if (is_numeric(s.variable)) return *p.age <= s.threshold;
    const auto cat = category_of(p, s.variable);
    return std::find(s.left_levels.begin(), s.left_levels.end(), *cat) != s.left_levels.end();
  }

  void offer(Candidate& best, const Split& split, const ClassCounts& parent,
             const ClassCounts& left) const {
    const std::int64_t nl = total(left);
    const std::int64_t nr = total(parent) - nl;
    if (nl < params_.min_leaf || nr < params_.min_leaf) return;
    const double gain = split_gain(parent, left);
    if (gain > kMinGain && gain > best.gain) {
      best.split = split;
      best.gain = gain;
      best.found = true;
    }
  }

  void consider(TreeVariable var, const std::vector<std::size_t>& idx,
                const ClassCounts& parent, Candidate& best) const {
    if (is_numeric(var)) {
      std::vector<std::pair<double, Injury>> values;
      for (std::size_t i : idx) {
        if (!persons_[i].age) return;
        values.emplace_back(*persons_[i].age, persons_[i].injury);
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      ClassCounts left{};
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        ++left[static_cast<std::size_t>(values[i].second)];
        if (values[i].first == values[i + 1].first) continue;
        Split s;
        s.variable = var;
        s.threshold = 0.5 * (values[i].first + values[i + 1].first);
        offer(best, s, parent, left);
      }
      return;
    }

    std::map<std::string, ClassCounts> by_level;
    for (std::size_t i : idx) {
      const auto cat = category_of(persons_[i], var);
      if (!cat) return;
      ++by_level[*cat][static_cast<std::size_t>(persons_[i].injury)];
    }
    if (by_level.size() < 2) return;
    std::vector<std::string> levels;
    for (const auto& [name, c] : by_level) levels.push_back(name);

    auto evaluate_set = [&](const std::vector<std::string>& left_levels) {
      ClassCounts left{};
      for (const auto& l : left_levels) {
        const auto& c = by_level.at(l);
        for (std::size_t k = 0; k < 3; ++k) left[k] += c[k];
      }
      Split s;
      s.variable = var;
      s.left_levels = left_levels;
      offer(best, s, parent, left);
    };

    const std::size_t l = levels.size();
    if (static_cast<int>(l) <= params_.max_exhaustive_levels) {
      // Masks containing the first level enumerate each binary partition once.
      for (unsigned mask = 1; mask < (1u << l) - 1; mask += 2) {
        std::vector<std::string> left_levels;
        for (std::size_t j = 0; j < l; ++j) {
          if (mask & (1u << j)) left_levels.push_back(levels[j]);
        }
        evaluate_set(left_levels);
      }
      return;
    }
    // Many levels: order by mean severity and try contiguous prefixes.
    std::vector<std::pair<double, std::string>> ordered;
    for (const auto& [name, c] : by_level) {
      ordered.emplace_back(static_cast<double>(c[1] + 2 * c[2]) / static_cast<double>(total(c)),
                           name);
    }
    std::sort(ordered.begin(), ordered.end());
    std::vector<std::string> prefix;
    for (std::size_t j = 0; j + 1 < ordered.size(); ++j) {
      prefix.push_back(ordered[j].second);
      std::vector<std::string> sorted = prefix;
      std::sort(sorted.begin(), sorted.end());
      evaluate_set(sorted);
    }
  }

  const std::vector<PersonRecord>& persons_;
  TreeParams params_;
  Tree tree_;
};

}  // namespace

std::optional<std::string> category_of(const PersonRecord& p, TreeVariable variable) {
  auto text = [](const std::string& s) -> std::optional<std::string> {
    if (s.empty()) return std::nullopt;
    return canonical_category(s);
  };
  switch (variable) {
    case TreeVariable::kGender:
      if (!p.gender) return std::nullopt;
      return std::string(to_string(*p.gender));
    case TreeVariable::kLight:
      return text(p.light);
    case TreeVariable::kSite:
      return text(p.site);
    case TreeVariable::kSurface:
      return text(p.surface);
    case TreeVariable::kWeather:
      return text(p.weather);
    case TreeVariable::kUrban:
      if (!p.urban) return std::nullopt;
      return std::string(*p.urban ? "Urban" : "NotUrban");
    case TreeVariable::kAge:
      break;
  }
  return std::nullopt;
}

std::string branch_rule(const Split& split, bool left) {
  const std::string name(to_string(split.variable));
  if (is_numeric(split.variable)) {
    std::ostringstream os;
    os << name << (left ? " <= " : " > ") << split.threshold;
    return os.str();
  }
  if (split.left_levels.size() == 1) {
    return name + (left ? " = " : " != ") + split.left_levels.front();
  }
  return name + (left ? " in " : " not in ") + join_levels(split.left_levels);
}

Injury predicted_class(const ClassCounts& c) noexcept {
  // Ties resolve towards the more severe class.
  Injury best = Injury::kFatal;
  for (Injury k : {Injury::kSerious, Injury::kSlight}) {
    if (c[static_cast<std::size_t>(k)] > c[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

double gini(const ClassCounts& c) noexcept {
  const double n = static_cast<double>(total(c));
  if (n == 0.0) return 0.0;
  double s = 0.0;
  for (auto k : c) {
    const double p = static_cast<double>(k) / n;
    s += p * p;
  }
  return 1.0 - s;
}

std::vector<int> Tree::leaf_ids() const {
  std::vector<int> out;
  for (const auto& n : nodes) {
    if (!n.split) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const TreeNode& Tree::node(int id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw ValueError(0, "no tree node " + std::to_string(id));
}

Tree build_tree(const std::vector<PersonRecord>& persons, const TreeParams& params) {
  if (params.max_depth < 0 || params.min_leaf < 1) {
    throw ConfigError("tree needs max_depth >= 0 and min_leaf >= 1");
  }
  if (persons.size() < 2 * static_cast<std::size_t>(params.min_leaf)) {
    throw InsufficientDataError(std::to_string(persons.size()) + " records, at least " +
                                std::to_string(2 * params.min_leaf) + " required");
  }
  std::set<Injury> classes;
  for (const auto& p : persons) classes.insert(p.injury);
  if (classes.size() < 2) throw SingleClassError("all records share one injury class");
  return TreeBuilder(persons, params).build();
}

int route(const Tree& tree, const PersonRecord& person, std::size_t row) {
  const TreeNode* n = &tree.root();
  while (n->split) {
    const Split& s = *n->split;
    bool left = false;
    if (is_numeric(s.variable)) {
      if (!person.age) {
        throw MissingVariableError("variable age missing at row " + std::to_string(row));
      }
      left = *person.age <= s.threshold;
    } else {
      const auto cat = category_of(person, s.variable);
      if (!cat) {
        throw MissingVariableError("variable " + std::string(to_string(s.variable)) +
                                   " missing at row " + std::to_string(row));
      }
      left = std::find(s.left_levels.begin(), s.left_levels.end(), *cat) !=
             s.left_levels.end();
    }
    n = &tree.nodes[static_cast<std::size_t>(left ? n->left : n->right)];
  }
  return n->id;
}

std::map<int, ClassCounts> leaf_counts(const Tree& tree) {
  std::map<int, ClassCounts> out;
  for (const auto& n : tree.nodes) {
    if (!n.split) out[n.id] = n.counts;
  }
  return out;
}

std::map<int, ClassCounts> apply_tree(const Tree& tree, const std::vector<PersonRecord>& persons) {
  std::map<int, ClassCounts> out;
  for (int id : tree.leaf_ids()) out[id] = ClassCounts{};
  for (std::size_t i = 0; i < persons.size(); ++i) {
    ++out[route(tree, persons[i], i + 1)][static_cast<std::size_t>(persons[i].injury)];
  }
  return out;
}

std::int64_t level_count(const ClassCounts& c, RiskLevel level) noexcept {
  const std::int64_t fatal = c[static_cast<std::size_t>(Injury::kFatal)];
  if (level == RiskLevel::kFatal) return fatal;
  return fatal + c[static_cast<std::size_t>(Injury::kSerious)];
}

Rational make_factor(std::int64_t target, std::int64_t indepth, const std::string& where) {
  if (indepth <= 0) {
    throw ZeroDenominatorError("zero in-depth frequency for " + where);
  }
  const std::int64_t g = std::gcd(target, indepth);
  return {target / g, indepth / g};
}

std::vector<ExtrapolationFactor> compute_factors(const Tree& tree,
                                                 const std::map<int, ClassCounts>& indepth,
                                                 const std::map<int, ClassCounts>& target) {
  std::vector<ExtrapolationFactor> out;
  for (RiskLevel level : {RiskLevel::kFatal, RiskLevel::kSeriousOrWorse}) {
    for (int id : tree.leaf_ids()) {
      const auto it_in = indepth.find(id);
      const std::int64_t in = it_in == indepth.end() ? 0 : level_count(it_in->second, level);
      if (in == 0) continue;
      const auto it_t = target.find(id);
      const std::int64_t tg = it_t == target.end() ? 0 : level_count(it_t->second, level);
      ExtrapolationFactor f;
      f.level = level;
      f.node = id;
      f.rule = tree.node(id).rule.empty() ? "all" : tree.node(id).rule;
      f.indepth = in;
      f.target = tg;
      f.factor = make_factor(tg, in, std::string(to_string(level)) + " node " +
                                         std::to_string(id));
      out.push_back(f);
    }
  }
  return out;
}

double extrapolate_reduction(const std::map<int, double>& per_node_reduction,
                             const std::vector<ExtrapolationFactor>& factors, RiskLevel level) {
  double sum = 0.0;
  for (const auto& [node, reduction] : per_node_reduction) {
    const auto it = std::find_if(factors.begin(), factors.end(), [&](const auto& f) {
      return f.level == level && f.node == node;
    });
    if (it == factors.end()) {
      if (reduction == 0.0) continue;
      throw ZeroDenominatorError("no factor for " + std::string(to_string(level)) + " node " +
                                 std::to_string(node));
    }
    sum += reduction * it->factor.value();
  }
  return sum;
}

std::map<int, double> route_crash(const Tree& tree, const CrashRecord& crash, RiskLevel level) {
  std::map<int, double> out;
  struct Item {
    int index;
    double weight;
  };
  std::vector<Item> stack{{0, 1.0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(it.index)];
    if (!n.split) {
      out[n.id] += it.weight;
      continue;
    }
    if (n.split->variable == TreeVariable::kUrban) {
      const std::string cat = crash.location == Location::kUrban ? "Urban" : "NotUrban";
      const auto& lv = n.split->left_levels;
      const bool left = std::find(lv.begin(), lv.end(), cat) != lv.end();
      stack.push_back({left ? n.left : n.right, it.weight});
      continue;
    }
    const auto& l = tree.nodes[static_cast<std::size_t>(n.left)].counts;
    const auto& r = tree.nodes[static_cast<std::size_t>(n.right)].counts;
    double wl = static_cast<double>(level_count(l, level));
    double wr = static_cast<double>(level_count(r, level));
    if (wl + wr == 0.0) {
      wl = static_cast<double>(total(l));
      wr = static_cast<double>(total(r));
    }
    // Right pushed first so the left branch is expanded first.
    stack.push_back({n.right, it.weight * wr / (wl + wr)});
    stack.push_back({n.left, it.weight * wl / (wl + wr)});
  }
  return out;
}

std::string tree_text(const Tree& tree, const std::string& title) {
  std::string out = title + "\n";
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    std::string branch = "root";
    if (!n.rule.empty()) {
      const auto pos = n.rule.rfind(" and ");
      branch = pos == std::string::npos ? n.rule : n.rule.substr(pos + 5);
    }
    out += std::string(2 * static_cast<std::size_t>(n.depth), ' ') + std::to_string(n.id) +
           ", " + branch + ", " + std::to_string(n.counts[2]) + "/" +
           std::to_string(n.counts[1]) + "/" + std::to_string(n.counts[0]) + ", " +
           std::string(to_string(n.predicted)) + (n.split ? "" : " (leaf)") + "\n";
    if (n.split) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

Table factors_table(VruType type, const std::vector<ExtrapolationFactor>& factors) {
  Table t;
  t.header = {"vru_type", "level", "node_rule", "factor"};
  for (const auto& f : factors) {
    t.rows.push_back({std::string(to_string(type)), std::string(to_string(f.level)), f.rule,
                      f.factor.value()});
  }
  return t;
}

}  // namespace vru
