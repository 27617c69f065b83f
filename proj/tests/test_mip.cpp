#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bpmp/errors.hpp"
#include "bpmp/formulations.hpp"
#include "bpmp/mip.hpp"
#include "support.hpp"

namespace bpmp {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) {
    if (l.find_first_not_of(' ') != std::string::npos && l.substr(l.find_first_not_of(' ')) == line) {
      return true;
    }
  }
  return false;
}

MilpModel one_variable(VarKind kind = VarKind::continuous) {
  MilpModel m;
  const VarRef x = m.add_variable("x", kind, 0, kind == VarKind::binary ? 1 : kInf);
  m.add_objective(x, 1.0);
  m.add_constraint("c1", {{x, 1.0}}, Sense::less_equal, 5);
  return m;
}

// Reference solution values on the enhanced triples model of T4, set by name.
Assignment reference_by_name(const MilpModel& m) {
  Assignment a(m.num_variables());
  for (std::size_t i = 0; i < m.num_variables(); ++i) a.set(VarRef{i}, 0.0);
  auto put = [&](const std::string& name, double v) { a.set(*m.find(name), v); };
  for (const char* x : {"x_1_2", "x_2_3", "x_3_4"}) put(x, 1);
  for (const char* y : {"y_1_2", "y_1_3", "y_1_4", "y_2_3", "y_2_4", "y_3_4"}) put(y, 1);
  put("u_1_3_2", 0.3);
  put("u_1_4_2", 0.2);
  put("u_2_4_3", 0.3);
  put("theta_1_2", 0.9);
  put("theta_2_3", 0.9);
  put("theta_3_4", 0.7);
  put("s_2", 1);
  put("s_3", 2);
  put("s_4", 3);
  return a;
}

TEST(EmitLp, OneVariableModel) {
  const std::string text = emit_lp(one_variable());
  EXPECT_TRUE(has_line(text, "Maximize"));
  EXPECT_TRUE(has_line(text, "obj: x"));
  EXPECT_TRUE(has_line(text, "c1: x <= 5"));
  EXPECT_TRUE(has_line(text, "End"));
  EXPECT_EQ(text.find("Binaries"), std::string::npos);
}

TEST(EmitLp, BinariesSection) {
  const std::string text = emit_lp(one_variable(VarKind::binary));
  const auto pos = text.find("Binaries");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NE(text.find(" x", pos), std::string::npos);
}

TEST(EmitLp, T4GoldenAndDeterminism) {
  const BuiltModel b = build_enhanced_triples(testing::t4());
  const std::string text = emit_lp(b.model);
  EXPECT_EQ(text, slurp(testing::fixture("t4_enhanced_triples.lp")));
  EXPECT_EQ(text, emit_lp(build_enhanced_triples(testing::t4()).model));
}

TEST(EmitMps, SectionsInOrder) {
  const std::string text = emit_mps(one_variable());
  const auto rows = text.find("ROWS");
  const auto cols = text.find("COLUMNS");
  const auto end = text.find("ENDATA");
  ASSERT_NE(rows, std::string::npos);
  EXPECT_LT(rows, cols);
  EXPECT_LT(cols, text.find("RHS"));
  EXPECT_LT(text.find("RHS"), end);
}

TEST(EmitMps, IntegerMarkers) {
  const std::string text = emit_mps(one_variable(VarKind::binary));
  const auto org = text.find("'INTORG'");
  const auto end = text.find("'INTEND'");
  ASSERT_NE(org, std::string::npos);
  ASSERT_NE(end, std::string::npos);
  EXPECT_LT(org, text.find("    x "));
  EXPECT_LT(text.find("    x "), end);
  EXPECT_NE(text.find("MARKER"), std::string::npos);
}

TEST(EmitMps, T4GoldenAndDeterminism) {
  const BuiltModel b = build_enhanced_triples(testing::t4());
  EXPECT_EQ(emit_mps(b.model), slurp(testing::fixture("t4_enhanced_triples.mps")));
  EXPECT_EQ(emit_mps(b.model), emit_mps(b.model));
}

TEST(EmitMps, ShortNamesAreUnique) {
  const BuiltModel b = build_enhanced_node_arc(testing::t4());
  const MpsNames names = mps_names(b.model);
  std::set<std::string> cols(names.columns.begin(), names.columns.end());
  std::set<std::string> rows(names.rows.begin(), names.rows.end());
  EXPECT_EQ(cols.size(), names.columns.size());
  EXPECT_EQ(rows.size(), names.rows.size());
  for (const auto& s : cols) EXPECT_LE(s.size(), 8u);
  for (const auto& s : rows) EXPECT_LE(s.size(), 8u);
}

TEST(FormatNumber, Rendering) {
  EXPECT_EQ(format_number(5), "5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(format_number(0.0001), "0.0001");
  EXPECT_EQ(format_number(123456789), "123456789");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  for (double x : {1e-4, 0.00123, 1.5, 99999.25, 5e8}) {
    EXPECT_EQ(format_number(x).find('e'), std::string::npos) << x;
  }
}

TEST(Model, RegistryErrors) {
  MilpModel m;
  const VarRef x = m.add_variable("x", VarKind::continuous);
  EXPECT_THROW(m.add_variable("x", VarKind::continuous), ModelError);
  const VarRef b = m.add_variable("b", VarKind::binary, -1, 2);
  EXPECT_EQ(m.variable(b).lower, 0.0);
  EXPECT_EQ(m.variable(b).upper, 1.0);
  EXPECT_THROW(m.add_variable("z", VarKind::continuous, 3, 1), ModelError);
  EXPECT_THROW(m.add_constraint("r", {{VarRef{7}, 1.0}}, Sense::less_equal, 0), ModelError);
  m.add_constraint("r", {{x, 1.0}, {x, 2.0}}, Sense::less_equal, 0);
  ASSERT_EQ(m.constraints().front().terms.size(), 1u);
  EXPECT_DOUBLE_EQ(m.constraints().front().terms.front().coef, 3.0);
  EXPECT_THROW(m.add_constraint("r", {{x, 1.0}}, Sense::less_equal, 0), ModelError);
}

TEST(Evaluate, EmptyModel) {
  const Evaluation e = evaluate(MilpModel{}, Assignment{});
  EXPECT_EQ(e.objective, 0.0);
  EXPECT_TRUE(e.violations.empty());
}

TEST(Evaluate, MissingValueNamesVariable) {
  const MilpModel m = one_variable();
  try {
    evaluate(m, Assignment(1));
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
  }
}

TEST(Evaluate, ReferenceSolutionIsFeasible) {
  const BuiltModel b = build_enhanced_triples(testing::t4());
  const Evaluation e = evaluate(b.model, reference_by_name(b.model));
  for (const Violation& v : e.violations) ADD_FAILURE() << v.name << " " << v.slack;
  EXPECT_NEAR(e.objective, 0.2, 1e-9);
}

TEST(Evaluate, CapacityBreachNamesConditionalRow) {
  const BuiltModel b = build_enhanced_triples(testing::t4());
  Assignment a = reference_by_name(b.model);
  a.set(*b.model.find("theta_1_2"), 1.2);
  const Evaluation e = evaluate(b.model, a);
  const bool named = std::any_of(e.violations.begin(), e.violations.end(),
                                 [](const Violation& v) { return v.name == "cond_1_2"; });
  EXPECT_TRUE(named);
}

TEST(Evaluate, IntegralityAndBounds) {
  MilpModel m = one_variable(VarKind::binary);
  Assignment a(1);
  a.set(VarRef{0}, 0.5);
  const Evaluation e = evaluate(m, a);
  ASSERT_EQ(e.violations.size(), 1u);
  EXPECT_EQ(e.violations.front().name, "integrality:x");
  a.set(VarRef{0}, 1.0 + 1e-7);
  EXPECT_TRUE(evaluate(m, a).feasible());
}

// Random models checked against a direct slack computation. Values and
// coefficients sit on a coarse grid so no row lands near the tolerance.
TEST(Evaluate, MatchesBruteForceOnRandomModels) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> val(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    MilpModel m;
    const int nv = 1 + trial % 5;
    for (int v = 0; v < nv; ++v) {
      const VarRef r = m.add_variable("v" + std::to_string(v), VarKind::continuous, -kInf, kInf);
      m.add_objective(r, coef(rng));
    }
    std::vector<std::vector<int>> rows;
    std::vector<int> rhs;
    std::vector<Sense> senses;
    for (int c = 0; c < 4; ++c) {
      std::vector<Term> terms;
      std::vector<int> dense(nv);
      for (int v = 0; v < nv; ++v) {
        dense[v] = coef(rng);
        if (dense[v] != 0) terms.push_back({VarRef{static_cast<std::size_t>(v)}, double(dense[v])});
      }
      const Sense s = static_cast<Sense>(c % 3);
      m.add_constraint("r" + std::to_string(c), terms, s, val(rng));
      rows.push_back(dense);
      rhs.push_back(static_cast<int>(m.constraints().back().rhs));
      senses.push_back(s);
    }
    std::vector<double> x(nv);
    for (double& xi : x) xi = val(rng) * 0.5;
    const Evaluation e = evaluate(m, Assignment(x));
    std::set<std::string> expected;
    double obj = 0;
    for (int v = 0; v < nv; ++v) obj += m.objective_coef(VarRef{std::size_t(v)}) * x[v];
    for (int c = 0; c < 4; ++c) {
      double lhs = 0;
      for (int v = 0; v < nv; ++v) lhs += rows[c][v] * x[v];
      const bool bad = (senses[c] == Sense::less_equal && lhs > rhs[c]) ||
                       (senses[c] == Sense::greater_equal && lhs < rhs[c]) ||
                       (senses[c] == Sense::equal && lhs != rhs[c]);
      if (bad) expected.insert("r" + std::to_string(c));
    }
    std::set<std::string> got;
    for (const Violation& v : e.violations) got.insert(v.name);
    ASSERT_EQ(got, expected) << trial;
    ASSERT_DOUBLE_EQ(e.objective, obj);
  }
}

TEST(ModelStats, CountsRegisteredItems) {
  const ModelStats s = model_stats(one_variable(VarKind::binary));
  EXPECT_EQ(s, (ModelStats{1, 0, 1}));
  const ModelStats t = model_stats(build_enhanced_triples(testing::t4()).model);
  EXPECT_EQ(t.binaries, 13u);
  EXPECT_EQ(t.constraints, 29u);
  EXPECT_EQ(t.continuous, 7u + 4u + 6u);
}

}  // namespace
}  // namespace bpmp
