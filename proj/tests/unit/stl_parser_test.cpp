#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/formula.hpp"
#include "stlfunnel/stl/parser.hpp"
#include "stlfunnel/stl/robustness.hpp"

using namespace stlfunnel;
using namespace stlfunnel::stl;

namespace {

ErrorCode code_of(std::string_view text) {
  try {
    parse_task(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::Io;
}

}  // namespace

TEST(Parser, EventuallyBallToPoint) {
  TaskFormula t = parse_task("F[5,15] dist(2,[90,90]) <= 5");
  ASSERT_EQ(t.units.size(), 1u);
  EXPECT_EQ(t.shape, TaskShape::Single);
  const PhiFormula& phi = t.units[0];
  EXPECT_EQ(phi.op, TemporalOp::Eventually);
  EXPECT_EQ(phi.a, 5.0);
  EXPECT_EQ(phi.b, 15.0);
  ASSERT_EQ(phi.body.terms.size(), 1u);
  const auto& lit = std::get<Literal>(phi.body.terms[0]);
  const auto& atom = std::get<PointDistAtom>(lit.atom);
  EXPECT_EQ(atom.agent, 2);
  EXPECT_EQ(atom.point, (std::vector<double>{90, 90}));
  EXPECT_EQ(atom.radius, 5.0);
}

TEST(Parser, AlwaysConjunction) {
  TaskFormula t = parse_task("G[0,15] (dist(1,2) <= 10 && dist(1,3) <= 10)");
  ASSERT_EQ(t.units.size(), 1u);
  EXPECT_EQ(t.units[0].op, TemporalOp::Always);
  ASSERT_EQ(t.units[0].body.terms.size(), 2u);
  const auto& b = std::get<PairDistAtom>(std::get<Literal>(t.units[0].body.terms[1]).atom);
  EXPECT_EQ(b.a, 1);
  EXPECT_EQ(b.b, 3);
}

TEST(Parser, Errors) {
  EXPECT_EQ(code_of("F[5,3] dist(1,2) <= 1"), ErrorCode::TimeBoundOrder);
  EXPECT_EQ(code_of("F[0,5] dist(1,2) <= 1 && F[4,6] dist(1,2) <= 1"), ErrorCode::TimeBoundOrder);
  EXPECT_EQ(code_of("F[0,5] !dist(1,2) <= 1"), ErrorCode::NonConcaveNegation);
  EXPECT_EQ(code_of("F[0,5] dist(1,2) <="), ErrorCode::Syntax);
  EXPECT_EQ(code_of("X[0,5] dist(1,2) <= 1"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("F[0,5] dist(1,1) <= 1"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("F[0,5] comp(0,1) - comp(1,1) in (0,1)"), ErrorCode::Syntax);
  EXPECT_EQ(code_of(""), ErrorCode::Syntax);
}

TEST(Parser, AllAtomKinds) {
  TaskFormula t = parse_task(
      "F[1,2] (lin(2*x(1,1), -1*x(2,2)) >= 3 && !lin(1*x(1,2)) >= 0 && comp(5,1) - comp(4,1) in (27,33) "
      "&& angdeg(4) near -45 tol 5 && true)");
  const auto& terms = t.units[0].body.terms;
  ASSERT_EQ(terms.size(), 5u);
  const auto& lin = std::get<LinearAtom>(std::get<Literal>(terms[0]).atom);
  ASSERT_EQ(lin.terms.size(), 2u);
  EXPECT_EQ(lin.terms[1].coef, -1.0);
  EXPECT_EQ(lin.terms[1].agent, 2);
  EXPECT_EQ(lin.terms[1].component, 1);
  EXPECT_TRUE(std::get<Literal>(terms[1]).negated);
  const auto& band = std::get<BandDiffAtom>(std::get<Literal>(terms[2]).atom);
  EXPECT_EQ(band.lo, 27.0);
  EXPECT_EQ(band.hi, 33.0);
  const auto& ang = std::get<AngleBandAtom>(std::get<Literal>(terms[3]).atom);
  EXPECT_EQ(ang.center_deg, -45.0);
  EXPECT_TRUE(std::holds_alternative<True>(terms[4]));
}

TEST(Parser, TrivialTask) {
  TaskFormula t = parse_task("  true ");
  EXPECT_EQ(t.shape, TaskShape::Trivial);
  EXPECT_TRUE(t.units.empty());
  EXPECT_EQ(participants(t, 7), std::vector<AgentId>{7});
}

TEST(Parser, SequenceKeepsWindows) {
  TaskFormula t = parse_task("F[0,5] dist(1,[0,0]) <= 1 && G[5,8] dist(1,[3,0]) <= 1");
  EXPECT_EQ(t.shape, TaskShape::Sequence);
  ASSERT_EQ(t.units.size(), 2u);
  EXPECT_EQ(t.units[1].op, TemporalOp::Always);
  EXPECT_EQ(t.units[1].a, 5.0);
  EXPECT_EQ(t.units[1].b, 8.0);
}

TEST(Parser, NestFlattensWithAccumulatedWindows) {
  TaskFormula t = parse_task("F[1,2] (dist(1,[0,0]) <= 1 && F[3,4] (dist(1,[5,0]) <= 1 && F[1,1] dist(1,[9,9]) <= 2))");
  EXPECT_EQ(t.shape, TaskShape::Nest);
  ASSERT_EQ(t.units.size(), 3u);
  // Flattened by hand: [1,2], [1+3, 2+4], [4+1, 6+1].
  EXPECT_EQ(t.units[0].a, 1.0);
  EXPECT_EQ(t.units[0].b, 2.0);
  EXPECT_EQ(t.units[1].a, 4.0);
  EXPECT_EQ(t.units[1].b, 6.0);
  EXPECT_EQ(t.units[2].a, 5.0);
  EXPECT_EQ(t.units[2].b, 7.0);
  for (const auto& u : t.units) EXPECT_EQ(u.op, TemporalOp::Eventually);
}

TEST(Parser, RoundTripFixed) {
  const char* cases[] = {
      "true",
      "F[5,15] dist(2,[90,90]) <= 5",
      "G[0,15] (dist(1,2) <= 10 && dist(1,3) <= 10)",
      "F[0,5] dist(1,[0,0]) <= 1 && G[5,8] (lin(0.5*x(1,1), -2*x(2,2)) >= -1.25 && true)",
      "F[1,2] (dist(1,[0,0]) <= 1 && F[3,4] dist(1,[5,0]) <= 1)",
      "F[1,2] (F[3,4] dist(1,[5,0]) <= 1)",
      "F[10,15] (comp(5,1) - comp(4,1) in (27,33) && angdeg(4) near -45 tol 5 && !lin(1*x(3,3)) >= 0.1)",
  };
  for (const char* c : cases) {
    TaskFormula t = parse_task(c);
    std::string printed = to_string(t);
    EXPECT_EQ(parse_task(printed), t) << c << " -> " << printed;
  }
}

TEST(Parser, RoundTripRandom) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    TaskFormula t;
    t.shape = TaskShape::Single;
    PhiFormula phi;
    phi.op = k % 2 ? TemporalOp::Always : TemporalOp::Eventually;
    phi.a = 0.125 * (k % 7);
    phi.b = phi.a + 1.0 / 3.0;
    phi.body = oracle::random_psi(rng);
    t.units.push_back(phi);
    std::string printed = to_string(t);
    EXPECT_EQ(parse_task(printed), t) << printed;
  }
}

TEST(Participants, OwnerAlwaysIncluded) {
  EXPECT_EQ(participants(parse_task("F[0,1] dist(1,2) <= 1"), 1), (std::vector<AgentId>{1, 2}));
  EXPECT_EQ(participants(parse_task("F[0,1] dist(2,[0,0]) <= 1"), 2), std::vector<AgentId>{2});
  EXPECT_EQ(participants(parse_task("F[0,1] comp(3,1) - comp(5,2) in (0,1)"), 4), (std::vector<AgentId>{3, 4, 5}));
}
