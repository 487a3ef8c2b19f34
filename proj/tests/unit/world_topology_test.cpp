#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/parser.hpp"
#include "stlfunnel/topology/topology.hpp"
#include "stlfunnel/world/dynamics.hpp"

using namespace stlfunnel;
using namespace stlfunnel::world;

TEST(Dynamics, Dimensions) {
  EXPECT_EQ(state_dim(OmniRobot{}), 3);
  EXPECT_EQ(input_dim(OmniRobot{}), 3);
  EXPECT_EQ(state_dim(SingleIntegrator{4}), 4);
}

TEST(Dynamics, ZeroDrift) {
  EXPECT_EQ(drift(OmniRobot{}, Eigen::Vector3d(1, 2, 3)).norm(), 0.0);
  EXPECT_EQ(drift(SingleIntegrator{2}, Eigen::Vector2d(1, 2)).norm(), 0.0);
  try {
    drift(OmniRobot{}, Eigen::Vector2d(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(actuation(SingleIntegrator{2}, Eigen::Vector3d(1, 2, 3)), Error);
}

TEST(Dynamics, SingleIntegratorIdentity) {
  EXPECT_TRUE(actuation(SingleIntegrator{2}, Eigen::Vector2d(4, 5)).isApprox(Eigen::Matrix2d::Identity()));
}

TEST(Dynamics, OmniAtZeroHeading) {
  OmniRobot m;
  const double c = std::cos(std::numbers::pi / 6);
  const double s = std::sin(std::numbers::pi / 6);
  Eigen::Matrix3d B;
  B << 0, c, -c, -1, s, s, m.L, m.L, m.L;
  EXPECT_TRUE(omni_geometry(m).isApprox(B));
  Eigen::Matrix3d expected = B.transpose().inverse() * m.R;
  Eigen::MatrixXd g = actuation(m, Eigen::Vector3d(0, 0, 0));
  EXPECT_TRUE(g.isApprox(expected, 1e-14));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(g * g.transpose());
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  // B B^T = diag(1.5, 1.5, 3 L^2), so g g^T = R^2 diag(1/1.5, 1/1.5, 1/(3 L^2)).
  EXPECT_NEAR(eig.eigenvalues()[0], 0.0004 / 1.5, 1e-15);
  EXPECT_NEAR(eig.eigenvalues()[2], 0.0004 / 0.12, 1e-15);
}

TEST(Dynamics, OmniGramianIndependentOfState) {
  OmniRobot m;
  Eigen::MatrixXd g0 = actuation(m, Eigen::Vector3d(0, 0, 0));
  Eigen::Matrix3d ref = g0 * g0.transpose();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::MatrixXd g = actuation(m, Eigen::Vector3d(u(rng), u(rng), u(rng)));
    Eigen::Matrix3d gg = g * g.transpose();
    EXPECT_LT((gg - ref).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gg);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Coupling, Cases) {
  stl::StateLayout layout({{1, 2}, {2, 2}});
  Eigen::VectorXd x(4);
  x << 1, 1, 1, 1;
  EXPECT_EQ(coupling(NoCoupling{}, layout, x, 1).norm(), 0.0);
  SaturatedConsensus c{2.0, 0.5, {{1, 2}}};
  EXPECT_EQ(coupling(c, layout, x, 1).norm(), 0.0);
  x << 0, 0, 100, -40;
  EXPECT_NEAR(coupling(c, layout, x, 1).norm(), 0.5, 1e-15);
  Eigen::VectorXd small(4);
  small << 0, 0, 0.1, 0;
  EXPECT_NEAR(coupling(c, layout, small, 1)[0], 0.2, 1e-15);
  EXPECT_NEAR(coupling(c, layout, small, 2)[0], -0.2, 1e-15);
}

TEST(Coupling, BoundedOnFuzz) {
  stl::StateLayout layout({{1, 2}, {2, 2}, {3, 2}});
  SaturatedConsensus c{3.0, 1.25, {{1, 2}, {2, 3}, {1, 3}}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd x(6);
    for (int j = 0; j < 6; ++j) x[j] = u(rng);
    for (int id = 1; id <= 3; ++id) EXPECT_LE(coupling(c, layout, x, id).norm(), 1.25 + 1e-12);
  }
}

TEST(Noise, ZeroAndDeterministic) {
  EXPECT_EQ(sample_noise(Eigen::Vector2d::Zero(), 1, 2, 3).norm(), 0.0);
  Eigen::Vector3d h(0.1, 0.2, 0.3);
  EXPECT_EQ(sample_noise(h, 42, 7, 1), sample_noise(h, 42, 7, 1));
  EXPECT_NE(sample_noise(h, 42, 7, 1), sample_noise(h, 43, 7, 1));
  EXPECT_NE(sample_noise(h, 42, 7, 1), sample_noise(h, 42, 8, 1));
}

TEST(Noise, UniformInBox) {
  Eigen::Vector2d h(0.5, 2.0);
  const int n = 100000;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd w = sample_noise(h, 99, static_cast<std::uint64_t>(k), 1);
    EXPECT_LE(std::abs(w[0]), 0.5);
    EXPECT_LE(std::abs(w[1]), 2.0);
    mean += w;
  }
  mean /= n;
  for (int j = 0; j < 2; ++j) {
    double sigma = h[j] / std::sqrt(3.0);
    EXPECT_LT(std::abs(mean[j]), 3.0 * sigma / std::sqrt(static_cast<double>(n)));
  }
}

namespace {

std::map<stl::AgentId, stl::TaskFormula> tasks(std::initializer_list<std::pair<int, const char*>> list) {
  std::map<stl::AgentId, stl::TaskFormula> out;
  for (auto [id, text] : list) out[id] = stl::parse_task(text);
  return out;
}

}  // namespace

TEST(Topology, ExampleOne) {
  auto part = topology::clusters(tasks({{1, "F[0,5] dist(1,2) <= 1"},
                                        {2, "F[0,5] dist(2,[0,0]) <= 1"},
                                        {3, "F[0,5] dist(3,[4,4]) <= 1"}}));
  ASSERT_EQ(part.clusters.size(), 2u);
  EXPECT_EQ(part.clusters[0].agents, (std::vector<stl::AgentId>{1, 2}));
  EXPECT_FALSE(part.clusters[0].case_a);
  EXPECT_EQ(part.clusters[1].agents, std::vector<stl::AgentId>{3});
  EXPECT_TRUE(part.clusters[1].case_a);
  EXPECT_EQ(part.cluster_of(2), 0);
  EXPECT_EQ(part.cluster_of(3), 1);
}

TEST(Topology, SingletonsAndCaseA) {
  auto part = topology::clusters(tasks({{1, "F[0,5] dist(1,[0,0]) <= 1"}, {2, "true"}, {3, "F[0,5] dist(3,[0,0]) <= 1"}}));
  EXPECT_EQ(part.clusters.size(), 3u);
  for (const auto& c : part.clusters) EXPECT_TRUE(c.case_a);

  const char* shared = "F[10,15] (dist(1,2) <= 2 && dist(2,3) <= 2)";
  auto same = topology::clusters(tasks({{1, shared}, {2, shared}, {3, shared}}));
  ASSERT_EQ(same.clusters.size(), 1u);
  EXPECT_TRUE(same.clusters[0].case_a);
}

TEST(Topology, CommunicationCoverage) {
  const char* shared = "F[1,2] (dist(1,2) <= 2 && dist(2,3) <= 2)";
  auto t = tasks({{1, shared}, {2, shared}, {3, shared}});
  EXPECT_TRUE(topology::clusters(t, topology::CommGraph({{1, 2}, {2, 3}})).clusters[0].comm_ok);
  EXPECT_FALSE(topology::clusters(t, topology::CommGraph({{1, 2}})).clusters[0].comm_ok);
  EXPECT_THROW(topology::CommGraph({{1, 1}}), Error);
}

TEST(Topology, NoEdgeCrossesClustersOnFuzz) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    std::map<stl::AgentId, stl::TaskFormula> t;
    int n = 2 + static_cast<int>(rng() % 8);
    for (int id = 1; id <= n; ++id) {
      int other = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      std::string text = other == id || rng() % 3 == 0
                             ? "F[0,1] dist(" + std::to_string(id) + ",[0,0]) <= 1"
                             : "F[0,1] dist(" + std::to_string(id) + "," + std::to_string(other) + ") <= 1";
      t[id] = stl::parse_task(text);
    }
    auto part = topology::clusters(t);
    std::size_t covered = 0;
    for (const auto& c : part.clusters) covered += c.agents.size();
    EXPECT_EQ(covered, static_cast<std::size_t>(n));
    for (const auto& [id, task] : t) {
      for (auto j : stl::participants(task, id)) EXPECT_EQ(part.cluster_of(j), part.cluster_of(id));
    }
    // Idempotent: recomputing yields the same partition.
    auto again = topology::clusters(t);
    ASSERT_EQ(again.clusters.size(), part.clusters.size());
    for (std::size_t c = 0; c < part.clusters.size(); ++c) {
      EXPECT_EQ(again.clusters[c].agents, part.clusters[c].agents);
    }
  }
}

TEST(Topology, Stage2Timing) {
  auto phi4 = stl::parse_phi("F[5,10] (dist(4,5) <= 10 && dist(4,[50,70]) <= 10)");
  auto phi5 = stl::parse_phi("F[5,15] dist(5,[10,10]) <= 5");
  std::map<stl::AgentId, topology::AgentStatus> st;
  st[4] = {0, &phi4};
  st[5] = {-1, nullptr};
  EXPECT_TRUE(topology::stage2_timing_ok(4, phi4, st));
  st[5] = {0, &phi5};
  EXPECT_TRUE(topology::stage2_timing_ok(4, phi4, st));
  st[5] = {7, &phi5};
  EXPECT_FALSE(topology::stage2_timing_ok(4, phi4, st));
  auto early = stl::parse_phi("F[1,8] dist(5,[10,10]) <= 5");
  st[5] = {0, &early};
  EXPECT_FALSE(topology::stage2_timing_ok(4, phi4, st));
}
