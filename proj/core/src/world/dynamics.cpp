#include "stlfunnel/world/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stlfunnel/error.hpp"

namespace stlfunnel::world {

namespace {

void check(const DynamicsModel& m, const Eigen::VectorXd& x) {
  if (x.size() != state_dim(m)) {
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(x.size()) + " entries, model expects " +
                                                  std::to_string(state_dim(m)));
  }
}

}  // namespace

int state_dim(const DynamicsModel& m) {
  if (const auto* s = std::get_if<SingleIntegrator>(&m)) return s->n;
  return 3;
}

int input_dim(const DynamicsModel& m) { return state_dim(m); }

Eigen::VectorXd drift(const DynamicsModel& m, const Eigen::VectorXd& x) {
  check(m, x);
  return Eigen::VectorXd::Zero(x.size());
}

Eigen::Matrix3d omni_geometry(const OmniRobot& m) {
  const double c = std::cos(std::numbers::pi / 6.0);
  const double s = std::sin(std::numbers::pi / 6.0);
  Eigen::Matrix3d B;
  B << 0.0, c, -c,
      -1.0, s, s,
      m.L, m.L, m.L;
  return B;
}

Eigen::MatrixXd actuation(const DynamicsModel& m, const Eigen::VectorXd& x) {
  check(m, x);
  if (const auto* s = std::get_if<SingleIntegrator>(&m)) return Eigen::MatrixXd::Identity(s->n, s->n);
  const auto& omni = std::get<OmniRobot>(m);
  const double th = x[2];
  Eigen::Matrix3d rot;
  rot << std::cos(th), -std::sin(th), 0.0,
      std::sin(th), std::cos(th), 0.0,
      0.0, 0.0, 1.0;
  Eigen::Matrix3d g = rot * omni_geometry(omni).transpose().inverse() * omni.R;
  return g;
}

Eigen::VectorXd coupling(const CouplingModel& m, const stl::StateLayout& layout, const Eigen::VectorXd& x,
                         stl::AgentId i) {
  const auto& si = layout.slot(i);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(si.dim);
  const auto* sc = std::get_if<SaturatedConsensus>(&m);
  if (!sc) return out;
  for (const auto& [a, b] : sc->edges) {
    stl::AgentId j;
    if (a == i) {
      j = b;
    } else if (b == i) {
      j = a;
    } else {
      continue;
    }
    const auto& sj = layout.slot(j);
    if (sj.dim != si.dim) {
      throw Error(ErrorCode::DimensionMismatch, "consensus edge between agents of different dimension");
    }
    out += x.segment(sj.offset, sj.dim) - x.segment(si.offset, si.dim);
  }
  out *= sc->gain;
  double n = out.norm();
  if (n > sc->bound) out *= sc->bound / n;
  return out;
}

Eigen::VectorXd sample_noise(const Eigen::VectorXd& half_width, std::uint64_t seed, std::uint64_t step,
                             stl::AgentId agent) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(half_width.size());
  if (half_width.isZero(0.0)) return w;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(agent)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = half_width[k] * unit(rng);
  return w;
}

}  // namespace stlfunnel::world
