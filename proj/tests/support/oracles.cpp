#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/parser.hpp"

namespace stlfunnel::oracle {

double brute_window(stl::TemporalOp op, std::span<const double> times, std::span<const double> rho, double lo,
                    double hi) {
  bool any = false;
  double best = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < lo - stl::kWindowTol || times[k] > hi + stl::kWindowTol) continue;
    if (!any) {
      best = rho[k];
      any = true;
    } else if (op == stl::TemporalOp::Eventually) {
      if (rho[k] > best) best = rho[k];
    } else {
      if (rho[k] < best) best = rho[k];
    }
  }
  if (!any) throw Error(ErrorCode::WindowNotCovered, "no samples");
  return best;
}

double grid_search_2d(const stl::CompiledPsi& psi, double lo, double hi) {
  Eigen::VectorXd x(2);
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Vector2d arg(lo, lo);
  const double coarse = 0.05;
  for (double a = lo; a <= hi; a += coarse) {
    for (double b = lo; b <= hi; b += coarse) {
      x << a, b;
      double v = stl::smooth_robustness(psi, x);
      if (v > best) {
        best = v;
        arg << a, b;
      }
    }
  }
  const double fine = 1e-3;
  const Eigen::Vector2d center = arg;
  for (int i = -100; i <= 100; ++i) {
    for (int j = -100; j <= 100; ++j) {
      x << center[0] + i * fine, center[1] + j * fine;
      best = std::max(best, stl::smooth_robustness(psi, x));
    }
  }
  return best;
}

Eigen::VectorXd finite_difference(const stl::CompiledPsi& psi, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (stl::smooth_robustness(psi, xp) - stl::smooth_robustness(psi, xm)) / (2.0 * h);
  }
  return g;
}

stl::StateLayout fuzz_layout() { return stl::StateLayout({{1, 3}, {2, 2}, {3, 3}}); }

namespace {

constexpr stl::AgentId kIds[] = {1, 2, 3};

int dim_of(stl::AgentId id) { return id == 2 ? 2 : 3; }

}  // namespace

stl::PsiFormula random_psi(std::mt19937_64& rng, int max_terms) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<int> agent(0, 2);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> radius(0.5, 5.0);
  std::bernoulli_distribution coin(0.5);

  stl::PsiFormula psi;
  int n = count(rng);
  for (int k = 0; k < n; ++k) {
    stl::Literal lit;
    switch (kind(rng)) {
      case 0: {
        stl::PointDistAtom a;
        a.agent = kIds[agent(rng)];
        a.point = {coord(rng), coord(rng)};
        a.radius = radius(rng);
        lit.atom = a;
        break;
      }
      case 1: {
        stl::PairDistAtom a;
        int i = agent(rng);
        int j = (i + 1 + static_cast<int>(coin(rng))) % 3;
        a.a = kIds[i];
        a.b = kIds[j];
        a.radius = radius(rng);
        lit.atom = a;
        break;
      }
      case 2: {
        stl::LinearAtom a;
        int terms = 1 + static_cast<int>(coin(rng));
        for (int t = 0; t < terms; ++t) {
          stl::AgentId id = kIds[agent(rng)];
          std::uniform_int_distribution<int> comp(0, dim_of(id) - 1);
          a.terms.push_back({coord(rng), id, comp(rng)});
        }
        a.bound = coord(rng);
        lit.atom = a;
        lit.negated = coin(rng);
        break;
      }
      case 3: {
        stl::BandDiffAtom a;
        a.a = kIds[agent(rng)];
        a.b = kIds[agent(rng)];
        a.comp_a = std::uniform_int_distribution<int>(0, dim_of(a.a) - 1)(rng);
        a.comp_b = std::uniform_int_distribution<int>(0, dim_of(a.b) - 1)(rng);
        if (a.a == a.b && a.comp_a == a.comp_b) a.comp_b = (a.comp_a + 1) % dim_of(a.b);
        a.lo = coord(rng);
        a.hi = a.lo + radius(rng);
        lit.atom = a;
        break;
      }
      default: {
        stl::AngleBandAtom a;
        a.agent = coin(rng) ? 1 : 3;
        a.center_deg = std::uniform_real_distribution<double>(-180.0, 180.0)(rng);
        a.tol_deg = std::uniform_real_distribution<double>(1.0, 20.0)(rng);
        lit.atom = a;
        break;
      }
    }
    psi.terms.emplace_back(std::move(lit));
  }
  return psi;
}

Eigen::VectorXd random_state(std::mt19937_64& rng, const stl::StateLayout& layout, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Eigen::VectorXd x(layout.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
  for (const auto& s : layout.slots()) {
    if (s.dim > stl::kHeadingComponent) x[s.offset + stl::kHeadingComponent] /= spread;  // radians
  }
  return x;
}

stl::PsiFormula random_planar_psi(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> radius(0.5, 3.0);
  std::uniform_int_distribution<int> extra(0, 3);
  stl::PsiFormula psi;
  // One ball keeps the sup finite; the rest are balls or half-planes.
  auto ball = [&] {
    stl::PointDistAtom a;
    a.agent = 1;
    a.point = {coord(rng), coord(rng)};
    a.radius = radius(rng);
    return stl::Literal{a, false};
  };
  psi.terms.emplace_back(ball());
  int n = extra(rng);
  for (int k = 0; k < n; ++k) {
    if (std::bernoulli_distribution(0.5)(rng)) {
      psi.terms.emplace_back(ball());
    } else {
      stl::LinearAtom a;
      a.terms = {{coord(rng), 1, 0}, {coord(rng), 1, 1}};
      a.bound = coord(rng);
      psi.terms.emplace_back(stl::Literal{a, false});
    }
  }
  return psi;
}

sim::Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> agents(2, 5);
  std::uniform_real_distribution<double> pos(-15.0, 15.0);
  std::uniform_real_distribution<double> start(1.0, 6.0);
  std::uniform_real_distribution<double> len(1.0, 5.0);
  std::uniform_real_distribution<double> radius(2.0, 6.0);
  std::bernoulli_distribution coin(0.5);

  sim::Scenario sc;
  sc.name = "fuzz" + std::to_string(seed);
  const int n = agents(rng);
  for (int id = 1; id <= n; ++id) {
    sim::AgentSpec a;
    a.id = id;
    a.model = world::SingleIntegrator{2};
    a.x0 = Eigen::Vector2d(pos(rng), pos(rng));
    sc.agents.push_back(a);
  }
  double horizon = 0.0;
  for (int id = 1; id <= n; ++id) {
    if (std::bernoulli_distribution(0.15)(rng)) continue;  // free agent
    auto unit = [&](double a) {
      std::ostringstream os;
      double b = a + len(rng);
      horizon = std::max(horizon, b);
      bool always = std::bernoulli_distribution(0.25)(rng);
      os << (always ? "G[" : "F[") << a << ',' << b << "] (dist(" << id << ",[" << pos(rng) << ',' << pos(rng)
         << "]) <= " << radius(rng);
      if (coin(rng)) {
        int other = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        if (other == id) other = other % n + 1;
        os << " && dist(" << id << ',' << other << ") <= " << radius(rng) + 4.0;
      }
      os << ')';
      return std::pair{os.str(), b};
    };
    auto [first, b1] = unit(start(rng));
    std::string text = first;
    if (std::bernoulli_distribution(0.3)(rng)) text += " && " + unit(b1 + 0.5).first;
    sim::TaskSpec t;
    t.agent = id;
    t.formula = text;
    t.parsed = stl::parse_task(text);
    sc.tasks.push_back(std::move(t));
  }
  sc.controller.gain = 2.0;
  sc.sim.dt = 0.01;
  sc.sim.t_end = horizon + 1.0;
  return sc;
}

}  // namespace stlfunnel::oracle
