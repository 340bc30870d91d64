#include "doctest.h"

#include <algorithm>

#include "oracles.hpp"
#include "robustlm/penalty.hpp"
#include "robustlm/rng.hpp"

using namespace robustlm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Slope value by explicit maximization over weight permutations (small d).
double slope_by_permutations(const Eigen::VectorXd& w, const Eigen::VectorXd& g) {
  std::vector<int> perm(static_cast<std::size_t>(w.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double v = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      v += w[perm[static_cast<std::size_t>(j)]] * std::abs(g[j]);
    best = std::max(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("penalty evaluation") {
  const auto l1 = Penalty::l1(3);
  CHECK(l1(vec({1, -2, 0})) == 3.0);
  CHECK(l1(Eigen::VectorXd::Zero(3)) == 0.0);

  const auto sl = Penalty::slope(vec({2, 1}));
  // Frozen from the permutation oracle: the larger weight meets the larger
  // magnitude, 2*3 + 1*1.
  CHECK(slope_by_permutations(vec({2, 1}), vec({1, -3})) == 7.0);
  CHECK(sl(vec({1, -3})) == 7.0);
  CHECK(sl(Eigen::VectorXd::Zero(2)) == 0.0);

  const auto p3 = Penalty::lp(2, 3.0);
  CHECK(p3(vec({1, 1})) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK(p3(Eigen::VectorXd::Zero(2)) == 0.0);

  CHECK_THROWS_AS(l1(vec({1, 2})), ValidationError);
  CHECK_THROWS_AS(Penalty::slope(vec({1, 2})), ValidationError);
  CHECK_THROWS_AS(Penalty::lp(2, 0.5), ValidationError);
}

TEST_CASE("subgradient certificates match the sign formulas") {
  const auto l1 = Penalty::l1(2);
  const auto cert = l1.subgradient_certificate(vec({3, -1}));
  CHECK(cert.subgradient == vec({1, -1}));
  CHECK(cert.conjugate_value == 0.0);
  CHECK(cert.loading == vec({1, -1}));

  // Slope: weights assigned by decreasing magnitude rank.
  const auto sl = Penalty::slope(vec({2, 1}));
  const auto scert = sl.subgradient_certificate(vec({1, -3}));
  CHECK(scert.subgradient == vec({1, -2}));

  // Ties resolved stably by index.
  const auto tied = sl.subgradient_certificate(vec({1, 1}));
  CHECK(tied.subgradient == vec({2, 1}));

  // At the origin every kind returns the zero subgradient.
  for (const auto& pen :
       {Penalty::l1(2), Penalty::lp(2, 2.0), Penalty::slope(vec({2, 1}))}) {
    const auto zc = pen.subgradient_certificate(Eigen::VectorXd::Zero(2));
    CHECK(zc.subgradient == Eigen::VectorXd::Zero(2));
    CHECK(zc.loading == Eigen::VectorXd::Zero(2));
  }

  // Zero coordinates under l1 keep a zero loading.
  const auto partial = l1.subgradient_certificate(vec({2, 0}));
  CHECK(partial.subgradient == vec({1, 0}));
}

TEST_CASE("dual norms") {
  CHECK(Penalty::l1(2).dual_norm(vec({1, -2})) == 2.0);
  CHECK(Penalty::lp(2, 2.0).dual_norm(vec({3, 4})) == 5.0);

  // Slope with equal weights is the l1 norm; its dual is l-infinity. Checked
  // against the unit-ball vertex enumeration.
  const auto sl = Penalty::slope(vec({1, 1}));
  const auto x = vec({1, -2});
  CHECK(oracles::slope_dual_brute_force(x, vec({1, 1})) == 2.0);
  CHECK(sl.dual_norm(x) == 2.0);

  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd w = vec({3, 2, 0.5});
    const auto pen = Penalty::slope(w);
    const auto z = oracles::random_vector(rng, 3, 2.0);
    CHECK(pen.dual_norm(z) ==
          doctest::Approx(oracles::slope_dual_brute_force(z, w)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(
      Penalty::support_set(Eigen::MatrixXd::Identity(2, 2).colwise().reverse())
          .dual_norm(vec({1, 1})),
      ValidationError);  // asymmetric set rejected before the call
}

TEST_CASE("support-function penalties") {
  Eigen::MatrixXd k(4, 2);
  k << 1, 0, -1, 0, 0, 2, 0, -2;
  const auto pen = Penalty::support_set(k);
  CHECK(pen(vec({3, 1})) == 3.0);   // max of {3, -3, 2, -2}
  CHECK(pen(vec({0, -1})) == 2.0);
  CHECK_FALSE(pen.is_norm());
  CHECK_THROWS_AS(pen.dual_norm(vec({1, 1})), UnsupportedOperation);
  CHECK_THROWS_AS(pen.embedding_constant(BaseNorm::L2), UnsupportedOperation);

  // Asymmetric sets are rejected.
  Eigen::MatrixXd bad(1, 2);
  bad << 1, 0;
  CHECK_THROWS_AS(Penalty::support_set(bad), ValidationError);

  // The certificate picks an extreme point, which obeys the loading bound.
  Rng rng(5);
  const auto cert = pen.subgradient_certificate(vec({3, 1}));
  CHECK(cert.conjugate_value == 0.0);
  for (int t = 0; t < 1000; ++t) {
    const auto g = oracles::random_vector(rng, 2, 3.0);
    CHECK(std::abs(g.dot(cert.loading)) <= pen(g) + 1e-12);
  }
}

TEST_CASE("embedding constants") {
  // l1 penalty against the l1 base norm achieves the unit constant.
  const auto e11 = Penalty::l1(4).embedding_constant(BaseNorm::L1);
  CHECK(e11.c_d == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e11.c_rho_d == doctest::Approx(1.0).epsilon(1e-9));

  // l2 penalty against the l2 base norm: frozen from the scalar profile
  // oracle min over t of (t+1)/sqrt(t^2+1), which is attained at t = 0.
  const auto profile = [](double t) { return (t + 1.0) / std::hypot(t, 1.0); };
  double oracle = profile(0.0);
  for (double t = 0.0; t <= 1000.0; t += 0.001) oracle = std::min(oracle, profile(t));
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));
  const auto e22 = Penalty::lp(5, 2.0).embedding_constant(BaseNorm::L2);
  CHECK(e22.c_d == doctest::Approx(oracle).epsilon(1e-8));

  // Generic kinds against a brute-force direction/scale search oracle.
  Rng rng(17);
  for (const auto& pen : {Penalty::l1(3), Penalty::lp(3, 2.0), Penalty::lp(3, 1.5),
                          Penalty::slope(vec({2, 1, 0.5}))}) {
    for (BaseNorm base : {BaseNorm::L1, BaseNorm::L2, BaseNorm::Linf}) {
      const auto base_norm = [&](const Eigen::VectorXd& v) {
        switch (base) {
          case BaseNorm::L1: return v.cwiseAbs().sum();
          case BaseNorm::L2: return v.norm();
          case BaseNorm::Linf: return v.cwiseAbs().maxCoeff();
        }
        return v.norm();
      };
      double oracle_min = 1.0;  // value at the origin
      for (int t = 0; t < 4000; ++t) {
        Eigen::VectorXd g = oracles::random_vector(rng, 3);
        const double pv = pen(g);
        if (pv <= 0.0) continue;
        g /= pv;
        for (double scale : {0.01, 0.1, 0.5, 1.0, 2.0, 8.0, 64.0, 4096.0}) {
          Eigen::VectorXd full(4);
          full.head(3) = scale * g;
          full[3] = -1.0;
          oracle_min = std::min(oracle_min, (scale + 1.0) / base_norm(full));
        }
      }
      const double got = pen.embedding_constant(base).c_d;
      // The implementation must dominate no sampled direction and sit close
      // to the sampled minimum.
      CHECK(got <= oracle_min + 1e-9);
      CHECK(got >= oracle_min - 0.05 * oracle_min);
    }
  }
}

TEST_CASE("penalty properties: convexity, subgradient, Fenchel, loading bound") {
  Rng rng(23);
  const auto penalties = {Penalty::l1(4), Penalty::lp(4, 1.7), Penalty::lp(4, 3.0),
                          Penalty::slope(vec({2, 1.5, 1, 0.25}))};
  for (const auto& pen : penalties) {
    for (int t = 0; t < 200; ++t) {
      const auto g1 = oracles::random_vector(rng, 4, 2.0);
      const auto g2 = oracles::random_vector(rng, 4, 2.0);
      const double w = rng.uniform01();
      CHECK(pen((w * g1 + (1.0 - w) * g2).eval()) <=
            w * pen(g1) + (1.0 - w) * pen(g2) + 1e-9);

      // Symmetry and homogeneity.
      CHECK(pen((-g1).eval()) == doctest::Approx(pen(g1)));
      const double c = rng.uniform(0.0, 3.0);
      CHECK(pen((c * g1).eval()) == doctest::Approx(c * pen(g1)));
    }

    for (int t = 0; t < 20; ++t) {
      const auto beta = oracles::random_vector(rng, 4, 1.5);
      const auto cert = pen.subgradient_certificate(beta);

      // Fenchel identity at the certified subgradient.
      CHECK(cert.subgradient.dot(beta) - cert.conjugate_value ==
            doctest::Approx(pen(beta)).epsilon(1e-9));

      // Subgradient inequality on sampled points.
      for (int s = 0; s < 50; ++s) {
        const auto x = oracles::random_vector(rng, 4, 2.0);
        CHECK(pen(x) >= pen(beta) + cert.subgradient.dot(x - beta) - 1e-9);
      }
    }

    // The loading bound |g' loading| <= penalty(g) on a large sample.
    const auto cert = pen.subgradient_certificate(oracles::random_vector(rng, 4, 1.0));
    for (int s = 0; s < 10000; ++s) {
      const auto g = oracles::random_vector(rng, 4, 3.0);
      CHECK(std::abs(g.dot(cert.loading)) <= pen(g) + 1e-9);
    }

    // Dual-norm pairing.
    if (pen.is_norm()) {
      for (int s = 0; s < 200; ++s) {
        const auto a = oracles::random_vector(rng, 4, 2.0);
        const auto b = oracles::random_vector(rng, 4, 2.0);
        CHECK(a.dot(b) <= pen(a) * pen.dual_norm(b) + 1e-9);
      }
    }
  }
}

TEST_CASE("penalty json config round trip") {
  const auto l1 = Penalty::from_json(nlohmann::json{{"kind", "l1"}}, 3);
  CHECK(l1.kind() == PenaltyKind::L1);
  const auto lp = Penalty::from_json(nlohmann::json{{"kind", "lp"}, {"p", 2.0}}, 3);
  CHECK(lp.p() == 2.0);
  const auto sl = Penalty::from_json(
      nlohmann::json{{"kind", "slope"}, {"lambda", {2.0, 1.0, 0.5}}}, 3);
  CHECK(sl.weights()[0] == 2.0);
  CHECK(sl.to_json().at("lambda")[2] == 0.5);
  CHECK_THROWS_AS(Penalty::from_json(nlohmann::json{{"kind", "huber"}}, 3),
                  ValidationError);
  CHECK_THROWS_AS(
      Penalty::from_json(nlohmann::json{{"kind", "slope"}, {"lambda", {1.0}}}, 3),
      ValidationError);
}
