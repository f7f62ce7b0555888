#include <doctest.h>

#include <cmath>

#include "sssm/pruning.hpp"
#include "sssm/rng.hpp"

using namespace sssm;

TEST_CASE("removal probability is the thresholded sigmoid of the magnitude") {
  CHECK(prune_probability(0.5, 0.5, 50.0) == 0.5);
  CHECK(prune_probability(-0.5, 0.5, 50.0) == 0.5);  // magnitude, not sign
  CHECK(prune_probability(0.54, 0.5, 50.0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(prune_probability(1.0, 0.0, 50.0) > 0.999999);
  CHECK(prune_probability(0.0, 1.0, 50.0) < 1e-6);
  CHECK_THROWS_AS(prune_probability(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("default orientation removes small weights and spares large ones") {
  MatrixXd w(1, 100);
  for (int j = 0; j < 100; ++j) w(0, j) = j < 50 ? 1e-6 : 10.0;
  PruningState st = fresh_mask(1, 100);
  st.theta = 0.5;
  PruningConfig cfg;  // beta 50
  PhiloxRng rng(70, 0);
  apply_pruning(w, st, cfg, rng);
  for (int j = 0; j < 50; ++j) {
    CHECK(st.mask(0, j) == 0.0);
    CHECK(w(0, j) == 0.0);
  }
  for (int j = 50; j < 100; ++j) {
    CHECK(st.mask(0, j) == 1.0);
    CHECK(w(0, j) == 10.0);
  }
}

TEST_CASE("literal orientation flips the decision") {
  MatrixXd w(1, 100);
  for (int j = 0; j < 100; ++j) w(0, j) = j < 50 ? 1e-6 : 10.0;
  PruningState st = fresh_mask(1, 100);
  st.theta = 0.5;
  PruningConfig cfg;
  cfg.literal_orientation = true;
  PhiloxRng rng(71, 0);
  apply_pruning(w, st, cfg, rng);
  for (int j = 0; j < 50; ++j) CHECK(st.mask(0, j) == 1.0);
  for (int j = 50; j < 100; ++j) CHECK(st.mask(0, j) == 0.0);
}

TEST_CASE("weights at the threshold are removed about half the time") {
  MatrixXd w = MatrixXd::Constant(100, 100, 0.3);
  PruningState st = fresh_mask(100, 100);
  st.theta = 0.3;
  PruningConfig cfg;
  PhiloxRng rng(72, 0);
  apply_pruning(w, st, cfg, rng);
  const double s = measure_sparsity(st);
  CHECK(s > 0.48);
  CHECK(s < 0.52);
}

TEST_CASE("pruned synapses never come back and stay exactly zero") {
  PhiloxRng rng(73, 0);
  MatrixXd w(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) w(i, j) = rng.uniform(-1.0, 1.0);
  PruningState st = fresh_mask(20, 20);
  PruningConfig cfg;
  MatrixXd prev = st.mask;
  double prev_sparsity = 0.0;
  for (int ev = 0; ev < 200; ++ev) {
    st.theta = 0.2;  // hold a fixed threshold; pruning should only accumulate
    apply_pruning(w, st, cfg, rng);
    CHECK_FALSE(((prev.array() == 0.0) && (st.mask.array() != 0.0)).any());
    const double s = measure_sparsity(st);
    CHECK(s >= prev_sparsity);
    prev = st.mask;
    prev_sparsity = s;
  }
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (st.mask(i, j) == 0.0) CHECK(w(i, j) == 0.0);
}

TEST_CASE("dead synapses draw no randomness") {
  // with every synapse removed, the generator state must stay untouched
  MatrixXd w = MatrixXd::Constant(2, 2, 0.1);
  PruningState st = fresh_mask(2, 2);
  st.mask.setZero();
  PruningConfig cfg;
  PhiloxRng rng(74, 0);
  PhiloxRng untouched = rng;
  apply_pruning(w, st, cfg, rng);
  CHECK(rng.next_u64() == untouched.next_u64());
}

TEST_CASE("threshold controller arithmetic, fixed point, and clamp") {
  CHECK(threshold_step(0.1, 0.4, 0.8, 0.01, 1.0) == doctest::Approx(0.104).epsilon(1e-15));
  CHECK(threshold_step(0.1, 0.8, 0.8, 0.01, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(threshold_step(0.001, 1.0, 0.0001, 0.01, 1.0) == 0.0);  // clamped at zero
  CHECK(threshold_step(0.05, 0.9, 0.8, 0.01, 2.0) ==
        doctest::Approx(0.05 - 0.002).epsilon(1e-12));
}

TEST_CASE("sparsity measurement") {
  PruningState st = fresh_mask(2, 2);
  CHECK(measure_sparsity(st) == 0.0);
  st.mask(0, 0) = 0.0;
  st.mask(1, 1) = 0.0;
  CHECK(measure_sparsity(st) == 0.5);
  PruningState empty;
  CHECK_THROWS_AS(measure_sparsity(empty), std::invalid_argument);
}

TEST_CASE("configuration validation") {
  PruningConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  PruningConfig bad = cfg;
  bad.rho = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.beta = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.interval = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(fresh_mask(0, 3), std::invalid_argument);
}

TEST_CASE("closed loop drives sparsity to the target and holds it") {
  PruningConfig cfg;
  cfg.rho = 0.7;
  PhiloxRng rng(75, 0);
  MatrixXd w(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) w(i, j) = rng.uniform(-1.0, 1.0);
  PruningState st = fresh_mask(50, 50);
  double s = 0.0;
  for (int ev = 0; ev < 800; ++ev) {
    apply_pruning(w, st, cfg, rng);
    s = measure_sparsity(st);
    st.theta = threshold_step(st.theta, s, cfg.rho, cfg.gamma, cfg.dt_ctrl);
  }
  CHECK(std::abs(s - cfg.rho) <= 0.05);
}
