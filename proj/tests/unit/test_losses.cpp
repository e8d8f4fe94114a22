#include <doctest.h>

#include <cmath>

#include "fairnn/error.hpp"
#include "fairnn/losses.hpp"
#include "fairnn/rng.hpp"
#include "gradient_suite.hpp"
#include "reference.hpp"

using namespace fairnn;

namespace {

BatchGaussian gaussian_1d(double mean, double variance) {
  BatchGaussian g;
  g.mean = Vector::Constant(1, mean);
  g.covariance = Matrix::Constant(1, 1, variance);
  g.count = 2;
  return g;
}

BatchGaussian random_gaussian(Rng& rng, Eigen::Index d) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform(-1, 1);
  BatchGaussian g;
  g.covariance = a * a.transpose() + kCovarianceRidge * Matrix::Identity(d, d);
  g.mean = Vector(d);
  for (Eigen::Index i = 0; i < d; ++i) g.mean(i) = rng.uniform(-2, 2);
  g.count = 10;
  return g;
}

ref::Gaussian as_ref(const BatchGaussian& g) { return {g.mean, Eigen::MatrixXd(g.covariance)}; }

OutputLayout one_num_one_binary() {
  OutputLayout layout;
  layout.blocks = {{OutputBlock::Kind::kNumerical, 0, 1}, {OutputBlock::Kind::kNominal, 1, 2}};
  return layout;
}

}  // namespace

TEST_CASE("reconstruction: hand-evaluated single row") {
  Matrix x(1, 3), xhat(1, 3);
  x << 0.5, 1.0, 0.0;
  xhat << 0.3, 0.8, 0.2;
  CHECK(reconstruction_loss(x, xhat, one_num_one_binary()) ==
        doctest::Approx(0.04 - std::log(0.8)).epsilon(1e-12));
  CHECK(reconstruction_loss(x, xhat, one_num_one_binary()) == doctest::Approx(0.2631).epsilon(1e-4));
}

TEST_CASE("reconstruction: perfect reconstruction is zero and repetition leaves the mean unchanged") {
  Matrix x(2, 3);
  x << 0.25, 0.0, 1.0, 0.75, 1.0, 0.0;
  CHECK(reconstruction_loss(x, x, one_num_one_binary()) == 0.0);
  Matrix xhat(2, 3);
  xhat << 0.3, 0.4, 0.6, 0.7, 0.9, 0.1;
  Matrix x2(4, 3), xhat2(4, 3);
  x2 << x, x;
  xhat2 << xhat, xhat;
  CHECK(reconstruction_loss(x2, xhat2, one_num_one_binary()) ==
        doctest::Approx(reconstruction_loss(x, xhat, one_num_one_binary())).epsilon(1e-15));
  CHECK(squared_error_loss(x, x) == 0.0);
  CHECK(squared_error_loss(x, xhat) == doctest::Approx(ref::squared_reconstruction(x, xhat)).epsilon(1e-15));
}

TEST_CASE("reconstruction: shape mismatch") {
  CHECK_THROWS_AS(reconstruction_loss(Matrix::Zero(1, 3), Matrix::Zero(1, 2), one_num_one_binary()), DimensionError);
}

TEST_CASE("gaussian fit: hand covariance, identical points, row permutation") {
  Matrix pts(2, 2);
  pts << 0, 0, 2, 2;
  const BatchGaussian g = fit_gaussian(pts);
  CHECK(g.mean(0) == 1.0);
  CHECK(g.mean(1) == 1.0);
  CHECK(g.covariance(0, 0) == doctest::Approx(1.0 + 1e-4).epsilon(1e-15));
  CHECK(g.covariance(0, 1) == 1.0);
  CHECK(g.covariance(1, 1) == doctest::Approx(1.0 + 1e-4).epsilon(1e-15));
  CHECK(g.count == 2);

  const BatchGaussian same = fit_gaussian(Matrix::Constant(5, 3, 0.7));
  CHECK((same.covariance - 1e-4 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  Matrix p(4, 2), q(4, 2);
  p << 1, 2, 3, 5, -1, 0, 4, 4;
  q << 4, 4, 1, 2, -1, 0, 3, 5;
  const BatchGaussian gp = fit_gaussian(p), gq = fit_gaussian(q);
  CHECK((gp.mean - gq.mean).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((gp.covariance - gq.covariance).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gaussian fit: groups with fewer than two members skip") {
  Matrix z(3, 2);
  z << 1, 2, 3, 4, 5, 6;
  const std::vector<std::uint8_t> one_protected{1, 0, 0};
  CHECK_FALSE(fit_group_gaussians(z, one_protected).has_value());
  const std::vector<std::uint8_t> split{1, 1, 0};
  CHECK_FALSE(fit_group_gaussians(z, split).has_value());
  Matrix z4(4, 2);
  z4 << 1, 2, 3, 4, 5, 6, 7, 9;
  const std::vector<std::uint8_t> ok{1, 0, 1, 0};
  const auto pair = fit_group_gaussians(z4, ok);
  REQUIRE(pair.has_value());
  CHECK(pair->first.mean(0) == 3.0);   // rows 0 and 2
  CHECK(pair->second.mean(0) == 5.0);  // rows 1 and 3
}

TEST_CASE("kl: closed-form one-dimensional cases") {
  CHECK(std::abs(kl_gaussian(gaussian_1d(0, 1), gaussian_1d(1, 1)) - 0.5) < 1e-9);
  CHECK(std::abs(kl_gaussian(gaussian_1d(0, 2), gaussian_1d(0, 1)) - 0.5 * (-std::log(2.0) - 1 + 2)) < 1e-9);
  CHECK(kl_gaussian(gaussian_1d(0, 2), gaussian_1d(0, 1)) == doctest::Approx(0.1534).epsilon(1e-3));
}

TEST_CASE("kl: identical inputs give zero, random pairs are non-negative and match the explicit formula") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(5));
    const BatchGaussian p = random_gaussian(rng, d);
    const BatchGaussian q = random_gaussian(rng, d);
    CHECK(std::abs(kl_gaussian(p, p)) <= 1e-8);
    const double value = kl_gaussian(p, q);
    CHECK(value >= -1e-8);
    const double expected = ref::kl(as_ref(p), as_ref(q));
    CHECK(std::abs(value - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("kl: direction is P_s relative to P_sbar") {
  const BatchGaussian narrow = gaussian_1d(0, 0.5);
  const BatchGaussian wide = gaussian_1d(0, 4);
  CHECK(kl_gaussian(narrow, wide) != doctest::Approx(kl_gaussian(wide, narrow)));
  CHECK(kl_gaussian(narrow, wide) == doctest::Approx(0.5 * (std::log(8.0) - 1 + 0.125)).epsilon(1e-12));
}

TEST_CASE("kl: indefinite covariance is a numeric error, dimension mismatch is a dimension error") {
  BatchGaussian bad = gaussian_1d(0, -1);
  CHECK_THROWS_AS(kl_gaussian(bad, gaussian_1d(0, 1)), NumericError);
  Rng rng(1);
  CHECK_THROWS_AS(kl_gaussian(random_gaussian(rng, 2), random_gaussian(rng, 3)), DimensionError);
}

TEST_CASE("bce: examples and label/probability symmetry") {
  const std::vector<std::uint8_t> one{1};
  CHECK(bce_loss(one, std::vector<double>{1.0}) < 1e-11);
  CHECK(bce_loss(one, std::vector<double>{0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(one, std::vector<double>{0.5}) == doctest::Approx(0.6931).epsilon(1e-4));
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> c, flipped;
    std::vector<double> p, q;
    for (int i = 0; i < 9; ++i) {
      c.push_back(static_cast<std::uint8_t>(rng.index(2)));
      flipped.push_back(static_cast<std::uint8_t>(1 - c.back()));
      p.push_back(rng.uniform(0.01, 0.99));
      q.push_back(1.0 - p.back());
    }
    CHECK(bce_loss(c, p) == doctest::Approx(bce_loss(flipped, q)).epsilon(1e-12));
    CHECK(bce_loss(c, p) >= 0.0);
    CHECK(bce_loss(c, p) == doctest::Approx(ref::bce(c, p)).epsilon(1e-13));
  }
}

TEST_CASE("soft equalized odds: hand-evaluated example") {
  // s = protected (mask 1); negatives scored 0 in both groups.
  const std::vector<std::uint8_t> c{1, 1, 1, 0, 0};
  const std::vector<double> p{0.6, 0.9, 0.7, 0.0, 0.0};
  const std::vector<std::uint8_t> mask{0, 1, 1, 1, 0};
  const SoftEqOdds eo = soft_equalized_odds(c, p, mask);
  CHECK(eo.value == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_FALSE(eo.fpr_dropped);
  CHECK_FALSE(eo.fnr_dropped);
  std::vector<std::uint8_t> swapped(mask);
  for (auto& m : swapped) m = static_cast<std::uint8_t>(1 - m);
  CHECK(soft_equalized_odds(c, p, swapped).value == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("soft equalized odds: perfect scorer is zero, missing classes are dropped and flagged") {
  const std::vector<std::uint8_t> c{1, 0, 1, 0};
  const std::vector<double> exact{1.0, 0.0, 1.0, 0.0};
  const std::vector<std::uint8_t> mask{1, 1, 0, 0};
  CHECK(soft_equalized_odds(c, exact, mask).value == 0.0);
  // Protected rows 0 and 3 are all positive, so the false-positive term is dropped.
  const std::vector<std::uint8_t> c2{1, 1, 0, 1};
  const std::vector<std::uint8_t> mask_no_neg{1, 0, 0, 1};
  const SoftEqOdds eo = soft_equalized_odds(c2, std::vector<double>{0.3, 0.9, 0.4, 0.5}, mask_no_neg);
  CHECK(eo.fpr_dropped);
  CHECK_FALSE(eo.fnr_dropped);
  CHECK(eo.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("soft equalized odds: property: in [0,2], zero for group-blind scorer on group-identical data") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> c, mask;
    std::vector<double> p;
    const int n = 4 + static_cast<int>(rng.index(20));
    for (int i = 0; i < n; ++i) {
      c.push_back(static_cast<std::uint8_t>(rng.index(2)));
      mask.push_back(static_cast<std::uint8_t>(rng.index(2)));
      p.push_back(rng.uniform());
    }
    const double v = soft_equalized_odds(c, p, mask).value;
    CHECK(v >= 0.0);
    CHECK(v <= 2.0);
    CHECK(v == doctest::Approx(ref::soft_equalized_odds(c, p, mask)).epsilon(1e-13));

    // Same (label, score) multiset in both groups.
    std::vector<std::uint8_t> c2, mask2;
    std::vector<double> p2;
    for (int i = 0; i < n; ++i) {
      for (std::uint8_t g : {0, 1}) {
        c2.push_back(c[i]);
        p2.push_back(p[i]);
        mask2.push_back(g);
      }
    }
    CHECK(soft_equalized_odds(c2, p2, mask2).value <= 1e-15);
  }
}

TEST_CASE("weighted combinations") {
  CHECK(autoencoder_loss(1.5, 9.0, 0.0) == 1.5);
  CHECK(autoencoder_loss(1.0, 2.0, 0.9) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(classifier_loss(0.5, 3.0, 0.0) == 0.5);
  CHECK(classifier_loss(0.5, 0.1, 0.2) == doctest::Approx(0.42).epsilon(1e-15));
  const LossBreakdown b = total_loss(1.0, 2.0, 0.5, 0.1, 0.9, 0.2);
  CHECK(b.ae == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(b.cls == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(b.total == doctest::Approx(2.32).epsilon(1e-15));
  CHECK_THROWS_AS(autoencoder_loss(1, 1, 1.0), ConfigError);
  CHECK_THROWS_AS(classifier_loss(1, 1, -0.1), ConfigError);
  CHECK_THROWS_AS(total_loss(1, 1, 1, 1, 0.5, 1.5), ConfigError);
}

TEST_CASE("weighted combinations: property: breakdown identities hold to 1e-12") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const double recon = rng.uniform(0, 5), kl = rng.uniform(0, 5), bce = rng.uniform(0, 5),
                 eo = rng.uniform(0, 2), alpha = rng.uniform(0, 0.999), beta = rng.uniform(0, 0.999);
    const LossBreakdown b = total_loss(recon, kl, bce, eo, alpha, beta);
    CHECK(std::abs(b.ae - ((1 - alpha) * recon + alpha * kl)) <= 1e-12);
    CHECK(std::abs(b.cls - ((1 - beta) * bce + beta * eo)) <= 1e-12);
    CHECK(std::abs(b.total - (b.ae + b.cls)) <= 1e-12);
  }
}

TEST_CASE("taped terms: values equal the plain evaluations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const gradsuite::Problem p = gradsuite::make_problem(seed);
    const auto fwd_ref = ref::forward(p.model.params(), p.config, p.x);
    const StepObjective obj = batch_objective(p.model, p.x, p.labels, p.mask, p.alpha, p.beta);
    CHECK(obj.breakdown.total == doctest::Approx(ref::total_objective(p.model.params(), p.config, p.x, p.labels,
                                                                      p.mask, p.alpha, p.beta))
                                     .epsilon(1e-12));
    CHECK(obj.breakdown.recon ==
          doctest::Approx(ref::mixed_reconstruction(p.x, fwd_ref.xhat, p.config.layout)).epsilon(1e-12));
    CHECK(obj.breakdown.kl == doctest::Approx(*ref::group_kl(fwd_ref.z, p.mask)).epsilon(1e-9));
    CHECK(obj.breakdown.bce == doctest::Approx(ref::bce(p.labels, fwd_ref.p)).epsilon(1e-12));
    CHECK(obj.breakdown.eqodds_soft ==
          doctest::Approx(ref::soft_equalized_odds(p.labels, fwd_ref.p, p.mask)).epsilon(1e-12));
    CHECK_FALSE(obj.breakdown.kl_skipped);
  }
}

TEST_CASE("gradients: every term matches central differences of the reference objective") {
  for (auto kind : {ReconstructionKind::kMixed, ReconstructionKind::kSquaredError}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const gradsuite::Problem p = gradsuite::make_problem(seed, kind);
      for (auto term : gradsuite::all_terms()) {
        CAPTURE(seed);
        CAPTURE(gradsuite::name(term));
        CHECK(gradsuite::relative_error(p, term) < 1e-4);
      }
    }
  }
}

TEST_CASE("gradients: the KL gradient with respect to the latent codes matches central differences") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index b = 10, d = 3;
    Matrix z(b, d);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-1, 1);
    const std::vector<std::uint8_t> mask{1, 0, 1, 0, 1, 0, 1, 1, 0, 0};
    Tape tape;
    const Var leaf = tape.leaf(z);
    const auto kl = op::group_gaussian_kl(tape, leaf, mask);
    REQUIRE(kl.has_value());
    tape.backward(*kl);
    const Matrix fd = finite_difference_gradient(
        [&](const Matrix& m) { return *ref::group_kl(m, std::vector<std::uint8_t>(mask)); }, z);
    CHECK(max_relative_error(tape.grad(leaf), fd) < 1e-4);
  }
}

TEST_CASE("batch objective: a single-group batch skips KL and flags it") {
  gradsuite::Problem p = gradsuite::make_problem(1);
  std::fill(p.mask.begin(), p.mask.end(), 0);
  const StepObjective obj = batch_objective(p.model, p.x, p.labels, p.mask, 0.9, 0.2);
  CHECK(obj.breakdown.kl_skipped);
  CHECK(obj.breakdown.kl == 0.0);
  CHECK(obj.breakdown.eqodds_incomplete);
  CHECK(obj.breakdown.ae == doctest::Approx(0.1 * obj.breakdown.recon).epsilon(1e-12));
}
