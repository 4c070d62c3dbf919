#include <doctest.h>

#include <cmath>

#include "croc/distill.hpp"
#include "oracles.hpp"

using namespace croc;

TEST_CASE("pool_centroids basics") {
  Rng rng(71);
  const Matrix z = oracles::random_matrix(rng, 3, 4, -1.0, 1.0);
  CHECK(pool_centroids(FeatureMatrix(z), Matrix::Identity(3, 3)) == z);

  Matrix q(3, 1);
  q << 0.5, 0.5, 0.0;
  const Matrix pooled = pool_centroids(FeatureMatrix(z), q);
  for (Index d = 0; d < 4; ++d) {
    CHECK(pooled(0, d) ==
          doctest::Approx(0.5 * (z(0, d) + z(1, d))).epsilon(1e-12));
  }
}

TEST_CASE("pool_centroids matches the accumulation oracle") {
  Rng rng(72);
  const Matrix z = oracles::random_matrix(rng, 5, 3, -2.0, 2.0);
  const Matrix q = oracles::random_matrix(rng, 5, 2, 0.0, 1.0);
  const Matrix pooled = pool_centroids(FeatureMatrix(z), q);
  const Matrix expected = oracles::loop_pool_centroids(z, q);
  CHECK((pooled - expected).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(pool_centroids(FeatureMatrix(z), Matrix::Zero(4, 2)),
                  ShapeError);
}

TEST_CASE("project_softmax: equal logits give uniform rows") {
  const ProjectionParams p(Matrix::Zero(4, 3), Vector::Zero(4), 0.5);
  const ProbRows probs = project_softmax(Matrix::Ones(2, 3), p);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 4; ++j) {
      CHECK(probs.values()(i, j) == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("project_softmax scalar oracle") {
  // logits [1, 0] at tau = 1 -> [e/(e+1), 1/(e+1)].
  Matrix w(2, 1);
  w << 1, 0;
  const ProjectionParams p(w, Vector::Zero(2), 1.0);
  const ProbRows probs = project_softmax(Matrix::Ones(1, 1), p);
  CHECK(probs.values()(0, 0) ==
        doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(probs.values()(0, 1) ==
        doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("project_softmax stays stable for huge logits") {
  Matrix w(3, 1);
  w << 1e4, 0, -1e4;
  const ProjectionParams p(w, Vector::Zero(3), 1.0);
  const ProbRows probs = project_softmax(Matrix::Ones(1, 1), p);
  CHECK(probs.values().allFinite());
  CHECK(probs.values().row(0).sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(probs.values()(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lower temperature sharpens non-constant rows") {
  Matrix w(3, 2);
  w << 1, 0, 0, 1, -1, 0.5;
  Matrix c(1, 2);
  c << 0.7, -0.2;
  const ProbRows warm = project_softmax(c, ProjectionParams(w, Vector::Zero(3), 1.0));
  const ProbRows cold = project_softmax(c, ProjectionParams(w, Vector::Zero(3), 0.1));
  CHECK(cold.values().row(0).maxCoeff() > warm.values().row(0).maxCoeff());
}

TEST_CASE("cross_entropy_rows identities") {
  Matrix onehot(2, 3);
  onehot << 1, 0, 0, 0, 0, 1;
  CHECK(cross_entropy_rows(ProbRows(onehot), ProbRows(onehot)) == 0.0);

  Rng rng(73);
  const Matrix a = oracles::random_row_stochastic(rng, 3, 4);
  const Matrix uniform = Matrix::Constant(3, 4, 0.25);
  CHECK(cross_entropy_rows(ProbRows(a), ProbRows(uniform)) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("cross_entropy_rows matches the reference summation") {
  Rng rng(74);
  const Matrix a = oracles::random_row_stochastic(rng, 3, 5);
  const Matrix b = oracles::random_row_stochastic(rng, 3, 5);
  CHECK(cross_entropy_rows(ProbRows(a), ProbRows(b)) ==
        doctest::Approx(oracles::loop_cross_entropy(a, b)).epsilon(1e-10));
  CHECK_THROWS_AS(
      cross_entropy_rows(ProbRows(a), ProbRows(Matrix::Constant(2, 5, 0.2))),
      ShapeError);
}

TEST_CASE("Gibbs equality and inequality") {
  Rng rng(75);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix a = oracles::random_row_stochastic(rng, 4, 6);
    const Matrix b = oracles::random_row_stochastic(rng, 4, 6);
    double entropy = 0.0;
    for (Index k = 0; k < a.rows(); ++k) {
      for (Index l = 0; l < a.cols(); ++l) {
        entropy -= a(k, l) * std::log(a(k, l));
      }
    }
    entropy /= static_cast<double>(a.rows());
    const double self = cross_entropy_rows(ProbRows(a), ProbRows(a));
    CHECK(self == doctest::Approx(entropy).epsilon(1e-9));
    CHECK(cross_entropy_rows(ProbRows(a), ProbRows(b)) >= self - 1e-12);
  }
}

TEST_CASE("dense_loss symmetry and composition") {
  Matrix onehot(2, 3);
  onehot << 1, 0, 0, 0, 1, 0;
  const ProbRows p(onehot);
  CHECK(dense_loss(p, p, p, p) == 0.0);

  Rng rng(76);
  const ProbRows pt1{oracles::random_row_stochastic(rng, 3, 4)};
  const ProbRows ps2{oracles::random_row_stochastic(rng, 3, 4)};
  const ProbRows pt2{oracles::random_row_stochastic(rng, 3, 4)};
  const ProbRows ps1{oracles::random_row_stochastic(rng, 3, 4)};

  const double loss = dense_loss(pt1, ps2, pt2, ps1);
  // Swapping the view indices consistently leaves the value unchanged.
  CHECK(dense_loss(pt2, ps1, pt1, ps2) == doctest::Approx(loss).epsilon(1e-15));
  // And the value decomposes into the two cross-entropy halves.
  const double expected = 0.5 * (oracles::loop_cross_entropy(pt1.values(),
                                                             ps2.values()) +
                                 oracles::loop_cross_entropy(pt2.values(),
                                                             ps1.values()));
  CHECK(loss == doctest::Approx(expected).epsilon(1e-10));

  const ProbRows smaller{oracles::random_row_stochastic(rng, 2, 4)};
  CHECK_THROWS_AS(dense_loss(pt1, smaller, pt2, ps1), ShapeError);
}

TEST_CASE("global_loss identities") {
  Vector onehot = Vector::Zero(4);
  onehot[2] = 1.0;
  CHECK(global_loss(onehot, onehot, onehot, onehot) == 0.0);

  // Uniform student over 65,536 dimensions costs log(65536).
  const Index big = 65536;
  Vector teacher = Vector::Zero(big);
  teacher[0] = 1.0;
  const Vector uniform = Vector::Constant(big, 1.0 / big);
  CHECK(global_loss(teacher, uniform, teacher, uniform) ==
        doctest::Approx(11.090354888959125).epsilon(1e-9));

  Rng rng(77);
  const Vector a = oracles::random_simplex(rng, 6);
  const Vector b = oracles::random_simplex(rng, 6);
  const double expected =
      0.5 * (oracles::loop_cross_entropy(a.transpose(), b.transpose()) +
             oracles::loop_cross_entropy(b.transpose(), a.transpose()));
  CHECK(global_loss(a, b, b, a) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("total_loss combines the terms") {
  CHECK(total_loss(2.0, 3.0, LossWeights{0.0}) == 3.0);
  CHECK(total_loss(2.0, 3.0, LossWeights{1.0}) == 5.0);
  CHECK(total_loss(2.0, 3.0, LossWeights{}) == 5.0);  // alpha defaults to 1
  CHECK_THROWS_AS(total_loss(std::nan(""), 0.0, LossWeights{}), InputError);
}

TEST_CASE("prob rows validate") {
  Matrix bad(1, 2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(ProbRows{bad}, InputError);
  Matrix negative(1, 2);
  negative << 1.5, -0.5;
  CHECK_THROWS_AS(ProbRows{negative}, InputError);
}
