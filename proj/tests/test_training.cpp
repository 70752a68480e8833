#include "doctest.h"
#include "errors.hpp"
#include "support.hpp"
#include "training.hpp"

using namespace afrelay;

TEST_CASE("white training gram is K times identity") {
  const TrainingDesign d = build_gram(64, 5, 2, 0.0);
  CHECK(max_abs_diff(d.gram, 64.0 * ComplexMatrix::Identity(10, 10)) == 0.0);
}

TEST_CASE("correlated gram blocks") {
  const TrainingDesign d = build_gram(64, 5, 2, 0.4);
  ComplexMatrix block(2, 2);
  block << 1.0, 0.4, 0.4, 1.0;
  for (int l = 0; l < 5; ++l) {
    CHECK(max_abs_diff(d.gram.block(2 * l, 2 * l, 2, 2), 64.0 * block) < 1e-12);
    for (int m = 0; m < 5; ++m)
      if (m != l) CHECK(d.gram.block(2 * l, 2 * m, 2, 2).norm() == 0.0);
  }

  const TrainingDesign half = build_gram(64, 5, 2, 0.5);
  const OrderedEigh e = eigh_ordered(half.gram.block(0, 0, 2, 2));
  CHECK(e.eigenvalues(0) == doctest::Approx(64.0 * 1.5));
  CHECK(e.eigenvalues(1) == doctest::Approx(64.0 * 0.5));

  const ComplexMatrix c = exponential_correlation(3, 0.5);
  CHECK(c(0, 2).real() == doctest::Approx(0.25));
}

TEST_CASE("too short training is not identifiable") {
  try {
    build_gram(8, 5, 2, 0.0);
    FAIL("K < L*tx accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIdentifiability);
  }
  try {
    build_gram(64, 5, 2, 1.0);
    FAIL("alpha = 1 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContractViolation);
  }
}

TEST_CASE("materialized sequences reach the design gram") {
  RandomStream rng(21);
  for (const double alpha : {0.0, 0.4, 0.8}) {
    const TrainingDesign design = build_gram(64, 5, 2, alpha);
    const TrainingBlock block = materialize_sequence(design, rng);
    const ComplexMatrix d = data_matrix(block, 5);
    CHECK((d * d.adjoint() - design.gram).norm() / design.gram.norm() < 1e-6);
    for (int a = 0; a < 2; ++a) CHECK(block.sequence.row(a).squaredNorm() == doctest::Approx(64.0));
  }
}

TEST_CASE("single antenna sequence has ideal periodic autocorrelation") {
  RandomStream rng(22);
  for (const int k : {16, 17}) {
    const TrainingBlock block = materialize_sequence(build_gram(k, 3, 1, 0.0), rng);
    for (int lag = 1; lag < k; ++lag) {
      Complex acc = 0.0;
      for (int i = 0; i < k; ++i) acc += block.sequence(0, i) * std::conj(block.sequence(0, (i + lag) % k));
      CHECK(std::abs(acc) < 1e-6);
    }
  }
}

TEST_CASE("data matrix is block circulant") {
  RandomStream rng(23);
  const TrainingBlock block = materialize_sequence(build_gram(16, 3, 2, 0.3), rng);
  const ComplexMatrix d = data_matrix(block, 3);
  REQUIRE(d.rows() == 6);
  REQUIRE(d.cols() == 16);
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 16; ++i)
      CHECK(max_abs_diff(d.block(2 * l, i, 2, 1), block.sequence.col(((i - l) % 16 + 16) % 16)) == 0.0);
}
