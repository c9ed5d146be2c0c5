#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"

using namespace hcantor;
using fixtures::q;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::not_found;
}

// Closed-form derivative of a perturbed branch: slope + a cos(2 pi t).
double closed_form_deriv(double slope, double a, double t) { return slope + a * std::cos(2 * std::numbers::pi * t); }

}  // namespace

TEST(MakeAffineSystem, TernarySlopesAndIntercepts) {
  const auto s = fixtures::ternary();
  EXPECT_EQ(s.k(), 2u);
  EXPECT_EQ(s.branch(1).base.slope, q(3));
  EXPECT_EQ(s.branch(1).base.intercept, q(0));
  EXPECT_EQ(s.branch(2).base.slope, q(3));
  EXPECT_EQ(s.branch(2).base.intercept, q(-2));
  EXPECT_TRUE(s.is_affine());
}

TEST(MakeAffineSystem, TwoScaleSlopes) {
  const auto s = fixtures::two_scale();
  EXPECT_EQ(s.branch(1).base.slope, q(2));
  EXPECT_EQ(s.branch(2).base.slope, q(4));
}

TEST(MakeAffineSystem, FlippedSecondBranch) {
  const auto s = fixtures::ternary_flip();
  EXPECT_EQ(s.branch(2).base.slope, q(-3));
  EXPECT_EQ(s.branch(2).base.intercept, q(3));
  EXPECT_EQ(s.branch(2).orientation, -1);
}

TEST(MakeAffineSystem, RejectsBadGeometry) {
  const Interval<Rational> L(q(0), q(1));
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(0), q(1, 2)}, {q(1, 3), q(1)}}, {1, 1}); }),
            ErrorKind::invariant);
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(0), q(1, 3)}, {q(2, 3), q(3, 2)}}, {1, 1}); }),
            ErrorKind::invariant);
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(0), q(1)}}, {1}); }), ErrorKind::invariant);
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(2, 3), q(1)}, {q(0), q(1, 3)}}, {1, 1}); }),
            ErrorKind::invariant);
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(0), q(1, 3)}, {q(2, 3), q(1)}}, {1, 0}); }),
            ErrorKind::invariant);
  // outermost domains must reach the ends of L
  EXPECT_EQ(kind_of([&] { make_affine_system(L, {{q(1, 10), q(1, 3)}, {q(2, 3), q(1)}}, {1, 1}); }),
            ErrorKind::invariant);
}

TEST(MakePerturbedSystem, ZeroAmplitudeMatchesBasePointwise) {
  const auto base = fixtures::ternary();
  const auto s = make_perturbed_system(base, {0.0, 0.0});
  for (int n = 0; n <= 10000; ++n) {
    const double x = n / 10000.0;
    const auto j = branch_of(base, x);
    if (!j) continue;
    EXPECT_EQ(eval(s, x), eval(base, x));
    EXPECT_EQ(deriv(s, x), deriv(base, x));
  }
}

TEST(MakePerturbedSystem, SmallAmplitudeKeepsExpansion) {
  const auto s = fixtures::perturbed();
  double min_d = 1e300;
  for (int n = 0; n <= 20000; ++n) min_d = std::min(min_d, closed_form_deriv(3.0, 0.01, n / 20000.0));
  EXPECT_GT(min_d, 1.0);
  for (int n = 0; n <= 1000; ++n) {
    const double x = n / 3000.0;
    EXPECT_NEAR(deriv(s, x), closed_form_deriv(3.0, 0.01, 3.0 * x), 1e-12);
  }
  // endpoints still map onto the endpoints of L
  EXPECT_NEAR(eval(s, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(eval(s, 1.0 / 3.0), 1.0, 1e-15);
}

TEST(MakePerturbedSystem, ExpansionViolationNamesTheBranch) {
  try {
    fixtures::perturbed(2.5, 0.0);
    FAIL() << "accepted a non-expanding branch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invariant);
    EXPECT_NE(std::string(e.what()).find("branch 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(fixtures::perturbed(0.0, -2.0), Error);  // min |S'| = 1 exactly
  EXPECT_THROW(make_perturbed_system(fixtures::perturbed(), {0.0, 0.0}), Error);
  EXPECT_THROW(make_perturbed_system(fixtures::ternary(), {0.1}), Error);
}

TEST(Eval, Examples) {
  const auto s = fixtures::ternary();
  EXPECT_EQ(eval(s, q(1, 3)), q(1));
  EXPECT_EQ(deriv(s, 0.1), 3.0);
  EXPECT_EQ(eval(fixtures::two_scale(), q(3, 8)), q(0));
  EXPECT_EQ(kind_of([&] { eval(s, q(1, 2)); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([&] { eval(s, 0.5); }), ErrorKind::domain);
}

TEST(Eval, OrientationMatchesDerivativeSign) {
  for (const auto& s : {fixtures::ternary_flip(), fixtures::three_branch(),
                        make_perturbed_system(fixtures::three_branch(), {0.5, -0.7, 1.2})}) {
    for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j) {
      const auto d = to_double(s.branch(j).domain);
      for (int n = 0; n <= 200; ++n) {
        const double x = d.lo + d.length() * n / 200.0;
        EXPECT_EQ(sign_of(deriv_branch(s, j, x)), s.branch(j).orientation);
        EXPECT_GT(std::abs(deriv_branch(s, j, x)), 1.0);
      }
    }
  }
}

TEST(BranchInverse, AffineExamplesAreExact) {
  const auto s = fixtures::ternary();
  EXPECT_EQ(branch_inverse(s, 2, q(0)), q(2, 3));
  EXPECT_EQ(branch_inverse(s, 1, q(1, 2)), q(1, 6));
  EXPECT_EQ(branch_inverse(fixtures::ternary_flip(), 2, q(0)), q(1));
  EXPECT_EQ(kind_of([&] { branch_inverse(s, 1, q(3, 2)); }), ErrorKind::domain);
}

TEST(BranchInverse, RoundTripsEverywhere) {
  for (const auto& s : {fixtures::three_branch(), fixtures::two_scale()}) {
    for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j)
      for (int n = 0; n <= 64; ++n) {
        const Rational y = s.ambient().lo + s.ambient().length() * q(n, 64);
        const Rational x = branch_inverse(s, j, y);
        EXPECT_TRUE(s.branch(j).domain.contains(x));
        EXPECT_EQ(eval_branch(s, j, x), y);
      }
  }
}

TEST(BranchInverse, PerturbedResidualBelow1e12) {
  const auto s = make_perturbed_system(fixtures::ternary_flip(), {0.01, -0.4});
  const double x = branch_inverse(s, 1, 0.5);
  EXPECT_TRUE(s.branch(1).domain.contains(exact_rational(x)));
  EXPECT_LT(std::abs(eval_branch(s, 1, x) - 0.5), 1e-12);
  for (Symbol j : {1, 2})
    for (int n = 0; n <= 1000; ++n) {
      const double y = n / 1000.0;
      EXPECT_LT(std::abs(eval_branch(s, j, branch_inverse(s, j, y)) - y), 1e-12) << j << " " << y;
    }
}

TEST(ClassMembership, AffineIsExactlyZero) {
  const auto r = class_membership(fixtures::ternary(), 1e-9, 1e-9, 16);
  EXPECT_EQ(r.nonlinearity, 0.0);
  EXPECT_EQ(r.holder_constant, 0.0);
  EXPECT_TRUE(r.in_class);
  EXPECT_DOUBLE_EQ(r.sigma, 1.0 / 3.0);
}

TEST(ClassMembership, PerturbedAgainstClosedForm) {
  const auto s = fixtures::perturbed();
  const auto r = class_membership(s, 1.0, 0.01, 10000);
  const double expected = std::log(3.01 / 2.99);
  EXPECT_GT(r.nonlinearity, 0.0);
  EXPECT_LT(r.nonlinearity, 0.01);
  EXPECT_NEAR(r.nonlinearity, expected, 1e-12);
  EXPECT_NEAR(r.sigma, 1.0 / 2.99, 1e-12);
  EXPECT_GT(r.sigma, 0.0);
  EXPECT_LT(r.sigma, 1.0);
  // |d/dx log S'| = 2 pi a |sin| / (|I| (3 + a cos)); its sup bounds every alpha=1 difference quotient.
  double lip = 0.0;
  for (int n = 0; n <= 200000; ++n) {
    const double t = n / 200000.0;
    const double a = 0.01, th = 2 * std::numbers::pi * t;
    lip = std::max(lip, 2 * std::numbers::pi * a * std::abs(std::sin(th)) * 3.0 / (3.0 + a * std::cos(th)));
  }
  EXPECT_LE(r.holder_constant, lip * (1 + 1e-9));
  EXPECT_GE(r.holder_constant, 0.99 * lip);
  EXPECT_TRUE(r.in_class);
  EXPECT_FALSE(class_membership(s, 1.0, 1e-6, 10000).in_class);
  EXPECT_FALSE(class_membership(s, 1e-3, 0.01, 1000).in_class);
  EXPECT_EQ(r.grid, 10000u);
  EXPECT_THROW(class_membership(s, 1.0, 0.1, 1), Error);
}

TEST(BranchSystem, LevelZeroGapsAndSkeleton) {
  const auto s = fixtures::three_branch();
  EXPECT_EQ(s.level0_gap(1), Interval<Rational>(q(1, 5), q(2, 5)));
  EXPECT_EQ(s.level0_gap(2), Interval<Rational>(q(3, 5), q(4, 5)));
  EXPECT_THROW(s.level0_gap(3), Error);
  EXPECT_THROW(s.branch(0), Error);
  const auto p = make_perturbed_system(s, {0.1, 0.2, 0.3});
  EXPECT_FALSE(p.is_affine());
  EXPECT_TRUE(p.same_skeleton(s));
  EXPECT_TRUE(p.affine_model().is_affine());
  EXPECT_FALSE(s.same_skeleton(fixtures::ternary()));
}
