#include <gtest/gtest.h>

#include <cmath>

#include "rbloss/verify.hpp"

using namespace rbloss;

TEST(Verify, PropertyNamesRoundTrip) {
  for (Property p : {Property::ratio_symmetry, Property::convexity, Property::continuity,
                     Property::local_lipschitz, Property::global_lipschitz,
                     Property::differentiability}) {
    auto back = property_from_name(property_name(p));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, p);
  }
  EXPECT_FALSE(property_from_name("smoothness").has_value());
}

TEST(Verify, AbsRelSingleSubjectVerdicts) {
  const RepresentingFunction f = make_catalog(Ell::abs_rel);
  EXPECT_EQ(check_ratio_symmetry(f).verdict, Verdict::fails);
  EXPECT_EQ(check_convexity(f).verdict, Verdict::holds);
  EXPECT_EQ(check_continuity(f).verdict, Verdict::holds);
  EXPECT_EQ(check_local_lipschitz(f).verdict, Verdict::holds);
  EXPECT_EQ(check_global_lipschitz(f).verdict, Verdict::holds);
  // Slope is exactly 1 away from the kink.
  EXPECT_NEAR(check_global_lipschitz(f).estimate, 1.0, 1e-9);

  const PropertyReport diff = check_differentiability(f);
  EXPECT_EQ(diff.verdict, Verdict::fails);
  EXPECT_NEAR(diff.witness_x, 1.0, 1e-12);
  EXPECT_NEAR(diff.witness_value, 2.0, 1e-9);  // jump from -1 to +1
}

TEST(Verify, SquaredLogSingleSubjectVerdicts) {
  const RepresentingFunction f = make_catalog(Ell::squared_log);
  EXPECT_EQ(check_ratio_symmetry(f).verdict, Verdict::holds);
  EXPECT_EQ(check_continuity(f).verdict, Verdict::holds);
  EXPECT_EQ(check_differentiability(f).verdict, Verdict::holds);
  EXPECT_EQ(check_convexity(f).verdict, Verdict::fails);     // concave for r > e
  EXPECT_EQ(check_local_lipschitz(f).verdict, Verdict::holds);
  EXPECT_EQ(check_global_lipschitz(f).verdict, Verdict::fails);  // slope grows without bound
}

TEST(Verify, RootCuspBreaksLocalLipschitz) {
  const RepresentingFunction f = make_catalog(Ell::gre_sqrt);
  EXPECT_EQ(check_continuity(f).verdict, Verdict::holds);
  EXPECT_EQ(check_local_lipschitz(f).verdict, Verdict::fails);
}

TEST(Verify, LossLevelVerdicts) {
  // Over the exp link with c=0 the squared-log slope 2|t - log y| is
  // unbounded already on fixed windows in y.
  const RatioLoss sq = make_loss(make_catalog(Ell::squared_log),
                                 make_link(LinkKind::exp_shift), 0.0);
  EXPECT_EQ(check_convexity(sq).verdict, Verdict::holds);
  EXPECT_EQ(check_continuity(sq).verdict, Verdict::holds);
  EXPECT_EQ(check_differentiability(sq).verdict, Verdict::holds);
  EXPECT_EQ(check_local_lipschitz(sq).verdict, Verdict::fails);
  EXPECT_EQ(check_global_lipschitz(sq).verdict, Verdict::fails);

  // Bounded link and positive offset tame abs-rel completely; the slope
  // matches the closed-form bound sup|ell'| sup|u'| / c = 1 * 0.25 / 0.5.
  const RatioLoss ar = make_loss(make_catalog(Ell::abs_rel),
                                 make_link(LinkKind::logistic, 0.0, 1.0), 0.5);
  EXPECT_EQ(check_global_lipschitz(ar).verdict, Verdict::holds);
  EXPECT_LE(check_global_lipschitz(ar).estimate, 0.5 + 1e-9);
  EXPECT_EQ(check_convexity(ar).verdict, Verdict::fails);  // logistic curvature breaks it
}

TEST(Verify, RatioSymmetryIsAnEllOnlyQuestion) {
  const RatioLoss l = make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), 0.0);
  try {
    check_property(l, Property::ratio_symmetry);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::invalid_parameter);
  }
  EXPECT_EQ(check_property(make_catalog(Ell::lpre), Property::ratio_symmetry).verdict,
            Verdict::holds);
  EXPECT_EQ(check_property(l, Property::convexity).verdict, Verdict::holds);
}

TEST(Verify, DeclaredFunctionTableFullyReproduced) {
  const auto reports = verify_table2();
  const VerifySummary s = summarize(reports);
  EXPECT_EQ(s.cells, 204);  // 34 functions x 6 properties
  EXPECT_EQ(s.matches, 204);
  EXPECT_EQ(s.unexplained_mismatches, 0);
  EXPECT_EQ(s.explained_mismatches, 0);
}

TEST(Verify, AssembledLossTableFullyReproduced) {
  const auto reports = verify_table3();
  const VerifySummary s = summarize(reports);
  EXPECT_EQ(s.cells, 680);  // 34 losses x 5 properties x 2 links x 2 offsets
  EXPECT_EQ(s.unexplained_mismatches, 0);
  EXPECT_EQ(s.explained_mismatches, 1);
  EXPECT_EQ(s.matches, 679);

  int explained = 0;
  for (const PropertyReport& r : reports)
    if (r.expected && !r.matches_expected()) {
      EXPECT_TRUE(r.explained);
      EXPECT_EQ(r.subject, "squared-log/logistic/c=0");
      EXPECT_EQ(r.property, Property::global_lipschitz);
      EXPECT_TRUE(std::isfinite(r.witness_x));
      EXPECT_FALSE(r.note.empty());
      ++explained;
    }
  EXPECT_EQ(explained, 1);
}

TEST(Verify, SlopeBoundLemmasAllHold) {
  const auto checks = check_lipschitz_bound_lemmas();
  EXPECT_GE(checks.size(), 10u);
  for (const LemmaCheck& c : checks) {
    EXPECT_TRUE(c.holds) << c.subject << " " << c.lemma << " bound=" << c.bound
                         << " observed=" << c.observed_sup;
    EXPECT_LE(c.observed_sup, c.bound + 1e-6) << c.subject;
  }
}

TEST(Verify, SlopeBoundHypothesesAreEnforced) {
  // a + c = 0 leaves the denominator empty-handed.
  try {
    check_ratio_slope_bound(
        make_loss(make_catalog(Ell::abs_rel), make_link(LinkKind::logistic, 0.0, 1.0), 0.0), 1.0);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::hypothesis_violation);
  }
  // The interval variant is specific to logistic(0,1) with c > 0.
  try {
    check_logistic_interval_bound(
        make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), 1.0), 3.0);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::hypothesis_violation);
  }
}

TEST(Verify, ReportsCarryWitnessesForFailures) {
  const PropertyReport r = check_ratio_symmetry(make_catalog(Ell::abs_rel));
  EXPECT_EQ(r.verdict, Verdict::fails);
  EXPECT_TRUE(std::isfinite(r.witness_x));
  EXPECT_GT(r.witness_value, 0.0);
  EXPECT_FALSE(r.grid_id.empty());
}
