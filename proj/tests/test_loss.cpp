#include <gtest/gtest.h>

#include <cmath>

#include "rbloss/loss.hpp"
#include "rbloss/spec_string.hpp"

using namespace rbloss;

namespace {

void expect_error(errc code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "no error thrown";
  } catch (const error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Loss, HandValuesOverExpLink) {
  const RatioLoss lpre = make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), 0.0);
  // q = 1/2: q + 1/q - 2 = 1/2, slope (1 - 1/q^2) q = -3/2.
  EXPECT_NEAR(eval_loss(lpre, 2.0, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(eval_loss_dt(lpre, 2.0, 0.0), -1.5, 1e-15);
  // At the minimum t = log y the loss vanishes and the slope is zero.
  EXPECT_NEAR(eval_loss(lpre, 2.0, std::log(2.0)), 0.0, 1e-14);
  EXPECT_NEAR(eval_loss_dt(lpre, 2.0, std::log(2.0)), 0.0, 1e-14);

  const RatioLoss sq = make_loss(make_catalog(Ell::squared_log),
                                 make_link(LinkKind::exp_shift), 0.0);
  // q = e^t / y: loss (t - log y)^2, slope 2 (t - log y).
  EXPECT_NEAR(eval_loss(sq, 3.0, 1.0), sqr(1.0 - std::log(3.0)), 1e-14);
  EXPECT_NEAR(eval_loss_dt(sq, 3.0, 1.0), 2.0 * (1.0 - std::log(3.0)), 1e-13);
}

TEST(Loss, OffsetShiftsTheRatio) {
  const RatioLoss l = make_loss(make_catalog(Ell::abs_rel), make_link(LinkKind::exp_shift), 0.5);
  // q = (e^0 + 0.5) / (2 + 0.5) = 0.6.
  EXPECT_NEAR(eval_loss(l, 2.0, 0.0), 0.4, 1e-15);
  EXPECT_NEAR(eval_loss_dt(l, 2.0, 0.0), -1.0 / 2.5, 1e-15);
}

TEST(Loss, InverseDirectionFlipsTheRatio) {
  const RatioLoss fwd = make_loss(make_catalog(Ell::squared_log),
                                  make_link(LinkKind::exp_shift), 0.5);
  const RatioLoss inv = make_loss(make_catalog(Ell::squared_log),
                                  make_link(LinkKind::exp_shift), 0.5, Direction::inverse);
  for (double y : {0.3, 1.0, 4.0})
    for (double t : {-1.0, 0.2, 2.0}) {
      const double q = (std::exp(t) + 0.5) / (y + 0.5);
      EXPECT_NEAR(eval_loss(inv, y, t), sqr(std::log(1.0 / q)), 1e-12);
      // squared-log is ratio symmetric, so both directions agree in value.
      EXPECT_NEAR(eval_loss(inv, y, t), eval_loss(fwd, y, t), 1e-12);
    }
  // Slopes flip sign through dq/dt even when values coincide.
  EXPECT_NEAR(eval_loss_dt(inv, 1.0, 0.7), eval_loss_dt(fwd, 1.0, 0.7), 1e-12);

  const RatioLoss asym = make_loss(make_catalog(Ell::abs_rel),
                                   make_link(LinkKind::exp_shift), 0.0, Direction::inverse);
  // q = y / u = 2 for y=2, t=0: |2 - 1| = 1.
  EXPECT_NEAR(eval_loss(asym, 2.0, 0.0), 1.0, 1e-15);
}

TEST(Loss, DerivativeMatchesCentralDifference) {
  const RatioLoss cases[] = {
      make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), 0.0),
      make_loss(make_catalog(Ell::squared_log), make_link(LinkKind::logistic, 0.0, 1.0), 0.5),
      make_loss(make_catalog(Ell::smooth_lare), make_link(LinkKind::arctan, 0.0, 2.0), 0.0),
      make_loss(make_catalog(Ell::log_cosh_rel), make_link(LinkKind::neg_exp_shift), 0.5),
      make_loss(make_catalog(Ell::squared_rel), make_link(LinkKind::gumbel, 0.0, 1.0), 0.5,
                Direction::inverse),
  };
  for (const RatioLoss& loss : cases) {
    const double ymid = std::isfinite(loss.link.b) ? 0.5 * (loss.link.a + loss.link.b)
                                                   : loss.link.a + 1.0;
    for (double y : {ymid * 0.6, ymid, ymid * 1.3}) {
      if (!(y > loss.link.a && y < loss.link.b)) continue;
      for (double t : {-1.5, -0.3, 0.0, 0.4, 1.2}) {
        const double h = 1e-6;
        const double fd = (eval_loss(loss, y, t + h) - eval_loss(loss, y, t - h)) / (2.0 * h);
        EXPECT_NEAR(eval_loss_dt(loss, y, t), fd, 1e-5 * (1.0 + std::abs(fd)))
            << loss.ell.name() << " y=" << y << " t=" << t;
      }
    }
  }
}

TEST(Loss, OneSidedSlopesAtKinksMapThroughTheRatio) {
  const RatioLoss l = make_loss(make_catalog(Ell::abs_rel), make_link(LinkKind::exp_shift), 0.0);
  const auto ts = kink_scores(l, 2.0);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_NEAR(ts[0], std::log(2.0), 1e-12);
  // dq/dt > 0 for the exp link: sides carry over directly. Slopes are
  // ell'(1^-) q'(t) = -1 and +1 times q'(t) = u/y = 1.
  EXPECT_NEAR(eval_loss_dt(l, 2.0, ts[0], Side::left), -1.0, 1e-12);
  EXPECT_NEAR(eval_loss_dt(l, 2.0, ts[0], Side::right), 1.0, 1e-12);

  // The negative exponential link reverses dq/dt; the opposite ell-side is
  // consulted, which keeps the t-local V shape: still a minimum at the kink.
  const RatioLoss n = make_loss(make_catalog(Ell::abs_rel),
                                make_link(LinkKind::neg_exp_shift), 0.0);
  const auto tn = kink_scores(n, 2.0);
  ASSERT_EQ(tn.size(), 1u);
  EXPECT_NEAR(tn[0], -std::log(2.0), 1e-12);
  EXPECT_NEAR(eval_loss_dt(n, 2.0, tn[0], Side::left), -1.0, 1e-12);
  EXPECT_NEAR(eval_loss_dt(n, 2.0, tn[0], Side::right), 1.0, 1e-12);
}

TEST(Loss, KinkScoresSkipRatiosOutsideTheLinkRange) {
  // For logistic(0,1) with c=0 and y=0.5, ratio 3 would need u=1.5 > b.
  EllParams p;
  p.alpha = 3.0;
  const RatioLoss l = make_loss(make_catalog(Ell::huber_rel, p),
                                make_link(LinkKind::logistic, 0.0, 1.0), 0.0);
  const auto ts = kink_scores(l, 0.5);
  ASSERT_EQ(ts.size(), 1u);  // only rho = 1/3 fits
  EXPECT_NEAR(eval_link(l.link, ts[0]), 0.5 / 3.0, 1e-12);
}

TEST(Loss, SaturatedLinkSlopeGivesZeroDerivative) {
  // Far into the logistic tail u'(t) underflows; the chain rule result is 0
  // rather than 0 * inf.
  const RatioLoss l = make_loss(make_catalog(Ell::gre_exp),
                                make_link(LinkKind::logistic, 0.0, 1.0), 0.0);
  EXPECT_EQ(eval_loss_dt(l, 0.5, 800.0), 0.0);
  EXPECT_EQ(eval_loss_dt(l, 0.5, -800.0), 0.0);
}

TEST(Loss, RejectsTargetsOutsideTheLinkRange) {
  const RatioLoss l = make_loss(make_catalog(Ell::lpre), make_link(LinkKind::logistic, 0.0, 1.0), 0.0);
  expect_error(errc::domain, [&] { eval_loss(l, 1.5, 0.0); });
  expect_error(errc::domain, [&] { eval_loss(l, 0.0, 0.0); });
  expect_error(errc::domain, [&] { eval_loss_dt(l, -2.0, 0.0); });
}

TEST(Loss, RejectsNegativeOffset) {
  expect_error(errc::invalid_parameter,
               [] { make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), -0.1); });
  expect_error(errc::invalid_parameter,
               [] { make_loss(make_catalog(Ell::lpre), make_link(LinkKind::exp_shift), qnan); });
}

TEST(Loss, DistanceViewIsExactlyTheSameLoss) {
  const RatioLoss l = make_loss(make_catalog(Ell::huber_log),
                                make_link(LinkKind::exp_shift), 0.5);
  const DistanceForm df = to_distance_form(l);
  for (double y : {0.7, 1.5, 3.0})
    for (double t : {-0.6, 0.0, 0.9})
      EXPECT_NEAR(eval_loss(l, y, t), df.psi(df.transform_y(y) - df.transform_t(t)), 1e-12);
}

TEST(Loss, DistanceLossMustVanishAtZero) {
  expect_error(errc::contract,
               [] { from_distance_form([](double d) { return d * d + 1.0; }); });
  const RepresentingFunction f =
      from_distance_form([](double d) { return d * d; }, "sq",
                         [](double d) { return 2.0 * d; });
  EXPECT_NEAR(f.value(std::exp(0.3)), 0.09, 1e-12);
  EXPECT_NEAR(f.deriv(2.0), 2.0 * std::log(2.0) / 2.0, 1e-12);
}

TEST(Loss, SpecStringsRoundTrip) {
  const RatioLoss a = parse_loss_spec("lpre/exp/c=0.5");
  EXPECT_EQ(a.ell.id(), Ell::lpre);
  EXPECT_EQ(a.link.kind, LinkKind::exp_shift);
  EXPECT_DOUBLE_EQ(a.c, 0.5);
  EXPECT_EQ(a.dir, Direction::standard);
  EXPECT_EQ(format_loss_spec(a), "lpre/exp/c=0.5");

  const RatioLoss b = parse_loss_spec("huber-rel:alpha=2/logistic:a=0,b=1/c=0/inverse");
  EXPECT_EQ(b.ell.id(), Ell::huber_rel);
  EXPECT_DOUBLE_EQ(b.ell.params().alpha, 2.0);
  EXPECT_EQ(b.link.kind, LinkKind::logistic);
  EXPECT_DOUBLE_EQ(b.link.b, 1.0);
  EXPECT_EQ(b.dir, Direction::inverse);
  const RatioLoss b2 = parse_loss_spec(format_loss_spec(b));
  EXPECT_EQ(b2.ell.id(), b.ell.id());
  EXPECT_EQ(b2.dir, Direction::inverse);

  expect_error(errc::parse, [] { parse_loss_spec("lpre"); });
  expect_error(errc::parse, [] { parse_loss_spec("nope/exp/c=0"); });
  expect_error(errc::parse, [] { parse_loss_spec("lpre/exp/c=0/sideways"); });
}
