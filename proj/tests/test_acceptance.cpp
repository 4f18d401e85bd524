#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rbloss/builder.hpp"
#include "rbloss/io.hpp"
#include "rbloss/risk.hpp"
#include "rbloss/rng.hpp"
#include "rbloss/verify.hpp"

using namespace rbloss;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int n, bool ok, const std::string& detail) {
  std::printf("[CRITERION %d] %s %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) v[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return v;
}

}  // namespace

TEST(Acceptance, C1_DeclaredFunctionTable) {
  const auto t0 = std::chrono::steady_clock::now();
  const VerifySummary s = summarize(verify_table2());
  const double secs = seconds_since(t0);
  const bool ok = s.cells == 204 && s.unexplained_mismatches == 0 && secs < 30.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "cells=%d matches=%d unexplained=%d time=%.2fs", s.cells,
                s.matches, s.unexplained_mismatches, secs);
  report(1, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C2_AssembledLossTable) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = verify_table3();
  const double secs = seconds_since(t0);
  const VerifySummary s = summarize(reports);

  bool witnesses_ok = true;
  std::string listed;
  for (const PropertyReport& r : reports)
    if (r.expected && !r.matches_expected() && r.explained) {
      witnesses_ok = witnesses_ok && std::isfinite(r.witness_x) && !r.note.empty();
      listed += " [" + r.subject + " " + property_name(r.property) + " witness t=" +
                std::to_string(r.witness_x) + "]";
    }

  const bool ok =
      s.cells == 680 && s.unexplained_mismatches == 0 && witnesses_ok && secs < 60.0;
  char buf[384];
  std::snprintf(buf, sizeof(buf), "cells=%d matches=%d explained=%d unexplained=%d time=%.2fs%s",
                s.cells, s.matches, s.explained_mismatches, s.unexplained_mismatches, secs,
                listed.c_str());
  report(2, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C3_ConstructiveConvexity) {
  bool ok = true;
  std::string detail;

  for (double alpha : {0.5, 1.0, 2.0}) {
    const RepresentingFunction sym = symmetrize(aux_pow(alpha));
    const RatioLoss loss = make_loss(sym, make_link(LinkKind::exp_shift), 0.0);
    if (check_convexity(loss).verdict != Verdict::holds) {
      ok = false;
      detail += " loss-not-convex(alpha=" + std::to_string(alpha) + ")";
    }
    const auto cert = convexity_certificate(aux_pow(alpha));
    for (double r : log_grid(1e-2, 1e2, 201)) {
      const double want = alpha * alpha * std::pow(r, alpha - 1.0);
      if (std::abs(cert(r) - want) > 1e-8 * (1.0 + std::abs(want))) {
        ok = false;
        detail += " certificate-off(alpha=" + std::to_string(alpha) + ")";
        break;
      }
    }
  }

  // For alpha = 1/2 the representing function itself loses convexity at
  // r = (2 sqrt((1+a)/(1-a)))^(1/a) = 12.
  const double alpha = 0.5;
  const double rstar = std::pow(2.0 * std::sqrt((1.0 + alpha) / (1.0 - alpha)), 1.0 / alpha);
  const RepresentingFunction half = symmetrize(aux_pow(alpha));
  const double h = 1e-3 * rstar;
  const double d2 =
      (half.value(rstar + h) - 2.0 * half.value(rstar) + half.value(rstar - h)) / (h * h);
  if (std::abs(rstar - 12.0) > 1e-9) ok = false;
  if (!(d2 < 0.0)) {
    ok = false;
    detail += " no-concavity-witness";
  }
  if (check_convexity(half).verdict != Verdict::fails) {
    ok = false;
    detail += " ell-convexity-check-missed-it";
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "alphas={0.5,1,2} convex losses, certificates match a^2 r^(a-1), "
                "ell''(%g)=%.3g<0%s",
                rstar, d2, detail.c_str());
  report(3, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C4_IntegralBuilder) {
  bool ok = true;
  std::string detail;

  Generator g1 = generator_ratio_over_one_plus();
  g1.C = std::numbers::ln2;
  const BuiltFunction b1 = build_from_generator(g1);
  double worst1 = 0.0;
  for (double r : log_grid(1e-3, 1e3, 401))
    worst1 = std::max(worst1, std::abs(b1.aux(r) - std::log1p(r)));
  if (worst1 > 1e-8) {
    ok = false;
    detail += " g1-aux-off";
  }

  Generator g2 = generator_sqrt_ratio();
  g2.C = std::log(1.0 + std::sqrt(2.0));
  const BuiltFunction b2 = build_from_generator(g2);
  double worst2 = 0.0;
  for (double r : log_grid(1e-3, 1e3, 401))
    worst2 = std::max(worst2,
                      std::abs(b2.aux(r) - std::log(std::sqrt(r) + std::sqrt(1.0 + r))));
  if (worst2 > 1e-8) {
    ok = false;
    detail += " g2-aux-off";
  }

  double sup1 = 0.0, sup2 = 0.0;
  for (const auto& [built, cap, sup] :
       {std::tuple<const BuiltFunction*, double, double*>{&b1, 2.0, &sup1},
        std::tuple<const BuiltFunction*, double, double*>{&b2, 1.0, &sup2}}) {
    const RatioLoss loss = make_loss(built->sym, make_link(LinkKind::exp_shift), 0.0);
    if (check_convexity(loss).verdict != Verdict::holds) {
      ok = false;
      detail += " built-loss-not-convex";
    }
    const PropertyReport glob = check_global_lipschitz(loss);
    *sup = glob.estimate;
    if (glob.verdict != Verdict::holds || !(glob.estimate <= cap + 1e-6)) {
      ok = false;
      detail += " built-loss-slope-over-cap";
    }
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "aux errors %.2e/%.2e (<=1e-8), slopes %.6f<=2 and %.6f<=1%s", worst1, worst2,
                sup1, sup2, detail.c_str());
  report(4, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C5_SlopeBoundLemmas) {
  const auto checks = check_lipschitz_bound_lemmas();
  bool ok = checks.size() >= 10;
  std::string detail;
  for (const LemmaCheck& c : checks)
    if (!(c.observed_sup <= c.bound + 1e-6)) {
      ok = false;
      detail += " " + c.subject + ":" + c.lemma;
    }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu hypothesis-satisfying cases, sup<=bound+1e-6%s",
                checks.size(), detail.c_str());
  report(5, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C6_GradientCorrectness) {
  bool ok = true;
  std::string detail;
  int losses = 0;

  GenConfig cfg;
  cfg.n = 30;
  cfg.d = 2;
  cfg.seed = 101;
  const Dataset data = generate_multiplicative(cfg);

  SplitMix64 rng(2026);
  for (Ell id : all_ells()) {
    const RepresentingFunction ell = make_catalog(id);
    if (!ell.declared() || !ell.declared()->differentiable) continue;
    ++losses;
    const RatioLoss loss = make_loss(ell, make_link(LinkKind::exp_shift), 0.5);

    int placed = 0;
    while (placed < 20) {
      const double y = rng.next_uniform(0.5, 5.0);
      const double t = rng.next_uniform(-2.0, 2.0);
      bool near_kink = false;
      for (double k : kink_scores(loss, y))
        if (std::abs(t - k) < 2e-3) near_kink = true;
      if (near_kink) continue;
      ++placed;
      const double h = 1e-6;
      const double fd = (eval_loss(loss, y, t + h) - eval_loss(loss, y, t - h)) / (2.0 * h);
      const double an = eval_loss_dt(loss, y, t);
      if (std::abs(an - fd) > 1e-5 * (1.0 + std::abs(fd))) {
        ok = false;
        detail += " dloss(" + ell_name(id) + ")";
        break;
      }
    }

    for (int rep = 0; rep < 20 && ok; ++rep) {
      LinearModel m{{rng.next_uniform(-0.3, 0.3), rng.next_uniform(-0.3, 0.3)},
                    rng.next_uniform(0.0, 0.8)};
      const auto g = risk_gradient(loss, data, m, 0.1);
      for (size_t j = 0; j < g.size(); ++j) {
        LinearModel up = m, dn = m;
        const double h = 1e-6;
        if (j < m.w.size()) {
          up.w[j] += h;
          dn.w[j] -= h;
        } else {
          up.b0 += h;
          dn.b0 -= h;
        }
        const double fd =
            (regularized_risk(loss, data, up, 0.1) - regularized_risk(loss, data, dn, 0.1)) /
            (2.0 * h);
        if (std::abs(g[j] - fd) > 1e-5 * (1.0 + std::abs(fd))) {
          ok = false;
          detail += " dr(" + ell_name(id) + ")";
          break;
        }
      }
    }
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%d smooth losses x 20 points, loss and risk gradients within 1e-5%s", losses,
                detail.c_str());
  report(6, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C7_BridgeEquivalence) {
  bool ok = true;
  std::string detail;
  double worst = 0.0;

  for (Ell id : all_ells()) {
    for (double c : {0.5, 0.0}) {
      const RatioLoss loss = make_loss(make_catalog(id), make_link(LinkKind::exp_shift), c);
      const DistanceForm df = to_distance_form(loss);
      for (int i = 0; i < 50 && ok; ++i) {
        const double y = 1.0 + i / 49.0;
        for (int j = 0; j < 50; ++j) {
          const double t = -0.7 + 1.4 * j / 49.0;
          const double gap =
              std::abs(eval_loss(loss, y, t) - df.psi(df.transform_y(y) - df.transform_t(t)));
          worst = std::max(worst, gap);
          if (gap > 1e-12) {
            ok = false;
            detail += " " + ell_name(id) + "(c=" + std::to_string(c) + ")";
            break;
          }
        }
      }
    }
  }

  const RepresentingFunction back =
      from_distance_form([](double d) { return d * d; }, "squared-distance");
  const RepresentingFunction sq = make_catalog(Ell::squared_log);
  for (double r : log_grid(std::exp(-1.4), std::exp(1.4), 2500))
    if (std::abs(back.value(r) - sq.value(r)) > 1e-12) {
      ok = false;
      detail += " reverse-bridge";
      break;
    }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "34 losses x {c=0.5, c=0} on 50x50 grids, worst gap %.2e (<=1e-12)%s", worst,
                detail.c_str());
  report(7, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C8_FitterOracles) {
  bool ok = true;
  std::string detail;

  {
    GenConfig cfg;
    cfg.n = 120;
    cfg.d = 2;
    cfg.noise = 0.0;
    cfg.seed = 21;
    const Dataset data = generate_multiplicative(cfg);
    const std::vector<double> w = default_gen_weights(2);
    for (Ell id : {Ell::lpre, Ell::squared_log, Ell::smooth_lare}) {
      const RatioLoss loss = make_loss(make_catalog(id), make_link(LinkKind::exp_shift), 0.0);
      const FitResult res = fit(loss, data);
      bool good = res.converged && std::abs(res.model.b0 - cfg.b0) <= 1e-6;
      for (int j = 0; j < cfg.d; ++j) good = good && std::abs(res.model.w[j] - w[j]) <= 1e-6;
      if (!good) {
        ok = false;
        detail += " recovery(" + ell_name(id) + ")";
      }
    }
  }

  {
    Dataset d;
    d.n = 5;
    d.d = 0;
    d.y = {0.5, 2.0, 3.0, 7.5, 1.1};
    double ml = 0.0;
    for (double y : d.y) ml += std::log(y);
    ml /= d.n;
    const FitResult res = fit(
        make_loss(make_catalog(Ell::squared_log), make_link(LinkKind::exp_shift), 0.0), d);
    if (!(std::abs(res.model.b0 - ml) <= 1e-8)) {
      ok = false;
      detail += " log-mean";
    }
  }

  {
    Dataset d;
    d.n = 4;
    d.d = 0;
    d.y = {1.0, std::exp(0.2), std::exp(0.4), std::exp(10.0)};
    EllParams p;
    p.tau = 0.5;
    const FitResult res = fit(
        make_loss(make_catalog(Ell::log_pinball, p), make_link(LinkKind::exp_shift), 0.0), d);
    if (!(res.model.b0 >= 0.2 - 1e-6 && res.model.b0 <= 0.4 + 1e-6)) {
      ok = false;
      detail += " median";
    }
  }

  {
    GenConfig cfg;
    cfg.n = 150;
    cfg.d = 3;
    cfg.noise = 0.1;
    cfg.seed = 33;
    const Dataset data = generate_multiplicative(cfg);
    Dataset scaled = data;
    for (double& y : scaled.y) y *= 7.0;
    for (Ell id : {Ell::squared_log, Ell::lpre}) {
      const RatioLoss loss = make_loss(make_catalog(id), make_link(LinkKind::exp_shift), 0.0);
      const FitResult a = fit(loss, data);
      const FitResult b = fit(loss, scaled);
      bool good = a.converged && b.converged &&
                  std::abs((b.model.b0 - a.model.b0) - std::log(7.0)) <= 1e-6;
      for (int j = 0; j < cfg.d; ++j)
        good = good && std::abs(b.model.w[j] - a.model.w[j]) <= 1e-6;
      if (!good) {
        ok = false;
        detail += " equivariance(" + ell_name(id) + ")";
      }
    }
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "noise-free recovery, log-mean, median interval, scale shift log(7)%s",
                detail.c_str());
  report(8, ok, buf);
  EXPECT_TRUE(ok) << buf;
}

TEST(Acceptance, C9_DegenerateAndRobustBehavior) {
  bool ok = true;
  std::string detail;

  const RepresentingFunction flat = flatten(make_catalog(Ell::log_cosh_log), 2.0, 1e8);
  for (double r : {1e-10, 1e10})
    if (std::abs(flat.value(r) - 0.5) > 1e-6) {
      ok = false;
      detail += " flatten-limit";
    }

  try {
    eval_metric(Metric::rae, {1.0, 2.0, 3.0}, {4.0, 4.0, 4.0});
    ok = false;
    detail += " rae-not-rejected";
  } catch (const error& e) {
    if (e.code() != errc::undefined_metric) {
      ok = false;
      detail += " rae-wrong-code";
    }
  }

  int c0 = 0, c1 = 0;
  for (Ell id : all_ells()) {
    const RepresentingFunction f = make_catalog(id);
    for (double k : f.breakpoints()) {
      const double h = 1e-12 * k;
      if (std::abs(f.value(k - h) - f.value(k + h)) > 1e-9 * (1.0 + std::abs(f.value(k)))) {
        ok = false;
        detail += " c0(" + ell_name(id) + ")";
      }
      ++c0;
      if (f.declared() && f.declared()->differentiable) {
        const double dl = f.deriv(k, Side::left), dr = f.deriv(k, Side::right);
        if (std::abs(dl - dr) > 1e-9 * (1.0 + std::abs(dl))) {
          ok = false;
          detail += " c1(" + ell_name(id) + ")";
        }
        ++c1;
      }
    }
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "flatten limits 1/lambda, rae undefined on constant y, %d C0 and %d C1 "
                "breakpoint checks%s",
                c0, c1, detail.c_str());
  report(9, ok, buf);
  EXPECT_TRUE(ok) << buf;
}
