#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rbloss/common.hpp"
#include "rbloss/link.hpp"
#include "rbloss/loss.hpp"
#include "rbloss/rng.hpp"

namespace rbloss {

struct Dataset {
  int n = 0;
  int d = 0;
  std::vector<double> x;  // row-major, n*d
  std::vector<double> y;

  double xij(int i, int j) const { return x[static_cast<size_t>(i) * d + j]; }
};

inline void check_dataset(const Dataset& data) {
  if (data.n <= 0) fail(errc::invalid_parameter, "dataset is empty");
  if (data.d < 0) fail(errc::invalid_parameter, "negative feature count");
  if (data.x.size() != static_cast<size_t>(data.n) * data.d)
    fail(errc::invalid_parameter, "feature matrix size does not match n*d");
  if (data.y.size() != static_cast<size_t>(data.n))
    fail(errc::invalid_parameter, "target vector size does not match n");
}

struct LinearModel {
  std::vector<double> w;
  double b0 = 0.0;
};

inline double model_score(const LinearModel& model, const Dataset& data, int i) {
  double t = model.b0;
  for (int j = 0; j < data.d; ++j) t += model.w[j] * data.xij(i, j);
  return t;
}

inline std::vector<double> predict(const RatioLoss& loss, const LinearModel& model,
                                   const Dataset& data) {
  check_dataset(data);
  if (static_cast<int>(model.w.size()) != data.d)
    fail(errc::invalid_parameter, "model width does not match dataset");
  std::vector<double> out(data.n);
  for (int i = 0; i < data.n; ++i) out[i] = eval_link(loss.link, model_score(model, data, i));
  return out;
}

// Plain average in ascending row order, so runs are bit-reproducible.
inline double empirical_risk(const RatioLoss& loss, const Dataset& data,
                             const LinearModel& model) {
  check_dataset(data);
  if (static_cast<int>(model.w.size()) != data.d)
    fail(errc::invalid_parameter, "model width does not match dataset");
  double sum = 0.0;
  for (int i = 0; i < data.n; ++i)
    sum += eval_loss(loss, data.y[i], model_score(model, data, i));
  return sum / data.n;
}

inline double regularized_risk(const RatioLoss& loss, const Dataset& data,
                               const LinearModel& model, double lambda) {
  double reg = 0.0;
  for (double w : model.w) reg += w * w;  // intercept excluded
  return empirical_risk(loss, data, model) + lambda * reg;
}

// Gradient in (w, b0); the last slot is the intercept. Right-sided slopes
// decide ties at kinks.
inline std::vector<double> risk_gradient(const RatioLoss& loss, const Dataset& data,
                                         const LinearModel& model, double lambda) {
  check_dataset(data);
  std::vector<double> g(data.d + 1, 0.0);
  for (int i = 0; i < data.n; ++i) {
    const double dl = eval_loss_dt(loss, data.y[i], model_score(model, data, i), Side::right);
    for (int j = 0; j < data.d; ++j) g[j] += dl * data.xij(i, j);
    g[data.d] += dl;
  }
  for (double& v : g) v /= data.n;
  for (int j = 0; j < data.d; ++j) g[j] += 2.0 * lambda * model.w[j];
  return g;
}

// Bound on the risk of the zero score (t = 0) when c > 0 and the
// representing function continues to r = 0: every ratio then lies in (0, m]
// with m = (u(0)+c)/c, and the loss is at most lip * (u(0)/c + 2).
struct ZeroRiskBound {
  double risk = qnan;
  double bound = qnan;
  double m = qnan;
  double ell_lip = qnan;
};

inline ZeroRiskBound risk_at_zero_bound(const RatioLoss& loss, const Dataset& data) {
  if (!(loss.c > 0.0)) fail(errc::hypothesis_violation, "zero-risk bound needs c > 0");
  if (!loss.ell.continuable_at_zero())
    fail(errc::hypothesis_violation,
         "zero-risk bound needs a representing function with a limit at 0");
  ZeroRiskBound out;
  const double u0 = eval_link(loss.link, 0.0);
  out.m = (u0 + loss.c) / loss.c;

  double lip = 0.0;
  const int n = 4001;
  const double llo = std::log(out.m) - 28.0, lhi = std::log(out.m);
  std::vector<double> rs;
  rs.reserve(n + 8);
  for (int i = 0; i < n; ++i) rs.push_back(std::exp(llo + (lhi - llo) * i / (n - 1)));
  for (double k : loss.ell.breakpoints())
    if (k < out.m) {
      rs.push_back(k);
      rs.push_back(std::max(k - 1e-9 * k, 1e-300));
      rs.push_back(std::min(k + 1e-9 * k, out.m));
    }
  for (double r : rs) {
    for (Side s : {Side::left, Side::right}) {
      const double d = std::abs(loss.ell.deriv(r, s));
      if (std::isfinite(d) && d > lip) lip = d;
    }
  }
  out.ell_lip = lip;
  out.bound = lip * (u0 / loss.c + 2.0);

  LinearModel zero;
  zero.w.assign(data.d, 0.0);
  out.risk = empirical_risk(loss, data, zero);
  return out;
}

enum class Metric { abs_rel, lrmse, mean_log10, rae };

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::abs_rel: return "absrel";
    case Metric::lrmse: return "lrmse";
    case Metric::mean_log10: return "meanlog10";
    case Metric::rae: return "rae";
  }
  return "?";
}

inline std::optional<Metric> metric_from_name(const std::string& s) {
  for (Metric m : {Metric::abs_rel, Metric::lrmse, Metric::mean_log10, Metric::rae})
    if (s == metric_name(m)) return m;
  return std::nullopt;
}

inline double eval_metric(Metric m, const std::vector<double>& pred,
                          const std::vector<double>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    fail(errc::invalid_parameter, "prediction and target lengths differ");
  const int n = static_cast<int>(pred.size());
  switch (m) {
    case Metric::abs_rel: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(truth[i] > 0.0)) fail(errc::domain, "relative error needs positive targets");
        s += std::abs(pred[i] - truth[i]) / truth[i];
      }
      return s / n;
    }
    case Metric::lrmse: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(truth[i] > 0.0 && pred[i] > 0.0))
          fail(errc::domain, "log error needs positive values");
        s += sqr(std::log(pred[i]) - std::log(truth[i]));
      }
      return std::sqrt(s / n);
    }
    case Metric::mean_log10: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(truth[i] > 0.0 && pred[i] > 0.0))
          fail(errc::domain, "log error needs positive values");
        s += std::abs(std::log10(pred[i]) - std::log10(truth[i]));
      }
      return s / n;
    }
    case Metric::rae: {
      const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        num += std::abs(truth[i] - pred[i]);
        den += std::abs(truth[i] - mean);
      }
      if (den == 0.0)
        fail(errc::undefined_metric, "relative absolute error is undefined for constant targets");
      return num / den;
    }
  }
  fail(errc::invalid_parameter, "unknown metric");
}

struct GenConfig {
  int n = 200;
  int d = 3;
  std::uint64_t seed = 1;
  double noise = 0.1;  // lognormal sigma on top of the clean response
  Link link = make_link(LinkKind::exp_shift);
  std::vector<double> w;  // defaults to an alternating decaying pattern
  double b0 = 0.5;
  double x_scale = 1.0;
};

inline std::vector<double> default_gen_weights(int d) {
  std::vector<double> w(d);
  for (int j = 0; j < d; ++j) w[j] = (j % 2 == 0 ? 0.5 : -0.3) / (1.0 + j / 2);
  return w;
}

inline Dataset generate_multiplicative(const GenConfig& cfg) {
  if (cfg.n <= 0 || cfg.d < 0) fail(errc::invalid_parameter, "bad dataset shape");
  if (!(cfg.noise >= 0.0)) fail(errc::invalid_parameter, "noise must be >= 0");
  std::vector<double> w = cfg.w.empty() ? default_gen_weights(cfg.d) : cfg.w;
  if (static_cast<int>(w.size()) != cfg.d)
    fail(errc::invalid_parameter, "weight vector width does not match d");

  Dataset data;
  data.n = cfg.n;
  data.d = cfg.d;
  data.x.resize(static_cast<size_t>(cfg.n) * cfg.d);
  data.y.resize(cfg.n);
  SplitMix64 rng(cfg.seed);
  for (int i = 0; i < cfg.n; ++i) {
    double u = 0.0;
    for (int attempt = 0;; ++attempt) {
      double t = cfg.b0;
      for (int j = 0; j < cfg.d; ++j) {
        const double xv = cfg.x_scale * rng.next_normal();
        data.x[static_cast<size_t>(i) * cfg.d + j] = xv;
        t += w[j] * xv;
      }
      u = eval_link(cfg.link, t);
      const double y = u * std::exp(cfg.noise * rng.next_normal());
      if (y > cfg.link.a && y < cfg.link.b) {
        data.y[i] = y;
        break;
      }
      if (attempt >= 100) {  // keep the clean response rather than loop forever
        data.y[i] = u;
        break;
      }
    }
  }
  return data;
}

struct FitOptions {
  double lambda = 0.0;
  int max_iter = 10000;
  double grad_tol = 1e-8;
  double init_step = 1.0;
};

struct FitResult {
  LinearModel model;
  bool converged = false;
  int iterations = 0;
  double final_risk = qnan;
  double grad_inf_norm = qnan;
  std::string stop_reason;
};

namespace detail {

inline double init_intercept(const RatioLoss& loss, const Dataset& data) {
  if (loss.link.kind == LinkKind::exp_shift || loss.link.kind == LinkKind::neg_exp_shift) {
    double s = 0.0;
    for (double y : data.y) s += std::log(y - loss.link.a);
    s /= data.n;
    return loss.link.kind == LinkKind::exp_shift ? s : -s;
  }
  return 0.0;
}

}  // namespace detail

// Gradient descent with Armijo backtracking on the regularized risk.
inline FitResult fit(const RatioLoss& loss, const Dataset& data, const FitOptions& opt = {}) {
  check_dataset(data);
  if (!(opt.lambda >= 0.0)) fail(errc::invalid_parameter, "lambda must be >= 0");

  FitResult res;
  res.model.w.assign(data.d, 0.0);
  res.model.b0 = detail::init_intercept(loss, data);

  double risk = regularized_risk(loss, data, res.model, opt.lambda);
  double step = opt.init_step;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const std::vector<double> g = risk_gradient(loss, data, res.model, opt.lambda);
    double gmax = 0.0, gsq = 0.0;
    for (double v : g) {
      gmax = std::max(gmax, std::abs(v));
      gsq += v * v;
    }
    res.iterations = iter;
    res.grad_inf_norm = gmax;
    // An exact zero certifies a global minimum of the nonnegative objective.
    if (gmax < opt.grad_tol || risk == 0.0) {
      res.converged = true;
      res.stop_reason = "converged";
      res.final_risk = risk;
      return res;
    }

    step = std::min(step * 2.0, opt.init_step * 1e6);
    LinearModel trial = res.model;
    for (;;) {
      for (int j = 0; j < data.d; ++j) trial.w[j] = res.model.w[j] - step * g[j];
      trial.b0 = res.model.b0 - step * g[data.d];
      double trial_risk = inf;
      try {
        trial_risk = regularized_risk(loss, data, trial, opt.lambda);
      } catch (const error&) {
        // predictions left the admissible range; shrink the step
      }
      if (std::isfinite(trial_risk) && trial_risk <= risk - 1e-4 * step * gsq) {
        res.model = trial;
        risk = trial_risk;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) {
        res.stop_reason = "step-collapse";
        res.final_risk = risk;
        res.grad_inf_norm = gmax;
        return res;
      }
    }
  }
  res.iterations = opt.max_iter;
  res.stop_reason = "max-iterations";
  res.final_risk = risk;
  return res;
}

}  // namespace rbloss
