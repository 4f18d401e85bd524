#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rbloss/common.hpp"

namespace rbloss {

// Representing functions ell: (0,inf) -> [0,inf) with ell(1) = 0.
enum class Ell : int {
  log_ratio_sym = 1,
  sqrt_log = 2,
  squared_log = 3,
  abs_log = 4,
  huber_log = 5,
  log_cosh_rel = 6,
  cosh_log = 7,
  log_cosh_log = 8,
  max_loss = 9,
  log_pinball = 10,
  abs_rel = 11,
  squared_rel = 12,
  huber_rel = 13,
  inv_abs_rel = 14,
  inv_sq_rel = 15,
  huber_inv = 16,
  lare = 17,
  smooth_lare = 18,
  huber_lare = 19,
  lpre = 20,
  gre_sq = 21,
  gre_norm = 22,
  gre_sqrt = 23,
  gre_exp = 24,
  insens_max = 25,
  insens_lpre = 26,
  robust_max = 27,
  robust_lpre = 28,
  flat_lcl = 29,
  hampel_lare_3 = 30,
  hampel_lare_2 = 31,
  weighted_max = 32,
  weighted_lpre = 33,
  weighted_smooth_lare = 34,
};

struct EllParams {
  double alpha = qnan;
  double beta = qnan;
  double gamma = qnan;
  double tau = qnan;
  double epsilon = qnan;
  double lambda = qnan;
  double b = qnan;
};

// Property flags of ell as a function of r on (0,inf).
struct Declared {
  bool ratio_symmetric = false;
  bool convex = false;
  bool continuous = false;
  bool locally_lipschitz = false;
  bool globally_lipschitz = false;
  bool differentiable = false;
};

class RepresentingFunction {
public:
  using ValueFn = std::function<double(double)>;
  using DerivFn = std::function<double(double, Side)>;

  RepresentingFunction() = default;

  static RepresentingFunction custom(std::string name, ValueFn value, DerivFn deriv,
                                     std::vector<double> breakpoints = {}) {
    RepresentingFunction f;
    f.name_ = std::move(name);
    f.value_ = std::move(value);
    f.deriv_ = std::move(deriv);
    f.breakpoints_ = std::move(breakpoints);
    return f;
  }

  double value(double r) const {
    check_domain(r);
    return value_(r);
  }

  double deriv(double r, Side side = Side::right) const {
    check_domain(r);
    return deriv_(r, side);
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& name() const { return name_; }
  std::optional<Ell> id() const { return id_; }
  const EllParams& params() const { return params_; }
  std::optional<Declared> declared() const { return declared_; }

  // True when ell extends to a locally Lipschitz function on [0,inf).
  bool continuable_at_zero() const { return continuable_at_zero_; }
  double zero_limit() const { return zero_limit_; }

private:
  static void check_domain(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
      fail(errc::domain, "representing function argument must be a finite r > 0");
  }

  std::string name_;
  ValueFn value_;
  DerivFn deriv_;
  std::vector<double> breakpoints_;
  std::optional<Ell> id_;
  EllParams params_;
  std::optional<Declared> declared_;
  bool continuable_at_zero_ = false;
  double zero_limit_ = qnan;

  friend RepresentingFunction make_catalog(Ell, EllParams);
};

inline const std::vector<Ell>& all_ells() {
  static const std::vector<Ell> ids = [] {
    std::vector<Ell> v;
    for (int i = 1; i <= 34; ++i) v.push_back(static_cast<Ell>(i));
    return v;
  }();
  return ids;
}

inline std::string ell_name(Ell id) {
  switch (id) {
    case Ell::log_ratio_sym: return "log-ratio-sym";
    case Ell::sqrt_log: return "sqrt-log";
    case Ell::squared_log: return "squared-log";
    case Ell::abs_log: return "abs-log";
    case Ell::huber_log: return "huber-log";
    case Ell::log_cosh_rel: return "log-cosh-rel";
    case Ell::cosh_log: return "cosh-log";
    case Ell::log_cosh_log: return "log-cosh-log";
    case Ell::max_loss: return "max-loss";
    case Ell::log_pinball: return "log-pinball";
    case Ell::abs_rel: return "abs-rel";
    case Ell::squared_rel: return "squared-rel";
    case Ell::huber_rel: return "huber-rel";
    case Ell::inv_abs_rel: return "inv-abs-rel";
    case Ell::inv_sq_rel: return "inv-sq-rel";
    case Ell::huber_inv: return "huber-inv";
    case Ell::lare: return "lare";
    case Ell::smooth_lare: return "smooth-lare";
    case Ell::huber_lare: return "huber-lare";
    case Ell::lpre: return "lpre";
    case Ell::gre_sq: return "gre-sq";
    case Ell::gre_norm: return "gre-norm";
    case Ell::gre_sqrt: return "gre-sqrt";
    case Ell::gre_exp: return "gre-exp";
    case Ell::insens_max: return "insens-max";
    case Ell::insens_lpre: return "insens-lpre";
    case Ell::robust_max: return "robust-max";
    case Ell::robust_lpre: return "robust-lpre";
    case Ell::flat_lcl: return "flat-lcl";
    case Ell::hampel_lare_3: return "hampel-lare-3";
    case Ell::hampel_lare_2: return "hampel-lare-2";
    case Ell::weighted_max: return "weighted-max";
    case Ell::weighted_lpre: return "weighted-lpre";
    case Ell::weighted_smooth_lare: return "weighted-smooth-lare";
  }
  fail(errc::invalid_parameter, "unknown catalog id");
}

inline std::optional<Ell> ell_from_name(const std::string& name) {
  for (Ell id : all_ells())
    if (ell_name(id) == name) return id;
  return std::nullopt;
}

// Parameter slots an entry actually uses, in CLI spelling.
inline std::vector<std::string> ell_param_names(Ell id) {
  switch (id) {
    case Ell::huber_log:
    case Ell::huber_rel:
    case Ell::huber_inv:
    case Ell::huber_lare: return {"alpha"};
    case Ell::log_pinball: return {"tau"};
    case Ell::insens_max:
    case Ell::insens_lpre: return {"epsilon"};
    case Ell::robust_max:
    case Ell::robust_lpre: return {"alpha", "epsilon"};
    case Ell::flat_lcl: return {"lambda", "b"};
    case Ell::hampel_lare_3: return {"alpha", "beta", "gamma"};
    case Ell::hampel_lare_2: return {"alpha", "beta"};
    case Ell::weighted_max:
    case Ell::weighted_lpre:
    case Ell::weighted_smooth_lare: return {"tau"};
    default: return {};
  }
}

inline bool ell_is_parametric(Ell id) { return !ell_param_names(id).empty(); }

inline EllParams default_params(Ell id) {
  EllParams p;
  switch (id) {
    case Ell::huber_log:
    case Ell::huber_rel:
    case Ell::huber_inv:
    case Ell::huber_lare: p.alpha = 3.0; break;
    case Ell::log_pinball: p.tau = 0.1; break;
    case Ell::insens_max:
    case Ell::insens_lpre: p.epsilon = 0.2; break;
    case Ell::robust_max:
    case Ell::robust_lpre:
      p.alpha = 3.0;
      p.epsilon = 0.2;
      break;
    case Ell::flat_lcl:
      p.lambda = 1.0;
      p.b = 1.0;
      break;
    case Ell::hampel_lare_3:
      p.alpha = 3.0;
      p.beta = 5.0;
      p.gamma = 8.0;
      break;
    case Ell::hampel_lare_2:
      p.alpha = 3.0;
      p.beta = 5.0;
      break;
    case Ell::weighted_max:
    case Ell::weighted_lpre:
    case Ell::weighted_smooth_lare: p.tau = 2.0; break;
    default: break;
  }
  return p;
}

// Alternate valid draw used to re-confirm properties that are declared to
// hold for every parameter choice.
inline EllParams second_draw_params(Ell id) {
  EllParams p = default_params(id);
  switch (id) {
    case Ell::huber_log:
    case Ell::huber_rel:
    case Ell::huber_inv:
    case Ell::huber_lare: p.alpha = 1.5; break;
    case Ell::log_pinball: p.tau = 0.5; break;
    case Ell::insens_max:
    case Ell::insens_lpre: p.epsilon = 0.05; break;
    case Ell::robust_max:
    case Ell::robust_lpre:
      p.alpha = 1.5;
      p.epsilon = 0.05;
      break;
    case Ell::hampel_lare_3:
      p.alpha = 1.5;
      p.beta = 2.5;
      p.gamma = 4.0;
      break;
    case Ell::hampel_lare_2:
      p.alpha = 1.5;
      p.beta = 2.5;
      break;
    case Ell::weighted_max:
    case Ell::weighted_lpre:
    case Ell::weighted_smooth_lare: p.tau = 0.5; break;
    default: break;
  }
  return p;
}

inline void validate_params(Ell id, const EllParams& p) {
  auto need = [&](double v, const char* what) {
    if (!std::isfinite(v)) fail(errc::invalid_parameter, ell_name(id) + ": missing or non-finite " + what);
  };
  switch (id) {
    case Ell::huber_log:
    case Ell::huber_rel:
    case Ell::huber_inv:
    case Ell::huber_lare:
      need(p.alpha, "alpha");
      if (!(p.alpha > 1.0)) fail(errc::invalid_parameter, ell_name(id) + ": requires alpha > 1");
      break;
    case Ell::log_pinball:
      need(p.tau, "tau");
      if (!(p.tau > 0.0 && p.tau < 1.0)) fail(errc::invalid_parameter, "log-pinball: requires tau in (0,1)");
      break;
    case Ell::insens_max:
    case Ell::insens_lpre:
      need(p.epsilon, "epsilon");
      if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
        fail(errc::invalid_parameter, ell_name(id) + ": requires epsilon in (0,1)");
      break;
    case Ell::robust_max:
    case Ell::robust_lpre:
      need(p.alpha, "alpha");
      need(p.epsilon, "epsilon");
      if (!(p.epsilon >= 0.0)) fail(errc::invalid_parameter, ell_name(id) + ": requires epsilon >= 0");
      if (!(p.alpha > 1.0 + p.epsilon))
        fail(errc::invalid_parameter, ell_name(id) + ": requires alpha > 1 + epsilon");
      // Keeps the clip level of the lpre variant nonnegative.
      if (id == Ell::robust_lpre && !(p.alpha + 1.0 / p.alpha - 2.0 >= p.epsilon))
        fail(errc::invalid_parameter, "robust-lpre: requires alpha + 1/alpha - 2 >= epsilon");
      break;
    case Ell::flat_lcl:
      need(p.lambda, "lambda");
      need(p.b, "b");
      if (!(p.lambda > 0.0 && p.b > 0.0)) fail(errc::invalid_parameter, "flat-lcl: requires lambda > 0 and b > 0");
      break;
    case Ell::hampel_lare_3:
      need(p.alpha, "alpha");
      need(p.beta, "beta");
      need(p.gamma, "gamma");
      if (!(1.0 < p.alpha && p.alpha < p.beta && p.beta < p.gamma))
        fail(errc::invalid_parameter, "hampel-lare-3: requires 1 < alpha < beta < gamma");
      break;
    case Ell::hampel_lare_2:
      need(p.alpha, "alpha");
      need(p.beta, "beta");
      if (!(1.0 < p.alpha && p.alpha < p.beta))
        fail(errc::invalid_parameter, "hampel-lare-2: requires 1 < alpha < beta");
      break;
    case Ell::weighted_max:
    case Ell::weighted_lpre:
    case Ell::weighted_smooth_lare:
      need(p.tau, "tau");
      if (!(p.tau > 0.0)) fail(errc::invalid_parameter, ell_name(id) + ": requires tau > 0");
      break;
    default: break;
  }
}

namespace detail {

inline double ssym(double r) { return r - 1.0 / r; }
inline double ssym_d(double r) { return 1.0 + 1.0 / (r * r); }

inline std::string format_params(Ell id, const EllParams& p) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  std::string out;
  for (const std::string& k : ell_param_names(id)) {
    double v = qnan;
    if (k == "alpha") v = p.alpha;
    else if (k == "beta") v = p.beta;
    else if (k == "gamma") v = p.gamma;
    else if (k == "tau") v = p.tau;
    else if (k == "epsilon") v = p.epsilon;
    else if (k == "lambda") v = p.lambda;
    else if (k == "b") v = p.b;
    out += (out.empty() ? "" : ",") + k + "=" + num(v);
  }
  return out.empty() ? std::string() : "(" + out + ")";
}

inline Declared declared_table2(Ell id) {
  // Flags of ell as a function on (0,inf):
  // {ratio-symmetric, convex, continuous, locally Lipschitz, globally Lipschitz, differentiable}.
  switch (id) {
    case Ell::log_ratio_sym: return {true, false, true, true, false, true};
    case Ell::sqrt_log: return {true, false, true, true, false, true};
    case Ell::squared_log: return {true, false, true, true, false, true};
    case Ell::abs_log: return {true, false, true, true, false, false};
    case Ell::huber_log: return {true, false, true, true, false, true};
    case Ell::log_cosh_rel: return {false, true, true, true, true, true};
    case Ell::cosh_log: return {true, true, true, true, false, true};
    case Ell::log_cosh_log: return {true, false, true, true, false, true};
    case Ell::max_loss: return {true, true, true, true, false, false};
    case Ell::log_pinball: return {false, false, true, true, false, false};
    case Ell::abs_rel: return {false, true, true, true, true, false};
    case Ell::squared_rel: return {false, true, true, true, false, true};
    case Ell::huber_rel: return {false, true, true, true, true, true};
    case Ell::inv_abs_rel: return {false, false, true, true, false, false};
    case Ell::inv_sq_rel: return {false, false, true, true, false, true};
    case Ell::huber_inv: return {false, false, true, true, false, true};
    case Ell::lare: return {true, false, true, true, false, false};
    case Ell::smooth_lare: return {true, true, true, true, false, true};
    case Ell::huber_lare: return {true, false, true, true, false, true};
    case Ell::lpre: return {true, true, true, true, false, true};
    case Ell::gre_sq: return {true, true, true, true, false, true};
    case Ell::gre_norm: return {true, false, true, true, false, false};
    case Ell::gre_sqrt: return {true, false, true, false, false, false};
    case Ell::gre_exp: return {false, false, true, true, false, false};
    case Ell::insens_max: return {true, true, true, true, false, false};
    case Ell::insens_lpre: return {true, true, true, true, false, false};
    case Ell::robust_max: return {true, false, true, true, true, false};
    case Ell::robust_lpre: return {true, false, true, true, true, false};
    case Ell::flat_lcl: return {true, false, true, true, false, true};
    case Ell::hampel_lare_3: return {true, false, true, true, true, true};
    case Ell::hampel_lare_2: return {true, false, true, true, true, true};
    case Ell::weighted_max: return {false, true, true, true, false, false};
    case Ell::weighted_lpre: return {false, true, true, true, false, true};
    case Ell::weighted_smooth_lare: return {false, true, true, true, false, true};
  }
  fail(errc::invalid_parameter, "unknown catalog id");
}

}  // namespace detail

inline RepresentingFunction make_catalog(Ell id, EllParams user = {}) {
  EllParams def = default_params(id);
  EllParams p = user;
  auto pick = [](double& dst, double fallback) {
    if (!std::isfinite(dst)) dst = fallback;
  };
  pick(p.alpha, def.alpha);
  pick(p.beta, def.beta);
  pick(p.gamma, def.gamma);
  pick(p.tau, def.tau);
  pick(p.epsilon, def.epsilon);
  pick(p.lambda, def.lambda);
  pick(p.b, def.b);
  validate_params(id, p);

  using detail::ssym;
  using detail::ssym_d;
  RepresentingFunction f;
  f.id_ = id;
  f.params_ = p;
  f.declared_ = detail::declared_table2(id);
  f.name_ = ell_name(id) + detail::format_params(id, p);

  switch (id) {
    case Ell::log_ratio_sym:
      f.value_ = [](double r) { return 2.0 * std::log1p(r) - std::log(r) - 2.0 * std::numbers::ln2; };
      f.deriv_ = [](double r, Side) { return 2.0 / (1.0 + r) - 1.0 / r; };
      break;

    case Ell::sqrt_log: {
      auto lt = [](double r) { return std::log(std::sqrt(r) + std::sqrt(1.0 + r)); };
      const double lt1 = std::log(1.0 + std::sqrt(2.0));
      f.value_ = [lt, lt1](double r) { return lt(r) + lt(1.0 / r) - 2.0 * lt1; };
      f.deriv_ = [](double r, Side) { return (std::sqrt(r) - 1.0) / (2.0 * r * std::sqrt(1.0 + r)); };
      break;
    }

    case Ell::squared_log:
      f.value_ = [](double r) { return sqr(std::log(r)); };
      f.deriv_ = [](double r, Side) { return 2.0 * std::log(r) / r; };
      break;

    case Ell::abs_log:
      f.value_ = [](double r) { return std::abs(std::log(r)); };
      f.deriv_ = [](double r, Side side) {
        if (r == 1.0) return side == Side::left ? -1.0 : 1.0;
        return (r > 1.0 ? 1.0 : -1.0) / r;
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::huber_log: {
      const double al = p.alpha, la = std::log(p.alpha);
      f.value_ = [al, la](double r) {
        const double lr = std::log(r);
        if (r <= 1.0 / al) return -la * (2.0 * lr + la);
        if (r >= al) return la * (2.0 * lr - la);
        return lr * lr;
      };
      f.deriv_ = [al, la](double r, Side) {
        if (r <= 1.0 / al) return -2.0 * la / r;
        if (r >= al) return 2.0 * la / r;
        return 2.0 * std::log(r) / r;
      };
      f.breakpoints_ = {1.0 / al, al};
      break;
    }

    case Ell::log_cosh_rel:
      f.value_ = [](double r) { return log_cosh(r - 1.0); };
      f.deriv_ = [](double r, Side) { return std::tanh(r - 1.0); };
      f.continuable_at_zero_ = true;
      f.zero_limit_ = log_cosh(-1.0);
      break;

    case Ell::cosh_log:
      f.value_ = [](double r) { return (r + 1.0 / r) / 2.0 - 1.0; };
      f.deriv_ = [](double r, Side) { return (1.0 - 1.0 / (r * r)) / 2.0; };
      break;

    case Ell::log_cosh_log:
      f.value_ = [](double r) { return log_cosh(std::log(r)); };
      f.deriv_ = [](double r, Side) { return std::tanh(std::log(r)) / r; };
      break;

    case Ell::max_loss:
      f.value_ = [](double r) { return std::max(r, 1.0 / r) - 1.0; };
      f.deriv_ = [](double r, Side side) {
        if (r > 1.0) return 1.0;
        if (r < 1.0) return -1.0 / (r * r);
        return side == Side::left ? -1.0 : 1.0;
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::log_pinball: {
      const double tau = p.tau;
      f.value_ = [tau](double r) {
        const double lr = std::log(r);
        return lr >= 0.0 ? tau * lr : -(1.0 - tau) * lr;
      };
      f.deriv_ = [tau](double r, Side side) {
        if (r > 1.0) return tau / r;
        if (r < 1.0) return -(1.0 - tau) / r;
        return side == Side::left ? -(1.0 - tau) : tau;
      };
      f.breakpoints_ = {1.0};
      break;
    }

    case Ell::abs_rel:
      f.value_ = [](double r) { return std::abs(r - 1.0); };
      f.deriv_ = [](double r, Side side) {
        if (r > 1.0) return 1.0;
        if (r < 1.0) return -1.0;
        return side == Side::left ? -1.0 : 1.0;
      };
      f.breakpoints_ = {1.0};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = 1.0;
      break;

    case Ell::squared_rel:
      f.value_ = [](double r) { return sqr(r - 1.0); };
      f.deriv_ = [](double r, Side) { return 2.0 * (r - 1.0); };
      f.continuable_at_zero_ = true;
      f.zero_limit_ = 1.0;
      break;

    case Ell::huber_rel: {
      const double al = p.alpha;
      f.value_ = [al](double r) {
        if (r <= 1.0 / al) return 2.0 * (1.0 / al - 1.0) * (r - 1.0) - sqr(1.0 - 1.0 / al);
        if (r >= al) return 2.0 * (al - 1.0) * (r - 1.0) - sqr(al - 1.0);
        return sqr(r - 1.0);
      };
      f.deriv_ = [al](double r, Side) {
        if (r <= 1.0 / al) return 2.0 * (1.0 / al - 1.0);
        if (r >= al) return 2.0 * (al - 1.0);
        return 2.0 * (r - 1.0);
      };
      f.breakpoints_ = {1.0 / al, al};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = 2.0 * (1.0 - 1.0 / al) - sqr(1.0 - 1.0 / al);
      break;
    }

    case Ell::inv_abs_rel:
      f.value_ = [](double r) { return std::abs(1.0 / r - 1.0); };
      f.deriv_ = [](double r, Side side) {
        if (r > 1.0) return 1.0 / (r * r);
        if (r < 1.0) return -1.0 / (r * r);
        return side == Side::left ? -1.0 : 1.0;
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::inv_sq_rel:
      f.value_ = [](double r) { return sqr(1.0 / r - 1.0); };
      f.deriv_ = [](double r, Side) { return -2.0 * (1.0 / r - 1.0) / (r * r); };
      break;

    case Ell::huber_inv: {
      const double al = p.alpha;
      f.value_ = [al](double r) {
        const double q = 1.0 / r - 1.0;
        if (r <= 1.0 / al) return 2.0 * (al - 1.0) * q - sqr(al - 1.0);
        if (r >= al) return 2.0 * (1.0 / al - 1.0) * q - sqr(1.0 - 1.0 / al);
        return q * q;
      };
      f.deriv_ = [al](double r, Side) {
        const double inv2 = 1.0 / (r * r);
        if (r <= 1.0 / al) return -2.0 * (al - 1.0) * inv2;
        if (r >= al) return -2.0 * (1.0 / al - 1.0) * inv2;
        return -2.0 * (1.0 / r - 1.0) * inv2;
      };
      f.breakpoints_ = {1.0 / al, al};
      break;
    }

    case Ell::lare:
      f.value_ = [](double r) { return std::abs(ssym(r)); };
      f.deriv_ = [](double r, Side side) {
        if (r > 1.0) return ssym_d(r);
        if (r < 1.0) return -ssym_d(r);
        return side == Side::left ? -2.0 : 2.0;
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::smooth_lare:
      f.value_ = [](double r) { return sqr(ssym(r)); };
      f.deriv_ = [](double r, Side) { return 2.0 * ssym(r) * ssym_d(r); };
      break;

    case Ell::huber_lare: {
      const double al = p.alpha, A = p.alpha - 1.0 / p.alpha;
      f.value_ = [al, A](double r) {
        const double s = ssym(r);
        if (r <= 1.0 / al) return -2.0 * A * s - A * A;
        if (r >= al) return 2.0 * A * s - A * A;
        return s * s;
      };
      f.deriv_ = [al, A](double r, Side) {
        const double sp = ssym_d(r);
        if (r <= 1.0 / al) return -2.0 * A * sp;
        if (r >= al) return 2.0 * A * sp;
        return 2.0 * ssym(r) * sp;
      };
      f.breakpoints_ = {1.0 / al, al};
      break;
    }

    case Ell::lpre:
      f.value_ = [](double r) { return r + 1.0 / r - 2.0; };
      f.deriv_ = [](double r, Side) { return 1.0 - 1.0 / (r * r); };
      break;

    case Ell::gre_sq:
      f.value_ = [](double r) { return sqr(1.0 - r) + sqr(1.0 / r - 1.0); };
      f.deriv_ = [](double r, Side) { return 2.0 * (r - 1.0) - 2.0 * (1.0 / r - 1.0) / (r * r); };
      break;

    case Ell::gre_norm:
      f.value_ = [](double r) { return std::sqrt(sqr(1.0 - r) + sqr(1.0 / r - 1.0)); };
      f.deriv_ = [](double r, Side side) {
        if (r == 1.0) return side == Side::left ? -std::sqrt(2.0) : std::sqrt(2.0);
        const double v = std::sqrt(sqr(1.0 - r) + sqr(1.0 / r - 1.0));
        const double dv = 2.0 * (r - 1.0) - 2.0 * (1.0 / r - 1.0) / (r * r);
        return dv / (2.0 * v);
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::gre_sqrt:
      // |1-r| + |1/r-1| collapses to |r - 1/r|.
      f.value_ = [](double r) { return std::sqrt(std::abs(ssym(r))); };
      f.deriv_ = [](double r, Side side) {
        if (r == 1.0) return side == Side::left ? -inf : inf;
        const double s = ssym(r);
        return (s > 0.0 ? 1.0 : -1.0) * ssym_d(r) / (2.0 * std::sqrt(std::abs(s)));
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::gre_exp:
      f.value_ = [](double r) { return std::abs(1.0 - r) + std::expm1(std::abs(1.0 / r - 1.0)); };
      f.deriv_ = [](double r, Side side) {
        if (r > 1.0) return 1.0 + std::exp(1.0 - 1.0 / r) / (r * r);
        if (r < 1.0) return -1.0 - std::exp(1.0 / r - 1.0) / (r * r);
        return side == Side::left ? -2.0 : 2.0;
      };
      f.breakpoints_ = {1.0};
      break;

    case Ell::insens_max: {
      const double eps = p.epsilon, hi = 1.0 + p.epsilon, lo = 1.0 / (1.0 + p.epsilon);
      f.value_ = [eps](double r) { return std::max(0.0, std::max(r, 1.0 / r) - 1.0 - eps); };
      f.deriv_ = [hi, lo](double r, Side side) {
        if (r > hi) return 1.0;
        if (r < lo) return -1.0 / (r * r);
        if (r == hi) return side == Side::left ? 0.0 : 1.0;
        if (r == lo) return side == Side::left ? -1.0 / (r * r) : 0.0;
        return 0.0;
      };
      f.breakpoints_ = {lo, hi};
      break;
    }

    case Ell::insens_lpre: {
      const double eps = p.epsilon;
      const double m = (2.0 + p.epsilon) / 2.0;
      const double hi = m + std::sqrt(m * m - 1.0), lo = 1.0 / hi;
      f.value_ = [eps](double r) { return std::max(0.0, r + 1.0 / r - 2.0 - eps); };
      f.deriv_ = [hi, lo](double r, Side side) {
        const double d = 1.0 - 1.0 / (r * r);
        if (r > hi || r < lo) return d;
        if (r == hi) return side == Side::left ? 0.0 : d;
        if (r == lo) return side == Side::left ? d : 0.0;
        return 0.0;
      };
      f.breakpoints_ = {lo, hi};
      break;
    }

    case Ell::robust_max: {
      const double al = p.alpha, eps = p.epsilon;
      const double hi = 1.0 + eps, lo = 1.0 / (1.0 + eps), clip = al - 1.0 - eps;
      f.value_ = [al, eps, clip](double r) {
        if (r <= 1.0 / al || r >= al) return clip;
        return std::max(0.0, std::max(r, 1.0 / r) - 1.0 - eps);
      };
      f.deriv_ = [al, hi, lo](double r, Side side) {
        if (r < 1.0 / al || r > al) return 0.0;
        if (r == 1.0 / al) return side == Side::left ? 0.0 : -1.0 / (r * r);
        if (r == al) return side == Side::left ? 1.0 : 0.0;
        if (r > hi) return 1.0;
        if (r < lo) return -1.0 / (r * r);
        if (r == hi) return side == Side::left ? 0.0 : 1.0;
        if (r == lo) return side == Side::left ? -1.0 / (r * r) : 0.0;
        return 0.0;
      };
      f.breakpoints_ = {1.0 / al, lo, hi, al};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = clip;
      break;
    }

    case Ell::robust_lpre: {
      const double al = p.alpha, eps = p.epsilon;
      const double m = (2.0 + eps) / 2.0;
      const double hi = m + std::sqrt(m * m - 1.0), lo = 1.0 / hi;
      const double clip = al + 1.0 / al - 2.0 - eps;
      f.value_ = [al, eps, clip](double r) {
        if (r <= 1.0 / al || r >= al) return clip;
        return std::max(0.0, r + 1.0 / r - 2.0 - eps);
      };
      f.deriv_ = [al, hi, lo](double r, Side side) {
        const double d = 1.0 - 1.0 / (r * r);
        if (r < 1.0 / al || r > al) return 0.0;
        if (r == 1.0 / al) return side == Side::left ? 0.0 : d;
        if (r == al) return side == Side::left ? d : 0.0;
        if (r > hi || r < lo) return d;
        if (r == hi) return side == Side::left ? 0.0 : d;
        if (r == lo) return side == Side::left ? d : 0.0;
        return 0.0;
      };
      f.breakpoints_ = {1.0 / al, lo, hi, al};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = clip;
      break;
    }

    case Ell::flat_lcl: {
      const double lam = p.lambda, b = p.b;
      f.value_ = [lam, b](double r) {
        return (1.0 / lam) * (1.0 - 1.0 / (1.0 + b * log_cosh(std::log(r))));
      };
      f.deriv_ = [lam, b](double r, Side) {
        const double base = log_cosh(std::log(r));
        const double based = std::tanh(std::log(r)) / r;
        return (b / lam) * based / sqr(1.0 + b * base);
      };
      break;
    }

    case Ell::hampel_lare_3: {
      const double al = p.alpha, be = p.beta, ga = p.gamma;
      const double A = al - 1.0 / al, B = be - 1.0 / be, G = ga - 1.0 / ga;
      const double K = (al * al - 1.0) * be * ga / (al * (be * ga + 1.0) * (be - ga));
      const double tail = K * (B * B - G * G) - A * A;
      f.value_ = [=](double r) {
        const double s = ssym(r);
        if (r <= 1.0 / ga || r >= ga) return tail;
        if (r <= 1.0 / be) return K * (sqr(-s - G) + B * B - G * G) - A * A;
        if (r <= 1.0 / al) return -2.0 * A * s - A * A;
        if (r < al) return s * s;
        if (r < be) return 2.0 * A * s - A * A;
        return K * (sqr(s - G) + B * B - G * G) - A * A;
      };
      f.deriv_ = [=](double r, Side) {
        const double s = ssym(r), sp = ssym_d(r);
        if (r <= 1.0 / ga || r >= ga) return 0.0;
        if (r <= 1.0 / be) return -2.0 * K * (-s - G) * sp;
        if (r <= 1.0 / al) return -2.0 * A * sp;
        if (r < al) return 2.0 * s * sp;
        if (r < be) return 2.0 * A * sp;
        return 2.0 * K * (s - G) * sp;
      };
      f.breakpoints_ = {1.0 / ga, 1.0 / be, 1.0 / al, al, be, ga};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = tail;
      break;
    }

    case Ell::hampel_lare_2: {
      const double al = p.alpha, be = p.beta;
      const double A = al - 1.0 / al, B = be - 1.0 / be;
      const double C2 = (al * al - 1.0) / ((al - be) * (al * be + 1.0));
      const double tail = C2 * (be * be - 1.0) * (A - B);
      f.value_ = [=](double r) {
        const double s = ssym(r);
        if (r <= 1.0 / be || r >= be) return tail;
        if (r <= 1.0 / al)
          return C2 * (be * s * s + 2.0 * (be * be - 1.0) * s + (be * be - 1.0) * (al * al - 1.0) / al);
        if (r < al) return s * s;
        return C2 * (be * s * s - 2.0 * (be * be - 1.0) * s + (be * be - 1.0) * (al * al - 1.0) / al);
      };
      f.deriv_ = [=](double r, Side) {
        const double s = ssym(r), sp = ssym_d(r);
        if (r <= 1.0 / be || r >= be) return 0.0;
        if (r <= 1.0 / al) return C2 * (2.0 * be * s + 2.0 * (be * be - 1.0)) * sp;
        if (r < al) return 2.0 * s * sp;
        return C2 * (2.0 * be * s - 2.0 * (be * be - 1.0)) * sp;
      };
      f.breakpoints_ = {1.0 / be, 1.0 / al, al, be};
      f.continuable_at_zero_ = true;
      f.zero_limit_ = tail;
      break;
    }

    case Ell::weighted_max: {
      const double tau = p.tau;
      f.value_ = [tau](double r) {
        return r >= 1.0 ? tau * (r - 1.0) : (1.0 / tau) * (1.0 / r - 1.0);
      };
      f.deriv_ = [tau](double r, Side side) {
        if (r > 1.0) return tau;
        if (r < 1.0) return -1.0 / (tau * r * r);
        return side == Side::left ? -1.0 / tau : tau;
      };
      f.breakpoints_ = {1.0};
      break;
    }

    case Ell::weighted_lpre: {
      const double tau = p.tau;
      f.value_ = [tau](double r) {
        return (r >= 1.0 ? tau : 1.0 / tau) * (r + 1.0 / r - 2.0);
      };
      f.deriv_ = [tau](double r, Side side) {
        const double w = (r > 1.0 || (r == 1.0 && side == Side::right)) ? tau : 1.0 / tau;
        return w * (1.0 - 1.0 / (r * r));
      };
      f.breakpoints_ = {1.0};
      break;
    }

    case Ell::weighted_smooth_lare: {
      const double tau = p.tau;
      f.value_ = [tau](double r) { return (r >= 1.0 ? tau : 1.0 / tau) * sqr(ssym(r)); };
      f.deriv_ = [tau](double r, Side side) {
        const double w = (r > 1.0 || (r == 1.0 && side == Side::right)) ? tau : 1.0 / tau;
        return w * 2.0 * ssym(r) * ssym_d(r);
      };
      f.breakpoints_ = {1.0};
      break;
    }
  }
  return f;
}

inline double eval_ell(Ell id, const EllParams& p, double r) { return make_catalog(id, p).value(r); }

inline double eval_ell_deriv(Ell id, const EllParams& p, double r, Side side = Side::right) {
  return make_catalog(id, p).deriv(r, side);
}

struct CatalogRow {
  Ell id;
  std::string name;
  std::vector<std::string> param_names;
  Declared declared;
};

inline std::vector<CatalogRow> list_catalog() {
  std::vector<CatalogRow> rows;
  for (Ell id : all_ells())
    rows.push_back({id, ell_name(id), ell_param_names(id), detail::declared_table2(id)});
  return rows;
}

}  // namespace rbloss
