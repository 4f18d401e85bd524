#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbloss/catalog.hpp"
#include "rbloss/common.hpp"

namespace rbloss {

namespace detail {

// 15-point Gauss-Kronrod rule (QUADPACK dqk15 constants), adaptively bisected.
struct Gk15Result {
  double value;
  double err;
};

inline Gk15Result gk15(const std::function<double(double)>& f, double lo, double hi) {
  static const double xgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                0.741531185599394, 0.586087235467691, 0.405845151377397,
                                0.207784955007898, 0.0};
  static const double wgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                0.140653259715525, 0.169004726639267, 0.190350578064785,
                                0.204432940075298, 0.209482141084728};
  static const double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                               0.417959183673469};
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double f0 = f(mid);
  double kron = wgk[7] * f0, gauss = wg[3] * f0;
  for (int i = 0; i < 7; ++i) {
    const double fa = f(mid - half * xgk[i]);
    const double fb = f(mid + half * xgk[i]);
    kron += wgk[i] * (fa + fb);
    if (i % 2 == 1) gauss += wg[i / 2] * (fa + fb);
  }
  kron *= half;
  gauss *= half;
  return {kron, std::abs(kron - gauss)};
}

inline double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                 double abs_tol, int depth = 0) {
  auto r = gk15(f, lo, hi);
  if (!std::isfinite(r.value)) fail(errc::divergent_integral, "integrand is not finite");
  if (r.err <= abs_tol || depth >= 50) {
    if (r.err > std::max(abs_tol, 1e-6 * std::abs(r.value)) && depth >= 50)
      fail(errc::divergent_integral, "integral did not converge");
    return r.value;
  }
  const double mid = 0.5 * (lo + hi);
  return integrate_adaptive(f, lo, mid, abs_tol / 2.0, depth + 1) +
         integrate_adaptive(f, mid, hi, abs_tol / 2.0, depth + 1);
}

}  // namespace detail

// Smooth base function with two derivatives, the raw material the
// symmetrization and certificate machinery works on.
struct AuxFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::function<double(double)> deriv2;
  std::string name = "aux";
};

inline AuxFunction aux_pow(double alpha) {
  if (!std::isfinite(alpha)) fail(errc::invalid_parameter, "pow: alpha must be finite");
  AuxFunction a;
  a.value = [alpha](double r) { return std::pow(r, alpha); };
  a.deriv = [alpha](double r) { return alpha * std::pow(r, alpha - 1.0); };
  a.deriv2 = [alpha](double r) { return alpha * (alpha - 1.0) * std::pow(r, alpha - 2.0); };
  char buf[40];
  std::snprintf(buf, sizeof(buf), "pow(%g)", alpha);
  a.name = buf;
  return a;
}

inline AuxFunction aux_log1p() {
  AuxFunction a;
  a.value = [](double r) { return std::log1p(r); };
  a.deriv = [](double r) { return 1.0 / (1.0 + r); };
  a.deriv2 = [](double r) { return -1.0 / sqr(1.0 + r); };
  a.name = "log1p";
  return a;
}

inline AuxFunction aux_sqrtlog() {
  AuxFunction a;
  a.value = [](double r) { return std::log(std::sqrt(r) + std::sqrt(1.0 + r)); };
  a.deriv = [](double r) { return 1.0 / (2.0 * std::sqrt(r * (1.0 + r))); };
  a.deriv2 = [](double r) {
    return -(1.0 + 2.0 * r) / (4.0 * std::pow(r * (1.0 + r), 1.5));
  };
  a.name = "sqrtlog";
  return a;
}

// Certificate for convexity of the symmetrized function: the symmetrization
// of aux is convex in r on (0,inf) iff aux'(r) + r aux''(r) >= 0 everywhere.
inline std::function<double(double)> convexity_certificate(const AuxFunction& aux) {
  auto d = aux.deriv;
  auto d2 = aux.deriv2;
  return [d, d2](double r) { return d(r) + r * d2(r); };
}

// ell(r) = aux(r) + aux(1/r) - 2 aux(1): ratio symmetric and zero at 1.
inline RepresentingFunction symmetrize(const AuxFunction& aux) {
  auto v = aux.value;
  auto d = aux.deriv;
  const double at1 = aux.value(1.0);
  return RepresentingFunction::custom(
      "sym(" + aux.name + ")",
      [v, at1](double r) { return v(r) + v(1.0 / r) - 2.0 * at1; },
      [d](double r, Side) { return d(r) - d(1.0 / r) / (r * r); });
}

// Increasing generator g determines aux(r) = C + integral_{r0}^{r} g(t)/t dt.
// The symmetrized result is then convex with certificate g'(r), and when
// |g| <= M the loss built over the exp link with c = 0 is 2M-Lipschitz in t.
struct Generator {
  std::function<double(double)> g;
  std::function<double(double)> g_deriv;
  double r0 = 1.0;
  double C = 0.0;
  std::optional<double> M;
  std::string name = "generated";
};

struct BuiltFunction {
  std::function<double(double)> aux;
  std::function<double(double)> aux_deriv;
  RepresentingFunction sym;
  std::function<double(double)> certificate;
  std::optional<double> lipschitz_bound;
};

inline BuiltFunction build_from_generator(const Generator& gen) {
  if (!gen.g) fail(errc::invalid_parameter, "generator has no g");
  if (!(gen.r0 > 0.0) || !std::isfinite(gen.r0))
    fail(errc::invalid_parameter, "generator base point r0 must be finite and > 0");

  // The increasing hypothesis is what makes the certificate nonnegative;
  // refuse generators that visibly break it.
  {
    double prev = gen.g(1e-3);
    for (int i = 1; i <= 2000; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 2000.0);
      const double cur = gen.g(r);
      if (!std::isfinite(cur)) fail(errc::hypothesis_violation, gen.name + ": generator not finite on grid");
      if (cur < prev - 1e-12 * (1.0 + std::abs(prev)))
        fail(errc::hypothesis_violation, gen.name + ": generator must be nondecreasing");
      prev = cur;
    }
  }

  auto g = gen.g;
  const double s0 = std::log(gen.r0), C = gen.C;
  auto aux = [g, s0, C](double r) {
    const double s1 = std::log(r);
    if (s1 == s0) return C;
    // Substituting t = e^s turns the weight 1/t into ds, keeping the
    // integrand bounded by sup |g|.
    auto integrand = [&g](double s) { return g(std::exp(s)); };
    return C + detail::integrate_adaptive(integrand, s0, s1, 1e-10);
  };
  auto aux_deriv = [g](double r) { return g(r) / r; };

  BuiltFunction out;
  out.aux = aux;
  out.aux_deriv = aux_deriv;
  out.sym = RepresentingFunction::custom(
      "sym(" + gen.name + ")",
      [aux](double r) { return aux(r) + aux(1.0 / r) - 2.0 * aux(1.0); },
      [aux_deriv](double r, Side) { return aux_deriv(r) - aux_deriv(1.0 / r) / (r * r); });
  if (gen.g_deriv) {
    auto gd = gen.g_deriv;
    out.certificate = [gd](double r) { return gd(r); };
  } else {
    out.certificate = [g](double r) {
      const double h = 1e-6 * r;
      return (g(r + h) - g(r - h)) / (2.0 * h);
    };
  }
  if (gen.M) out.lipschitz_bound = 2.0 * *gen.M;
  return out;
}

// Two ready-made bounded increasing generators.
inline Generator generator_ratio_over_one_plus() {
  Generator gen;
  gen.g = [](double t) { return t / (1.0 + t); };
  gen.g_deriv = [](double t) { return 1.0 / sqr(1.0 + t); };
  gen.M = 1.0;
  gen.name = "g1";
  return gen;
}

inline Generator generator_sqrt_ratio() {
  Generator gen;
  gen.g = [](double t) { return std::sqrt(t) / (2.0 * std::sqrt(1.0 + t)); };
  gen.g_deriv = [](double t) { return 1.0 / (4.0 * std::sqrt(t) * std::pow(1.0 + t, 1.5)); };
  gen.M = 0.5;
  gen.name = "g2";
  return gen;
}

// Bounded remap of a nonnegative base: values land in [0, 1/lambda) and the
// global slope shrinks wherever the base is already large.
inline RepresentingFunction flatten(const RepresentingFunction& base, double lambda, double b) {
  if (!(lambda > 0.0) || !(b > 0.0) || !std::isfinite(lambda) || !std::isfinite(b))
    fail(errc::invalid_parameter, "flatten: requires lambda > 0 and b > 0");
  RepresentingFunction f = base;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "flat(%s,lambda=%g,b=%g)", base.name().c_str(), lambda, b);
  return RepresentingFunction::custom(
      buf,
      [f, lambda, b](double r) { return (1.0 / lambda) * (1.0 - 1.0 / (1.0 + b * f.value(r))); },
      [f, lambda, b](double r, Side side) {
        return (b / lambda) * f.deriv(r, side) / sqr(1.0 + b * f.value(r));
      },
      base.breakpoints());
}

}  // namespace rbloss
