#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rbloss/catalog.hpp"
#include "rbloss/common.hpp"
#include "rbloss/link.hpp"

namespace rbloss {

enum class Direction { standard, inverse };

// L(y,t) = ell((u(t)+c)/(y+c)), or with the ratio flipped for the inverse
// direction. c = 0 gives the strict form and needs y bounded away from 0.
struct RatioLoss {
  RepresentingFunction ell;
  Link link;
  double c = 0.0;
  Direction dir = Direction::standard;
};

inline RatioLoss make_loss(RepresentingFunction ell, Link link, double c,
                           Direction dir = Direction::standard) {
  if (!(c >= 0.0) || !std::isfinite(c)) fail(errc::invalid_parameter, "loss offset c must be finite and >= 0");
  validate_link(link);
  return RatioLoss{std::move(ell), link, c, dir};
}

namespace detail {

inline void check_y(const RatioLoss& loss, double y) {
  if (!std::isfinite(y) || !(y > loss.link.a) || !(y < loss.link.b))
    fail(errc::domain, "target y must lie in the link range (a,b)");
}

inline double ratio(const RatioLoss& loss, double y, double u) {
  const double num = u + loss.c, den = y + loss.c;
  return loss.dir == Direction::standard ? num / den : den / num;
}

}  // namespace detail

inline double eval_loss(const RatioLoss& loss, double y, double t) {
  detail::check_y(loss, y);
  const double u = eval_link(loss.link, t);
  return loss.ell.value(detail::ratio(loss, y, u));
}

// One-sided derivative in t. The side is stated in t; it is mapped through
// the sign of dq/dt before the representing function is consulted.
inline double eval_loss_dt(const RatioLoss& loss, double y, double t, Side side = Side::right) {
  detail::check_y(loss, y);
  const double u = eval_link(loss.link, t);
  const double du = eval_link_deriv(loss.link, t);
  double q, dqdt;
  if (loss.dir == Direction::standard) {
    q = (u + loss.c) / (y + loss.c);
    dqdt = du / (y + loss.c);
  } else {
    q = (y + loss.c) / (u + loss.c);
    dqdt = -(y + loss.c) * du / sqr(u + loss.c);
  }
  if (dqdt == 0.0) return 0.0;
  const Side side_q = dqdt > 0.0 ? side : opposite(side);
  return loss.ell.deriv(q, side_q) * dqdt;
}

// Scores t at which the ratio crosses a breakpoint of ell for this y.
inline std::vector<double> kink_scores(const RatioLoss& loss, double y) {
  detail::check_y(loss, y);
  std::vector<double> ts;
  for (double rho : loss.ell.breakpoints()) {
    const double u = loss.dir == Direction::standard ? (y + loss.c) * rho - loss.c
                                                     : (y + loss.c) / rho - loss.c;
    if (u > loss.link.a && u < loss.link.b) ts.push_back(link_inverse(loss.link, u));
  }
  return ts;
}

// Additive view over log-transformed targets: with yt = -log(y+c) and
// tt = -log(u(t)+c), the loss equals psi(yt - tt) where psi = ell o exp.
struct DistanceForm {
  std::function<double(double)> psi;
  std::function<double(double)> transform_y;
  std::function<double(double)> transform_t;
};

inline DistanceForm to_distance_form(const RatioLoss& loss) {
  DistanceForm out;
  RepresentingFunction ell = loss.ell;
  out.psi = [ell](double d) { return ell.value(std::exp(d)); };
  const double c = loss.c;
  out.transform_y = [c](double y) { return -std::log(y + c); };
  Link link = loss.link;
  out.transform_t = [link, c](double t) { return -std::log(eval_link(link, t) + c); };
  return out;
}

// Inverse of the view above: a distance loss psi with psi(0) = 0 induces the
// representing function psi o log.
inline RepresentingFunction from_distance_form(
    const std::function<double(double)>& psi, const std::string& name = "from-distance",
    const std::function<double(double)>& psi_deriv = nullptr) {
  const double at0 = psi(0.0);
  if (!std::isfinite(at0) || std::abs(at0) > 1e-12)
    fail(errc::contract, "distance loss must vanish at 0");
  RepresentingFunction::DerivFn d;
  if (psi_deriv) d = [psi_deriv](double r, Side) { return psi_deriv(std::log(r)) / r; };
  else d = [psi](double r, Side) {
    const double h = 1e-6;
    const double lr = std::log(r);
    return (psi(lr + h) - psi(lr - h)) / (2.0 * h) / r;
  };
  return RepresentingFunction::custom(name, [psi](double r) { return psi(std::log(r)); },
                                      std::move(d));
}

}  // namespace rbloss
