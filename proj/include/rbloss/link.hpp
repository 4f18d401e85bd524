#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rbloss/common.hpp"

namespace rbloss {

// Links u: R -> (a,b) used to turn an unconstrained score t into a positive
// prediction. The exp family needs b = inf; the bounded family needs b < inf.
enum class LinkKind {
  exp_shift,
  neg_exp_shift,
  logistic,
  arctan,
  gumbel,
};

inline std::string link_name(LinkKind k) {
  switch (k) {
    case LinkKind::exp_shift: return "exp";
    case LinkKind::neg_exp_shift: return "neg-exp";
    case LinkKind::logistic: return "logistic";
    case LinkKind::arctan: return "arctan";
    case LinkKind::gumbel: return "gumbel";
  }
  fail(errc::invalid_parameter, "unknown link kind");
}

inline std::optional<LinkKind> link_from_name(const std::string& name) {
  for (LinkKind k : {LinkKind::exp_shift, LinkKind::neg_exp_shift, LinkKind::logistic,
                     LinkKind::arctan, LinkKind::gumbel})
    if (link_name(k) == name) return k;
  return std::nullopt;
}

inline bool link_is_bounded(LinkKind k) {
  return k == LinkKind::logistic || k == LinkKind::arctan || k == LinkKind::gumbel;
}

struct Link {
  LinkKind kind = LinkKind::exp_shift;
  double a = 0.0;
  double b = inf;
};

inline void validate_link(const Link& link) {
  if (!(link.a >= 0.0) || !std::isfinite(link.a))
    fail(errc::invalid_parameter, link_name(link.kind) + ": requires finite a >= 0");
  if (link_is_bounded(link.kind)) {
    if (!std::isfinite(link.b) || !(link.b > link.a))
      fail(errc::invalid_parameter, link_name(link.kind) + ": requires finite b > a");
  } else {
    if (std::isfinite(link.b))
      fail(errc::invalid_parameter, link_name(link.kind) + ": requires b = inf");
  }
}

inline Link make_link(LinkKind kind, double a = 0.0, double b = qnan) {
  Link link;
  link.kind = kind;
  link.a = a;
  link.b = std::isnan(b) ? (link_is_bounded(kind) ? 1.0 : inf) : b;
  validate_link(link);
  return link;
}

namespace detail {

inline double link_raw(const Link& l, double t) {
  const double w = l.b - l.a;
  switch (l.kind) {
    case LinkKind::exp_shift: return std::exp(t) + l.a;
    case LinkKind::neg_exp_shift: return std::exp(-t) + l.a;
    case LinkKind::logistic: return w / (1.0 + std::exp(-t)) + l.a;
    case LinkKind::arctan: return w * (0.5 + std::atan(t) / std::numbers::pi) + l.a;
    case LinkKind::gumbel: return w * std::exp(-std::exp(-t)) + l.a;
  }
  fail(errc::invalid_parameter, "unknown link kind");
}

}  // namespace detail

// Evaluation clamps into [a+eta, b-eta] so that downstream ratios stay in
// (0,inf) even when t sits deep in a saturated tail.
inline double eval_link(const Link& link, double t) {
  if (!std::isfinite(t)) fail(errc::domain, "link argument must be finite");
  double v = detail::link_raw(link, t);
  if (std::isfinite(link.b)) {
    const double eta = 1e-15 * (link.b - link.a);
    if (v < link.a + eta) v = link.a + eta;
    if (v > link.b - eta) v = link.b - eta;
  } else {
    const double eta = 1e-300;
    if (v < link.a + eta) v = link.a + eta;
  }
  return v;
}

inline double eval_link_deriv(const Link& link, double t) {
  if (!std::isfinite(t)) fail(errc::domain, "link argument must be finite");
  const double w = link.b - link.a;
  switch (link.kind) {
    case LinkKind::exp_shift: return std::exp(t);
    case LinkKind::neg_exp_shift: return -std::exp(-t);
    case LinkKind::logistic: {
      const double e = std::exp(-std::abs(t));
      return w * e / sqr(1.0 + e);
    }
    case LinkKind::arctan: return w / (std::numbers::pi * (1.0 + t * t));
    case LinkKind::gumbel: {
      const double e = std::exp(-t);
      return w * e * std::exp(-e);
    }
  }
  fail(errc::invalid_parameter, "unknown link kind");
}

inline double link_inverse(const Link& link, double u) {
  if (!(u > link.a) || !(u < link.b))
    fail(errc::domain, link_name(link.kind) + ": inverse argument must lie in (a,b)");
  const double w = link.b - link.a;
  switch (link.kind) {
    case LinkKind::exp_shift: return std::log(u - link.a);
    case LinkKind::neg_exp_shift: return -std::log(u - link.a);
    case LinkKind::logistic: return std::log((u - link.a) / (link.b - u));
    case LinkKind::arctan: return std::tan(std::numbers::pi * ((u - link.a) / w - 0.5));
    case LinkKind::gumbel: return -std::log(-std::log((u - link.a) / w));
  }
  fail(errc::invalid_parameter, "unknown link kind");
}

inline std::vector<LinkKind> all_links() {
  return {LinkKind::exp_shift, LinkKind::neg_exp_shift, LinkKind::logistic, LinkKind::arctan,
          LinkKind::gumbel};
}

}  // namespace rbloss
