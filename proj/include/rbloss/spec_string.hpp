#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "rbloss/loss.hpp"

namespace rbloss {

// Loss spec strings look like
//   <ell>[:k=v,...]/<link>[:a=..,b=..]/c=<val>[/inverse]
// e.g. "huber-rel:alpha=3/logistic:a=0,b=1/c=0.5" or "squared-log/exp/c=0".

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline double parse_number(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf") return inf;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail(errc::parse, "trailing characters in " + what + ": '" + s + "'");
    return v;
  } catch (const error&) {
    throw;
  } catch (const std::exception&) {
    fail(errc::parse, "bad number in " + what + ": '" + s + "'");
  }
}

inline void parse_kv(const std::string& s, std::string& key, double& val, const std::string& ctx) {
  std::size_t eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(errc::parse, ctx + ": expected key=value, got '" + s + "'");
  key = s.substr(0, eq);
  val = parse_number(s.substr(eq + 1), ctx + " parameter " + key);
}

inline std::string format_number(double v) {
  if (v == inf) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string out(buf);
  // Prefer the short spelling when it round-trips.
  char shortbuf[40];
  std::snprintf(shortbuf, sizeof(shortbuf), "%g", v);
  if (parse_number(shortbuf, "x") == v) out = shortbuf;
  return out;
}

}  // namespace detail

inline RatioLoss parse_loss_spec(const std::string& spec) {
  auto parts = detail::split(spec, '/');
  if (parts.size() < 3 || parts.size() > 4)
    fail(errc::parse, "loss spec needs <ell>/<link>/c=<val>[/inverse]: '" + spec + "'");

  auto ell_parts = detail::split(parts[0], ':');
  if (ell_parts.size() > 2) fail(errc::parse, "bad representing-function segment: '" + parts[0] + "'");
  auto id = ell_from_name(ell_parts[0]);
  if (!id) fail(errc::parse, "unknown representing function: '" + ell_parts[0] + "'");
  EllParams p;
  if (ell_parts.size() == 2 && !ell_parts[1].empty()) {
    for (const std::string& kv : detail::split(ell_parts[1], ',')) {
      std::string key;
      double val = 0.0;
      detail::parse_kv(kv, key, val, ell_parts[0]);
      if (key == "alpha") p.alpha = val;
      else if (key == "beta") p.beta = val;
      else if (key == "gamma") p.gamma = val;
      else if (key == "tau") p.tau = val;
      else if (key == "epsilon") p.epsilon = val;
      else if (key == "lambda") p.lambda = val;
      else if (key == "b") p.b = val;
      else fail(errc::parse, ell_parts[0] + ": unknown parameter '" + key + "'");
    }
  }

  auto link_parts = detail::split(parts[1], ':');
  if (link_parts.size() > 2) fail(errc::parse, "bad link segment: '" + parts[1] + "'");
  auto kind = link_from_name(link_parts[0]);
  if (!kind) fail(errc::parse, "unknown link: '" + link_parts[0] + "'");
  double a = 0.0, b = qnan;
  if (link_parts.size() == 2 && !link_parts[1].empty()) {
    for (const std::string& kv : detail::split(link_parts[1], ',')) {
      std::string key;
      double val = 0.0;
      detail::parse_kv(kv, key, val, link_parts[0]);
      if (key == "a") a = val;
      else if (key == "b") b = val;
      else fail(errc::parse, link_parts[0] + ": unknown parameter '" + key + "'");
    }
  }

  if (parts[2].rfind("c=", 0) != 0) fail(errc::parse, "third segment must be c=<val>: '" + parts[2] + "'");
  const double c = detail::parse_number(parts[2].substr(2), "offset c");

  Direction dir = Direction::standard;
  if (parts.size() == 4) {
    if (parts[3] == "inverse") dir = Direction::inverse;
    else if (parts[3] == "standard") dir = Direction::standard;
    else fail(errc::parse, "fourth segment must be 'inverse': '" + parts[3] + "'");
  }

  return make_loss(make_catalog(*id, p), make_link(*kind, a, b), c, dir);
}

inline std::string format_loss_spec(const RatioLoss& loss) {
  std::string out;
  if (loss.ell.id()) {
    out = ell_name(*loss.ell.id());
    const EllParams& p = loss.ell.params();
    std::string params;
    for (const std::string& k : ell_param_names(*loss.ell.id())) {
      double v = qnan;
      if (k == "alpha") v = p.alpha;
      else if (k == "beta") v = p.beta;
      else if (k == "gamma") v = p.gamma;
      else if (k == "tau") v = p.tau;
      else if (k == "epsilon") v = p.epsilon;
      else if (k == "lambda") v = p.lambda;
      else if (k == "b") v = p.b;
      params += (params.empty() ? "" : ",") + k + "=" + detail::format_number(v);
    }
    if (!params.empty()) out += ":" + params;
  } else {
    out = loss.ell.name();
  }
  out += "/" + link_name(loss.link.kind);
  std::string lp;
  if (loss.link.a != 0.0) lp += "a=" + detail::format_number(loss.link.a);
  if (link_is_bounded(loss.link.kind) && loss.link.b != 1.0)
    lp += (lp.empty() ? "" : ",") + std::string("b=") + detail::format_number(loss.link.b);
  if (!lp.empty()) out += ":" + lp;
  out += "/c=" + detail::format_number(loss.c);
  if (loss.dir == Direction::inverse) out += "/inverse";
  return out;
}

}  // namespace rbloss
