#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbloss/builder.hpp"
#include "rbloss/catalog.hpp"
#include "rbloss/io.hpp"
#include "rbloss/link.hpp"
#include "rbloss/loss.hpp"
#include "rbloss/risk.hpp"
#include "rbloss/spec_string.hpp"
#include "rbloss/verify.hpp"

namespace {

using nlohmann::json;

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit OutStream(const std::string& path) {
    if (path != "-") {
      file.open(path);
      if (!file) rbloss::fail(rbloss::errc::io, "cannot open " + path + " for writing");
      os = &file;
    }
  }
  std::ostream& get() { return *os; }
};

rbloss::Link parse_link_spec(const std::string& spec) {
  // Reuse the full loss-spec parser on a placeholder representing function.
  return rbloss::parse_loss_spec("abs-rel/" + spec + "/c=0").link;
}

rbloss::RepresentingFunction parse_ell_spec(const std::string& spec) {
  return rbloss::parse_loss_spec(spec + "/exp/c=0").ell;
}

std::pair<std::string, rbloss::EllParams> parse_named_params(const std::string& spec) {
  const auto colon = spec.find(':');
  std::string name = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  rbloss::EllParams p;
  if (colon != std::string::npos) {
    for (const auto& kv : rbloss::detail::split(spec.substr(colon + 1), ',')) {
      std::string k;
      double v = rbloss::qnan;
      rbloss::detail::parse_kv(kv, k, v, spec);
      if (k == "alpha") p.alpha = v;
      else if (k == "lambda") p.lambda = v;
      else if (k == "b") p.b = v;
      else rbloss::fail(rbloss::errc::parse, "unknown parameter " + k);
    }
  }
  return {name, p};
}

int run_list() {
  std::printf("%2s  %-20s %-28s %s\n", "id", "name", "parameters", "declared");
  std::printf("%2s  %-20s %-28s %s\n", "", "", "", "rs cx ct ll gl df");
  for (const rbloss::CatalogRow& row : rbloss::list_catalog()) {
    std::string params;
    const rbloss::EllParams defs = rbloss::default_params(row.id);
    for (const std::string& k : row.param_names) {
      if (!params.empty()) params += ",";
      double v = rbloss::qnan;
      if (k == "alpha") v = defs.alpha;
      else if (k == "beta") v = defs.beta;
      else if (k == "gamma") v = defs.gamma;
      else if (k == "tau") v = defs.tau;
      else if (k == "epsilon") v = defs.epsilon;
      else if (k == "lambda") v = defs.lambda;
      else if (k == "b") v = defs.b;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%s=%g", k.c_str(), v);
      params += buf;
    }
    auto mark = [](bool b) { return b ? '+' : '-'; };
    const rbloss::Declared& dc = row.declared;
    std::printf("%2d  %-20s %-28s %c  %c  %c  %c  %c  %c\n", static_cast<int>(row.id),
                row.name.c_str(), params.c_str(), mark(dc.ratio_symmetric), mark(dc.convex),
                mark(dc.continuous), mark(dc.locally_lipschitz), mark(dc.globally_lipschitz),
                mark(dc.differentiable));
  }
  return 0;
}

int run_curve(const std::string& loss_spec, double y, double tmin, double tmax, int n,
              const std::string& out) {
  const rbloss::RatioLoss loss = rbloss::parse_loss_spec(loss_spec);
  if (n < 2) rbloss::fail(rbloss::errc::invalid_parameter, "curve needs at least 2 points");
  OutStream os(out);
  os.get() << "t,u,ratio,loss,dloss_dt\n";
  for (int i = 0; i < n; ++i) {
    const double t = tmin + (tmax - tmin) * i / (n - 1);
    const double u = rbloss::eval_link(loss.link, t);
    const double q = loss.dir == rbloss::Direction::standard
                         ? (u + loss.c) / (y + loss.c)
                         : (y + loss.c) / (u + loss.c);
    os.get() << rbloss::format_g17(t) << "," << rbloss::format_g17(u) << ","
             << rbloss::format_g17(q) << "," << rbloss::format_g17(rbloss::eval_loss(loss, y, t))
             << "," << rbloss::format_g17(rbloss::eval_loss_dt(loss, y, t)) << "\n";
  }
  return 0;
}

int run_verify(bool table2, bool table3, bool lemmas, const std::string& loss_spec,
               const std::string& ell_spec, const std::string& property, bool as_json,
               const std::string& out) {
  const bool specific = !loss_spec.empty() || !ell_spec.empty();
  if (!table2 && !table3 && !lemmas && !specific) table2 = table3 = lemmas = true;

  std::vector<rbloss::PropertyReport> reports;
  if (table2) {
    auto r = rbloss::verify_table2();
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (table3) {
    auto r = rbloss::verify_table3();
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (!loss_spec.empty()) {
    const rbloss::RatioLoss loss = rbloss::parse_loss_spec(loss_spec);
    if (!property.empty()) {
      const auto p = rbloss::property_from_name(property);
      if (!p) rbloss::fail(rbloss::errc::parse, "unknown property " + property);
      reports.push_back(rbloss::check_property(loss, *p));
    } else {
      for (rbloss::Property p :
           {rbloss::Property::convexity, rbloss::Property::continuity,
            rbloss::Property::local_lipschitz, rbloss::Property::global_lipschitz,
            rbloss::Property::differentiability})
        reports.push_back(rbloss::check_property(loss, p));
    }
  }
  if (!ell_spec.empty()) {
    const rbloss::RepresentingFunction ell = parse_ell_spec(ell_spec);
    if (!property.empty()) {
      const auto p = rbloss::property_from_name(property);
      if (!p) rbloss::fail(rbloss::errc::parse, "unknown property " + property);
      reports.push_back(rbloss::check_property(ell, *p));
    } else {
      for (rbloss::Property p :
           {rbloss::Property::ratio_symmetry, rbloss::Property::convexity,
            rbloss::Property::continuity, rbloss::Property::local_lipschitz,
            rbloss::Property::global_lipschitz, rbloss::Property::differentiability})
        reports.push_back(rbloss::check_property(ell, p));
    }
  }

  std::vector<rbloss::LemmaCheck> lemma_results;
  if (lemmas) lemma_results = rbloss::check_lipschitz_bound_lemmas();

  OutStream os(out);
  if (as_json) {
    json j = rbloss::reports_to_json(reports);
    if (lemmas) {
      j["lemmas"] = json::array();
      for (const auto& l : lemma_results)
        j["lemmas"].push_back({{"subject", l.subject},
                               {"lemma", l.lemma},
                               {"bound", l.bound},
                               {"observed_sup", l.observed_sup},
                               {"holds", l.holds}});
    }
    os.get() << j.dump(2) << "\n";
  } else {
    rbloss::write_reports_csv(os.get(), reports);
    for (const auto& l : lemma_results)
      os.get() << l.subject << ",lemma:" << l.lemma << ",bound=" << rbloss::format_g17(l.bound)
               << ",observed=" << rbloss::format_g17(l.observed_sup) << ","
               << (l.holds ? "holds" : "fails") << "\n";
  }

  const rbloss::VerifySummary s = rbloss::summarize(reports);
  int bad_lemmas = 0;
  for (const auto& l : lemma_results)
    if (!l.holds) ++bad_lemmas;
  std::cerr << "cells=" << s.cells << " matches=" << s.matches
            << " explained=" << s.explained_mismatches
            << " unexplained=" << s.unexplained_mismatches;
  if (lemmas) std::cerr << " lemma-failures=" << bad_lemmas;
  std::cerr << "\n";
  return (s.unexplained_mismatches > 0 || bad_lemmas > 0) ? 1 : 0;
}

int run_gen(int n, int d, std::uint64_t seed, double noise, double b0, double x_scale,
            const std::string& link_spec, const std::vector<double>& w, const std::string& out) {
  rbloss::GenConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.seed = seed;
  cfg.noise = noise;
  cfg.b0 = b0;
  cfg.x_scale = x_scale;
  cfg.link = parse_link_spec(link_spec);
  cfg.w = w;
  const rbloss::Dataset data = rbloss::generate_multiplicative(cfg);
  OutStream os(out);
  rbloss::write_dataset_csv(os.get(), data);
  return 0;
}

int run_fit(const std::string& loss_spec, const std::string& data_path, double lambda,
            int max_iter, double tol, const std::string& out) {
  const rbloss::RatioLoss loss = rbloss::parse_loss_spec(loss_spec);
  const rbloss::Dataset data = rbloss::read_dataset_csv_file(data_path);
  rbloss::FitOptions opt;
  opt.lambda = lambda;
  opt.max_iter = max_iter;
  opt.grad_tol = tol;
  const rbloss::FitResult res = rbloss::fit(loss, data, opt);

  json j = rbloss::model_to_json(res.model, rbloss::format_loss_spec(loss));
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["final_risk"] = res.final_risk;
  j["grad_inf_norm"] = res.grad_inf_norm;
  j["stop_reason"] = res.stop_reason;
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int run_risk(const std::string& loss_spec, const std::string& data_path,
             const std::string& model_path, double lambda, bool zero_bound,
             const std::string& out) {
  const rbloss::RatioLoss loss = rbloss::parse_loss_spec(loss_spec);
  const rbloss::Dataset data = rbloss::read_dataset_csv_file(data_path);
  rbloss::LinearModel model;
  model.w.assign(data.d, 0.0);
  if (!model_path.empty()) model = rbloss::model_from_json(rbloss::load_json_file(model_path));

  json j;
  j["spec_version"] = "1";
  j["loss"] = rbloss::format_loss_spec(loss);
  j["n"] = data.n;
  j["risk"] = rbloss::empirical_risk(loss, data, model);
  if (lambda > 0.0) j["regularized_risk"] = rbloss::regularized_risk(loss, data, model, lambda);
  if (zero_bound) {
    const rbloss::ZeroRiskBound zb = rbloss::risk_at_zero_bound(loss, data);
    j["zero_risk"] = zb.risk;
    j["zero_risk_bound"] = zb.bound;
    j["ratio_cap"] = zb.m;
  }
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int run_metric(const std::string& loss_spec, const std::string& data_path,
               const std::string& model_path, const std::vector<std::string>& names,
               const std::string& out) {
  const rbloss::RatioLoss loss = rbloss::parse_loss_spec(loss_spec);
  const rbloss::Dataset data = rbloss::read_dataset_csv_file(data_path);
  const rbloss::LinearModel model = rbloss::model_from_json(rbloss::load_json_file(model_path));
  const std::vector<double> pred = rbloss::predict(loss, model, data);

  std::vector<rbloss::Metric> metrics;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) {
    metrics = {rbloss::Metric::abs_rel, rbloss::Metric::lrmse, rbloss::Metric::mean_log10,
               rbloss::Metric::rae};
  } else {
    for (const std::string& nm : names) {
      const auto m = rbloss::metric_from_name(nm);
      if (!m) rbloss::fail(rbloss::errc::parse, "unknown metric " + nm);
      metrics.push_back(*m);
    }
  }

  json j;
  j["spec_version"] = "1";
  j["n"] = data.n;
  for (rbloss::Metric m : metrics) {
    try {
      j[rbloss::metric_name(m)] = rbloss::eval_metric(m, pred, data.y);
    } catch (const rbloss::error& e) {
      if (e.code() != rbloss::errc::undefined_metric) throw;
      j[rbloss::metric_name(m)] = nullptr;
      j["note"] = e.what();
    }
  }
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int run_build(const std::string& symmetrize_spec, const std::string& generator_name,
              const std::string& flatten_spec, double lambda, double b,
              const std::string& curve_out, const std::string& out) {
  json j;
  j["spec_version"] = "1";
  std::unique_ptr<rbloss::RepresentingFunction> fn;

  if (!symmetrize_spec.empty()) {
    const auto [name, params] = parse_named_params(symmetrize_spec);
    rbloss::AuxFunction aux;
    if (name == "pow") {
      const double alpha = std::isnan(params.alpha) ? 2.0 : params.alpha;
      aux = rbloss::aux_pow(alpha);
    } else if (name == "log1p") {
      aux = rbloss::aux_log1p();
    } else if (name == "sqrtlog") {
      aux = rbloss::aux_sqrtlog();
    } else {
      rbloss::fail(rbloss::errc::parse, "unknown preset " + name + " (pow, log1p, sqrtlog)");
    }
    fn = std::make_unique<rbloss::RepresentingFunction>(rbloss::symmetrize(aux));
    auto cert = rbloss::convexity_certificate(aux);
    double cmin = rbloss::inf;
    for (int i = 0; i <= 2000; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 2000.0);
      cmin = std::min(cmin, cert(r));
    }
    j["certificate_min"] = cmin;
  } else if (!generator_name.empty()) {
    rbloss::Generator gen;
    if (generator_name == "g1") gen = rbloss::generator_ratio_over_one_plus();
    else if (generator_name == "g2") gen = rbloss::generator_sqrt_ratio();
    else rbloss::fail(rbloss::errc::parse, "unknown generator (g1, g2)");
    rbloss::BuiltFunction built = rbloss::build_from_generator(gen);
    fn = std::make_unique<rbloss::RepresentingFunction>(built.sym);
    double cmin = rbloss::inf;
    for (int i = 0; i <= 2000; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 2000.0);
      cmin = std::min(cmin, built.certificate(r));
    }
    j["certificate_min"] = cmin;
    if (built.lipschitz_bound) j["lipschitz_bound"] = *built.lipschitz_bound;
  } else if (!flatten_spec.empty()) {
    fn = std::make_unique<rbloss::RepresentingFunction>(
        rbloss::flatten(parse_ell_spec(flatten_spec), lambda, b));
    j["flat_ceiling"] = 1.0 / lambda;
    j["value_at_1e10"] = fn->value(1e10);
    j["value_at_1e-10"] = fn->value(1e-10);
  } else {
    rbloss::fail(rbloss::errc::parse, "build needs --symmetrize, --generator or --flatten");
  }

  j["name"] = fn->name();
  const rbloss::PropertyReport conv = rbloss::check_convexity(*fn);
  j["convexity"] = rbloss::verdict_name(conv.verdict);
  if (!curve_out.empty()) {
    OutStream cs(curve_out);
    cs.get() << "r,value,deriv\n";
    for (int i = 0; i <= 400; ++i) {
      const double r = std::pow(10.0, -3.0 + 6.0 * i / 400.0);
      cs.get() << rbloss::format_g17(r) << "," << rbloss::format_g17(fn->value(r)) << ","
               << rbloss::format_g17(fn->deriv(r)) << "\n";
    }
  }
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratio-based loss functions: catalog, verification, fitting"};
  app.require_subcommand(1);
  int rc = 0;

  auto* list = app.add_subcommand("list", "show the catalog of representing functions");
  list->callback([&] { rc = run_list(); });

  auto* curve = app.add_subcommand("curve", "tabulate a loss curve in t");
  std::string curve_loss, curve_out = "-";
  double curve_y = 1.0, curve_tmin = -5.0, curve_tmax = 5.0;
  int curve_n = 201;
  curve->add_option("--loss", curve_loss, "loss spec, e.g. lpre/exp/c=0")->required();
  curve->add_option("--y", curve_y, "observed value");
  curve->add_option("--tmin", curve_tmin, "grid start");
  curve->add_option("--tmax", curve_tmax, "grid end");
  curve->add_option("--n", curve_n, "grid size");
  curve->add_option("--out", curve_out, "output path or -");
  curve->callback(
      [&] { rc = run_curve(curve_loss, curve_y, curve_tmin, curve_tmax, curve_n, curve_out); });

  auto* verify = app.add_subcommand("verify", "scan analytic properties against expectations");
  bool v_table2 = false, v_table3 = false, v_lemmas = false, v_json = false;
  std::string v_loss, v_ell, v_property, v_out = "-";
  verify->add_flag("--table2", v_table2, "catalog-wide checks in r");
  verify->add_flag("--table3", v_table3, "loss checks over exp and logistic links");
  verify->add_flag("--lemmas", v_lemmas, "closed-form Lipschitz bounds");
  verify->add_option("--loss", v_loss, "single loss spec to check");
  verify->add_option("--ell", v_ell, "single representing function to check");
  verify->add_option("--property", v_property, "restrict to one property");
  verify->add_flag("--json", v_json, "emit json instead of csv");
  verify->add_option("--out", v_out, "output path or -");
  verify->callback([&] {
    rc = run_verify(v_table2, v_table3, v_lemmas, v_loss, v_ell, v_property, v_json, v_out);
  });

  auto* gen = app.add_subcommand("gen", "generate a multiplicative-noise dataset");
  int g_n = 200, g_d = 3;
  std::uint64_t g_seed = 1;
  double g_noise = 0.1, g_b0 = 0.5, g_xscale = 1.0;
  std::string g_link = "exp", g_out = "-";
  std::vector<double> g_w;
  gen->add_option("--n", g_n, "rows");
  gen->add_option("--d", g_d, "features");
  gen->add_option("--seed", g_seed, "rng seed");
  gen->add_option("--noise", g_noise, "lognormal sigma");
  gen->add_option("--b0", g_b0, "true intercept");
  gen->add_option("--x-scale", g_xscale, "feature scale");
  gen->add_option("--link", g_link, "link spec, e.g. exp or logistic:a=0,b=1");
  gen->add_option("--w", g_w, "true weights")->delimiter(',');
  gen->add_option("--out", g_out, "output path or -");
  gen->callback(
      [&] { rc = run_gen(g_n, g_d, g_seed, g_noise, g_b0, g_xscale, g_link, g_w, g_out); });

  auto* fitc = app.add_subcommand("fit", "fit a linear-in-link model by gradient descent");
  std::string f_loss, f_data, f_out = "-";
  double f_lambda = 0.0, f_tol = 1e-8;
  int f_maxiter = 10000;
  fitc->add_option("--loss", f_loss, "loss spec")->required();
  fitc->add_option("--data", f_data, "dataset csv")->required();
  fitc->add_option("--lambda", f_lambda, "ridge weight");
  fitc->add_option("--max-iter", f_maxiter, "iteration cap");
  fitc->add_option("--tol", f_tol, "gradient sup-norm stop");
  fitc->add_option("--out", f_out, "output path or -");
  fitc->callback([&] { rc = run_fit(f_loss, f_data, f_lambda, f_maxiter, f_tol, f_out); });

  auto* risk = app.add_subcommand("risk", "evaluate empirical risk of a model");
  std::string r_loss, r_data, r_model, r_out = "-";
  double r_lambda = 0.0;
  bool r_zero_bound = false;
  risk->add_option("--loss", r_loss, "loss spec")->required();
  risk->add_option("--data", r_data, "dataset csv")->required();
  risk->add_option("--model", r_model, "model json (default: zero model)");
  risk->add_option("--lambda", r_lambda, "ridge weight");
  risk->add_flag("--zero-bound", r_zero_bound, "also report the closed-form zero-score bound");
  risk->callback(
      [&] { rc = run_risk(r_loss, r_data, r_model, r_lambda, r_zero_bound, r_out); });

  auto* metric = app.add_subcommand("metric", "evaluate prediction metrics of a model");
  std::string m_loss, m_data, m_model, m_out = "-";
  std::vector<std::string> m_names;
  metric->add_option("--loss", m_loss, "loss spec (for the link)")->required();
  metric->add_option("--data", m_data, "dataset csv")->required();
  metric->add_option("--model", m_model, "model json")->required();
  metric->add_option("--metric", m_names, "absrel, lrmse, meanlog10, rae or all");
  metric->add_option("--out", m_out, "output path or -");
  metric->callback([&] { rc = run_metric(m_loss, m_data, m_model, m_names, m_out); });

  auto* build = app.add_subcommand("build", "construct convex representing functions");
  std::string b_sym, b_gen, b_flat, b_curve, b_out = "-";
  double b_lambda = 1.0, b_b = 1.0;
  build->add_option("--symmetrize", b_sym, "aux preset: pow:alpha=.., log1p, sqrtlog");
  build->add_option("--generator", b_gen, "generator preset: g1, g2");
  build->add_option("--flatten", b_flat, "base representing function to flatten");
  build->add_option("--lambda", b_lambda, "flatten ceiling 1/lambda");
  build->add_option("--b", b_b, "flatten rate");
  build->add_option("--curve-out", b_curve, "optional csv of r,value,deriv");
  build->add_option("--out", b_out, "output path or -");
  build->callback(
      [&] { rc = run_build(b_sym, b_gen, b_flat, b_lambda, b_b, b_curve, b_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rbloss::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
