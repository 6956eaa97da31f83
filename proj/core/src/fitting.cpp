#include "repfreq/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "repfreq/numerics.hpp"
#include "repfreq/rng.hpp"

#include <json.hpp>

namespace repfreq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BinView {
  double x;       // k - 1
  double n;       // type count in the bin
  std::uint64_t k;
};

std::vector<BinView> make_bin_views(const FrequencyHistogram& hist) {
  std::vector<BinView> views;
  views.reserve(hist.bins.size());
  for (const auto& [k, n] : hist.bins)
    views.push_back({static_cast<double>(k - 1), static_cast<double>(n), k});
  return views;
}

// log pmf of one Lomax component on raw parameters, x = k - 1.
inline double log_pmf_raw(double v, double b, double x) {
  const double step = -std::expm1(-v * std::log1p(1.0 / (x + b)));
  return -v * std::log1p(x / b) + std::log(step);
}

// ---------------------------------------------------------------------------
// Nelder-Mead in two dimensions, maximizing. The start point is always part
// of the simplex, so the best value never falls below f(start).
// ---------------------------------------------------------------------------

struct NmPoint {
  double a, b, f;
};

template <typename F>
NmPoint nelder_mead_max_2d(F&& f, double a0, double b0, double step, int max_evals) {
  int evals = 0;
  auto eval = [&](double a, double b) {
    ++evals;
    return f(a, b);
  };
  NmPoint s[3] = {{a0, b0, eval(a0, b0)},
                  {a0 + step, b0, eval(a0 + step, b0)},
                  {a0, b0 + step, eval(a0, b0 + step)}};
  auto order = [&] {
    std::sort(s, s + 3, [](const NmPoint& p, const NmPoint& q) { return p.f > q.f; });
  };
  order();
  while (evals < max_evals) {
    if (std::fabs(s[0].f - s[2].f) <= 1e-10 * (1.0 + std::fabs(s[0].f)) ||
        std::fabs(s[0].a - s[2].a) + std::fabs(s[0].b - s[2].b) < 1e-9)
      break;
    const double ca = 0.5 * (s[0].a + s[1].a);
    const double cb = 0.5 * (s[0].b + s[1].b);
    const double ra = ca + (ca - s[2].a);
    const double rb = cb + (cb - s[2].b);
    const double fr = eval(ra, rb);
    if (fr > s[0].f) {
      const double ea = ca + 2.0 * (ca - s[2].a);
      const double eb = cb + 2.0 * (cb - s[2].b);
      const double fe = evals < max_evals ? eval(ea, eb) : kNegInf;
      s[2] = fe > fr ? NmPoint{ea, eb, fe} : NmPoint{ra, rb, fr};
    } else if (fr > s[1].f) {
      s[2] = {ra, rb, fr};
    } else {
      const double base = std::max(fr, s[2].f);
      const double xa = fr > s[2].f ? ra : s[2].a;
      const double xb = fr > s[2].f ? rb : s[2].b;
      const double sa = ca + 0.5 * (xa - ca);
      const double sb = cb + 0.5 * (xb - cb);
      const double fs = evals < max_evals ? eval(sa, sb) : kNegInf;
      if (fs > base) {
        s[2] = {sa, sb, fs};
      } else {
        // shrink toward the best vertex
        for (int i = 1; i < 3; ++i) {
          s[i].a = s[0].a + 0.5 * (s[i].a - s[0].a);
          s[i].b = s[0].b + 0.5 * (s[i].b - s[0].b);
          s[i].f = evals < max_evals ? eval(s[i].a, s[i].b) : kNegInf;
        }
      }
    }
    order();
  }
  return s[0];
}

// ---------------------------------------------------------------------------
// EM for the Lomax mixture on binned data
// ---------------------------------------------------------------------------

struct EmParams {
  std::vector<double> c, v, b;
};

struct EmRun {
  EmParams params;
  double loglik = kNegInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

double weighted_loglik(const std::vector<BinView>& bins, const EmParams& p) {
  const std::size_t m = p.c.size();
  KahanSum total;
  std::vector<double> logc(m);
  for (std::size_t i = 0; i < m; ++i) logc[i] = std::log(p.c[i]);
  for (const BinView& bin : bins) {
    double best = kNegInf;
    double lp[8];
    for (std::size_t i = 0; i < m; ++i) {
      lp[i] = logc[i] + log_pmf_raw(p.v[i], p.b[i], bin.x);
      best = std::max(best, lp[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::exp(lp[i] - best);
    total.add(bin.n * (best + std::log(acc)));
  }
  return total.value();
}

EmRun run_em(const std::vector<BinView>& bins, EmParams params,
             const FitOptions& opts, bool record_trace) {
  const std::size_t m = params.c.size();
  const double total_types = [&] {
    double t = 0.0;
    for (const BinView& bin : bins) t += bin.n;
    return t;
  }();

  EmRun run;
  std::vector<double> resp(bins.size() * m);
  double prev_ll = kNegInf;

  const double lo_a = std::log(opts.shape_min), hi_a = std::log(opts.shape_max);
  const double lo_b = std::log(opts.scale_min), hi_b = std::log(opts.scale_max);

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    // E-step: responsibilities per bin, plus the observed-data log-likelihood.
    KahanSum ll_sum;
    std::vector<double> logc(m);
    for (std::size_t i = 0; i < m; ++i) logc[i] = std::log(params.c[i]);
    for (std::size_t bi = 0; bi < bins.size(); ++bi) {
      double best = kNegInf;
      double lp[8];
      for (std::size_t i = 0; i < m; ++i) {
        lp[i] = logc[i] + log_pmf_raw(params.v[i], params.b[i], bins[bi].x);
        best = std::max(best, lp[i]);
      }
      double denom = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        lp[i] = std::exp(lp[i] - best);
        denom += lp[i];
      }
      for (std::size_t i = 0; i < m; ++i) resp[bi * m + i] = lp[i] / denom;
      ll_sum.add(bins[bi].n * (best + std::log(denom)));
    }
    const double ll = ll_sum.value();
    run.iterations = iter;
    run.loglik = ll;
    if (record_trace) run.trace.push_back(ll);
    if (iter > 1 &&
        std::fabs(ll - prev_ll) <= opts.rel_loglik_tolerance * (1.0 + std::fabs(ll))) {
      run.converged = true;
      break;
    }
    prev_ll = ll;

    // M-step: closed-form weights, then a bounded search per component in
    // (ln v, ln b). The search starts from the current point, so each
    // component objective never decreases (generalized EM).
    for (std::size_t i = 0; i < m; ++i) {
      KahanSum wsum;
      for (std::size_t bi = 0; bi < bins.size(); ++bi)
        wsum.add(bins[bi].n * resp[bi * m + i]);
      const double weight_total = wsum.value();
      params.c[i] = std::max(weight_total / total_types, 1e-12);
      if (weight_total <= 1e-12 * total_types) continue;  // dead component

      auto objective = [&](double la, double lb) {
        if (la < lo_a || la > hi_a || lb < lo_b || lb > hi_b)
          return -1e18 * (1.0 + std::fabs(la) + std::fabs(lb));
        const double v = std::exp(la), b = std::exp(lb);
        KahanSum q;
        for (std::size_t bi = 0; bi < bins.size(); ++bi) {
          const double w = bins[bi].n * resp[bi * m + i];
          if (w > 0.0) q.add(w * log_pmf_raw(v, b, bins[bi].x));
        }
        return q.value();
      };
      const NmPoint best = nelder_mead_max_2d(
          objective, std::log(params.v[i]), std::log(params.b[i]), 0.15, 200);
      params.v[i] = std::exp(best.a);
      params.b[i] = std::exp(best.b);
    }
    double c_total = 0.0;
    for (double c : params.c) c_total += c;
    for (double& c : params.c) c /= c_total;
  }

  if (!run.converged) {
    // params moved after the last E-step; report the matching likelihood
    run.loglik = weighted_loglik(bins, params);
    if (record_trace) run.trace.push_back(run.loglik);
  }
  run.params = std::move(params);
  return run;
}

// Quantile-split initialization: contiguous groups of roughly equal type
// counts, a shape guess from each group's mean/median ratio, and the scale
// matched to the group median. Restarts beyond the first jitter the guess.
EmParams initial_params(const std::vector<BinView>& bins, int m,
                        const FitOptions& opts, Rng& rng, bool jitter) {
  double total = 0.0;
  for (const BinView& bin : bins) total += bin.n;

  EmParams params;
  params.c.resize(m);
  params.v.resize(m);
  params.b.resize(m);

  // mean/median ratio of a continuous Lomax as a function of the shape
  auto ratio_for_shape = [](double v) {
    return 1.0 / ((v - 1.0) * (std::exp2(1.0 / v) - 1.0));
  };

  std::size_t cursor = 0;
  double consumed = 0.0;
  for (int g = 0; g < m; ++g) {
    const double group_target = total * static_cast<double>(g + 1) / m;
    double group_n = 0.0, group_kn = 0.0;
    std::vector<const BinView*> group;
    while (cursor < bins.size() &&
           (consumed < group_target || group.empty())) {
      // leave enough bins for the remaining groups
      if (bins.size() - cursor <= static_cast<std::size_t>(m - g - 1) &&
          !group.empty())
        break;
      group.push_back(&bins[cursor]);
      group_n += bins[cursor].n;
      group_kn += bins[cursor].n * static_cast<double>(bins[cursor].k);
      consumed += bins[cursor].n;
      ++cursor;
    }
    double half = 0.0;
    double median_k = group.empty() ? 1.0 : static_cast<double>(group.back()->k);
    for (const BinView* bv : group) {
      half += bv->n;
      if (half >= 0.5 * group_n) {
        median_k = static_cast<double>(bv->k);
        break;
      }
    }
    const double x_med = std::max(0.5, median_k - 0.5);
    const double x_bar = std::max(x_med * 1.0001, group_kn / std::max(group_n, 1.0) - 0.5);
    const double r = x_bar / x_med;

    double v;
    if (r >= ratio_for_shape(1.05)) {
      v = 0.95;
    } else if (r <= ratio_for_shape(10.0)) {
      v = 10.0;
    } else {
      double lo = 1.05, hi = 10.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio_for_shape(mid) > r ? lo : hi) = mid;
      }
      v = 0.5 * (lo + hi);
    }
    double b = x_med / (std::exp2(1.0 / v) - 1.0);

    if (jitter) {
      v *= std::exp(0.35 * rng.normal());
      b *= std::exp(0.35 * rng.normal());
    }
    params.v[g] = std::clamp(v, opts.shape_min, opts.shape_max);
    params.b[g] = std::clamp(b, opts.scale_min, opts.scale_max);
    params.c[g] = std::max(group_n / total, 1e-6);
  }
  double c_total = 0.0;
  for (double c : params.c) c_total += c;
  for (double& c : params.c) c /= c_total;
  return params;
}

Mixture to_mixture(const EmParams& p) {
  std::vector<WeightedComponent> comps;
  double total = 0.0;
  for (double c : p.c) total += c;
  for (std::size_t i = 0; i < p.c.size(); ++i)
    comps.push_back({p.c[i] / total, LomaxComponent(p.v[i], p.b[i])});
  return Mixture(std::move(comps));
}

void attach_gof(FitReport& report, const FrequencyHistogram& hist,
                const CountModel& model, const FitOptions& opts) {
  report.layout = merge_bins(hist, model, opts.merge_threshold);
  const Chi2Result gof = chi_square(report.layout, report.n_free_params());
  report.chi2 = gof.chi2;
  report.dof = gof.dof;
  report.p_value = gof.p_value;
}

}  // namespace

int FitReport::n_free_params() const {
  if (model == ModelKind::zipf) return 1;
  return 3 * static_cast<int>(mixture->size()) - 1;
}

FitReport fit_zipf(const FrequencyHistogram& hist, const FitOptions& opts) {
  hist.validate();
  if (hist.distinct_k() < 2) {
    if (hist.bins.count(1))
      throw ParameterError(
          "zipf MLE boundary: all mass at k = 1 pushes the exponent to infinity");
    throw ParameterError("zipf fit needs at least two distinct k values");
  }

  KahanSum logk_sum;
  for (const auto& [k, n] : hist.bins)
    logk_sum.add(static_cast<double>(n) * std::log(static_cast<double>(k)));
  const double mean_logk = logk_sum.value() / static_cast<double>(hist.total_types);

  // Score equation: E_s[ln K] = mean_logk, with E_s[ln K] = -zeta'/zeta
  // strictly decreasing in s. Newton steps with a bisection safeguard.
  auto score = [&](double s) { return -zeta_log_derivative(s) - mean_logk; };
  double lo = 1.0 + 1e-9, hi = 50.0;
  double s_hat;
  if (score(hi) >= 0.0) {
    s_hat = hi;  // data so concentrated at k=1 that the cap binds
  } else {
    double s = std::min(std::max(1.0 + 1.0 / mean_logk, lo), hi);
    for (int it = 0; it < 200; ++it) {
      const double g = score(s);
      (g > 0 ? lo : hi) = s;
      if (hi - lo < 1e-9) break;
      const double h = 1e-6 * std::max(1.0, s);
      const double dg = (score(s + h) - score(s - h)) / (2.0 * h);
      double next = s - g / dg;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - s) < 1e-9) {
        s = next;
        break;
      }
      s = next;
    }
    s_hat = s;
  }

  FitReport report;
  report.model = ModelKind::zipf;
  report.zipf_exponent = s_hat;
  report.sample_types = hist.total_types;
  report.log_likelihood =
      -s_hat * logk_sum.value() -
      static_cast<double>(hist.total_types) * std::log(riemann_zeta(s_hat));
  attach_gof(report, hist, ZipfModel(s_hat), opts);
  return report;
}

FitReport fit_mixture(const FrequencyHistogram& hist, int M,
                      const FitOptions& opts) {
  hist.validate();
  if (M < 1) throw ParameterError("mixture size M must be >= 1");
  if (hist.distinct_k() < 2 * static_cast<std::size_t>(M)) {
    std::ostringstream msg;
    msg << "M=" << M << " is too large for a histogram with "
        << hist.distinct_k() << " distinct k values";
    throw ParameterError(msg.str());
  }

  const std::vector<BinView> bins = make_bin_views(hist);
  EmRun best;
  bool have_best = false;
  bool any_converged = false;
  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(M),
                        static_cast<std::uint64_t>(r)));
    EmParams init = initial_params(bins, M, opts, rng, r > 0);
    EmRun run = run_em(bins, std::move(init), opts, opts.record_trace);
    any_converged = any_converged || run.converged;
    if (!have_best || run.loglik > best.loglik) {
      best = std::move(run);
      have_best = true;
    }
  }

  FitReport report;
  report.model = ModelKind::mixture;
  report.mixture = to_mixture(best.params);
  report.log_likelihood = best.loglik;
  report.sample_types = hist.total_types;
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.loglik_trace = best.trace;
  for (const auto& wc : report.mixture->components())
    report.e_lambda.push_back(wc.component.shape / wc.component.scale);
  attach_gof(report, hist, MixtureModel(*report.mixture), opts);

  if (!any_converged) {
    std::ostringstream msg;
    msg << "EM did not reach the relative tolerance " << opts.rel_loglik_tolerance
        << " within " << opts.max_iterations << " iterations in any of "
        << opts.restarts << " restarts (M=" << M << ")";
    throw FitDidNotConverge(msg.str(), std::move(report));
  }
  return report;
}

const FitReport& ModelSelection::selected() const {
  for (const Entry& entry : mixtures)
    if (entry.M == selected_M && entry.report) return *entry.report;
  throw Error("model selection holds no report for the selected M");
}

ModelSelection select_model(const FrequencyHistogram& hist, int max_M,
                            double alpha, const FitOptions& opts) {
  if (max_M < 1 || max_M > 5)
    throw ParameterError("max_M must lie in [1, 5]");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ParameterError("alpha must lie in (0, 1)");

  ModelSelection sel;
  sel.alpha = alpha;

  try {
    sel.zipf = fit_zipf(hist, opts);
  } catch (const Error& e) {
    sel.zipf_error = e.what();
  }

  const FitReport* fallback = nullptr;
  for (int M = 1; M <= max_M; ++M) {
    ModelSelection::Entry entry;
    entry.M = M;
    try {
      entry.report = fit_mixture(hist, M, opts);
    } catch (const FitDidNotConverge& e) {
      entry.report = e.best;
      entry.error = e.what();
    } catch (const Error& e) {
      entry.error = e.what();
    }
    sel.mixtures.push_back(std::move(entry));
  }

  for (const auto& entry : sel.mixtures) {
    if (!entry.report) continue;
    if (!fallback || entry.report->p_value > fallback->p_value)
      fallback = &*entry.report;
    if (sel.selected_M == 0 && entry.report->p_value >= alpha)
      sel.selected_M = entry.M;
  }
  if (sel.selected_M == 0) {
    if (!fallback)
      throw ConvergenceError("no mixture fit succeeded for any M");
    sel.by_fallback = true;
    sel.selected_M = static_cast<int>(fallback->mixture->size());
  }
  return sel;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json report_to_json_obj(const FitReport& report) {
  nlohmann::ordered_json doc;
  if (report.model == ModelKind::zipf) {
    doc["model"] = "zipf";
    doc["s"] = report.zipf_exponent;
  } else {
    doc["model"] = "mixture";
    doc["M"] = report.mixture->size();
    nlohmann::ordered_json comps = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.mixture->size(); ++i) {
      const auto& wc = report.mixture->components()[i];
      comps.push_back({{"c", wc.weight},
                       {"v", wc.component.shape},
                       {"b", wc.component.scale},
                       {"e_lambda", report.e_lambda[i]}});
    }
    doc["components"] = std::move(comps);
  }
  doc["loglik"] = report.log_likelihood;
  doc["chi2"] = report.chi2;
  doc["dof"] = report.dof;
  doc["p"] = report.p_value;
  doc["types"] = report.sample_types;
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const Bin& bin : report.layout.bins)
    bins.push_back({{"k_lo", bin.k_lo},
                    {"k_hi", bin.k_hi},
                    {"obs", bin.observed},
                    {"exp", bin.expected}});
  doc["merged_bins"] = std::move(bins);
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  return doc;
}

FitReport report_from_json_obj(const nlohmann::json& doc) {
  FitReport report;
  try {
    const std::string kind = doc.at("model").get<std::string>();
    if (kind == "zipf") {
      report.model = ModelKind::zipf;
      report.zipf_exponent = doc.at("s").get<double>();
    } else if (kind == "mixture") {
      report.model = ModelKind::mixture;
      std::vector<WeightedComponent> comps;
      for (const auto& item : doc.at("components"))
        comps.push_back(WeightedComponent{
            item.at("c").get<double>(),
            LomaxComponent(item.at("v").get<double>(), item.at("b").get<double>())});
      report.mixture = Mixture(std::move(comps));
      for (const auto& wc : report.mixture->components())
        report.e_lambda.push_back(wc.component.shape / wc.component.scale);
    } else {
      throw InputError("unknown model kind \"" + kind + "\"");
    }
    report.log_likelihood = doc.at("loglik").get<double>();
    report.chi2 = doc.at("chi2").get<double>();
    report.dof = doc.at("dof").get<int>();
    report.p_value = doc.at("p").get<double>();
    report.sample_types = doc.at("types").get<std::uint64_t>();
    if (doc.contains("merged_bins")) {
      for (const auto& item : doc.at("merged_bins"))
        report.layout.bins.push_back(Bin{item.at("k_lo").get<std::uint64_t>(),
                                         item.at("k_hi").get<std::uint64_t>(),
                                         item.at("obs").get<std::uint64_t>(),
                                         item.at("exp").get<double>()});
    }
    report.converged = doc.value("converged", true);
    report.iterations = doc.value("iterations", 0);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid fit report JSON: ") + e.what());
  }
  if (report.p_value < 0.0 || report.p_value > 1.0)
    throw InputError("fit report p-value outside [0, 1]");
  return report;
}

}  // namespace

std::string report_to_json(const FitReport& report) {
  return report_to_json_obj(report).dump(2) + "\n";
}

FitReport report_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid fit report JSON: ") + e.what());
  }
  return report_from_json_obj(doc);
}

std::string selection_to_json(const ModelSelection& sel) {
  nlohmann::ordered_json doc;
  doc["alpha"] = sel.alpha;
  doc["selected_M"] = sel.selected_M;
  doc["by_fallback"] = sel.by_fallback;
  if (sel.zipf)
    doc["zipf"] = report_to_json_obj(*sel.zipf);
  else
    doc["zipf"] = {{"error", sel.zipf_error}};
  nlohmann::ordered_json mixtures = nlohmann::ordered_json::array();
  for (const auto& entry : sel.mixtures) {
    nlohmann::ordered_json item;
    item["M"] = entry.M;
    if (entry.report) item["report"] = report_to_json_obj(*entry.report);
    if (!entry.error.empty()) item["error"] = entry.error;
    mixtures.push_back(std::move(item));
  }
  doc["mixtures"] = std::move(mixtures);
  return doc.dump(2) + "\n";
}

ModelSelection selection_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid selection JSON: ") + e.what());
  }
  ModelSelection sel;
  try {
    sel.alpha = doc.at("alpha").get<double>();
    sel.selected_M = doc.at("selected_M").get<int>();
    sel.by_fallback = doc.value("by_fallback", false);
    if (doc.contains("zipf") && !doc["zipf"].contains("error"))
      sel.zipf = report_from_json_obj(doc["zipf"]);
    else if (doc.contains("zipf"))
      sel.zipf_error = doc["zipf"].value("error", std::string{});
    for (const auto& item : doc.at("mixtures")) {
      ModelSelection::Entry entry;
      entry.M = item.at("M").get<int>();
      if (item.contains("report")) entry.report = report_from_json_obj(item["report"]);
      entry.error = item.value("error", std::string{});
      sel.mixtures.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid selection JSON: ") + e.what());
  }
  return sel;
}

}  // namespace repfreq
