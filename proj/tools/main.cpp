// repfreq: fit and compare heavy-tailed occurrence-frequency models on text
// and hypertext corpora, generate synthetic data, and simulate the
// competing-rates diffusion behind the exponential occurrence law.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repfreq/corpus.hpp"
#include "repfreq/diffusion.hpp"
#include "repfreq/distributions.hpp"
#include "repfreq/error.hpp"
#include "repfreq/evolution.hpp"
#include "repfreq/fitting.hpp"
#include "repfreq/gof.hpp"
#include "repfreq/histogram.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConvergence = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw repfreq::InputError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw repfreq::InputError("cannot read file: " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw repfreq::InputError("cannot write file: " + path);
  out << content;
  if (!out) throw repfreq::InputError("cannot write file: " + path);
}

// Accepts either inline JSON (starts with '{') or a path to a JSON file.
std::string inline_or_file(const std::string& arg) {
  std::size_t i = 0;
  while (i < arg.size() && std::isspace(static_cast<unsigned char>(arg[i]))) ++i;
  if (i < arg.size() && arg[i] == '{') return arg;
  return read_file(arg);
}

repfreq::Mixture load_mixture(const std::string& arg) {
  const std::string text = inline_or_file(arg);
  try {
    return repfreq::mixture_from_json(text);
  } catch (const repfreq::InputError&) {
    // also accept a fit report that carries mixture components
    repfreq::FitReport report = repfreq::report_from_json(text);
    if (report.model != repfreq::ModelKind::mixture)
      throw repfreq::InputError("file does not contain mixture parameters");
    return *report.mixture;
  }
}

std::string join_values(const std::vector<double>& values, const char* fmt = "%.4g") {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), fmt, values[i]);
    if (i) out += "/";
    out += buf;
  }
  return out;
}

void print_table_header() {
  std::printf("%-8s %-4s %-20s %-20s %-20s %-16s %12s %7s %10s\n", "model", "M",
              "c_i", "v_i", "b_i", "v_i/b_i", "chi2", "dof", "p");
}

void print_table_row(const repfreq::FitReport& report) {
  if (report.model == repfreq::ModelKind::zipf) {
    char s_buf[64];
    std::snprintf(s_buf, sizeof(s_buf), "s=%.4f", report.zipf_exponent);
    std::printf("%-8s %-4s %-20s %-20s %-20s %-16s %12.2f %7d %10.3g\n", "zipf",
                "-", s_buf, "-", "-", "-", report.chi2, report.dof,
                report.p_value);
    return;
  }
  std::vector<double> c, v, b, e;
  for (const auto& wc : report.mixture->components()) {
    c.push_back(wc.weight);
    v.push_back(wc.component.shape);
    b.push_back(wc.component.scale);
    e.push_back(wc.component.shape / wc.component.scale);
  }
  std::printf("%-8s %-4zu %-20s %-20s %-20s %-16s %12.2f %7d %10.3g\n",
              "mixture", report.mixture->size(), join_values(c).c_str(),
              join_values(v).c_str(), join_values(b).c_str(),
              join_values(e).c_str(), report.chi2, report.dof, report.p_value);
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> paths;
  bool html = false;
  std::string out;
};

int cmd_ingest(const IngestArgs& args) {
  repfreq::WordCounts counts;
  for (const std::string& path : args.paths) {
    std::string text = read_file(path);
    if (args.html) text = repfreq::strip_markup(text);
    repfreq::count_tokens(repfreq::tokenize(text), counts);
  }
  std::string source;
  for (const std::string& path : args.paths) {
    if (!source.empty()) source += ",";
    source += path;
  }
  const repfreq::FrequencyHistogram hist =
      repfreq::histogram_from_counts(counts, source);
  write_file(args.out, repfreq::histogram_to_json(hist));
  std::printf("types: %llu\n", static_cast<unsigned long long>(hist.total_types));
  std::printf("tokens: %llu\n", static_cast<unsigned long long>(hist.total_tokens));
  std::printf("share of types seen once or twice: %.4f\n",
              hist.low_frequency_share());
  std::printf("wrote %s\n", args.out.c_str());
  return kExitOk;
}

struct FitArgs {
  std::string hist_path;
  std::string model = "mixture";
  int max_M = 3;
  double alpha = 0.01;
  std::uint64_t seed = 0;
  std::uint64_t threshold = 6;
  std::string out;
};

repfreq::FitOptions make_options(std::uint64_t seed, std::uint64_t threshold) {
  repfreq::FitOptions opts;
  opts.seed = seed;
  opts.merge_threshold = threshold;
  return opts;
}

int cmd_fit(const FitArgs& args) {
  const repfreq::FrequencyHistogram hist =
      repfreq::histogram_from_json(read_file(args.hist_path));
  const repfreq::FitOptions opts = make_options(args.seed, args.threshold);
  print_table_header();
  if (args.model == "zipf") {
    const repfreq::FitReport report = repfreq::fit_zipf(hist, opts);
    write_file(args.out, repfreq::report_to_json(report));
    print_table_row(report);
    return kExitOk;
  }
  try {
    const repfreq::ModelSelection sel =
        repfreq::select_model(hist, args.max_M, args.alpha, opts);
    write_file(args.out, repfreq::selection_to_json(sel));
    print_table_row(sel.selected());
    if (sel.by_fallback)
      std::printf("note: no M reached p >= %g; reporting the best available fit\n",
                  args.alpha);
    return kExitOk;
  } catch (const repfreq::FitDidNotConverge& e) {
    write_file(args.out, repfreq::report_to_json(e.best));
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConvergence;
  }
}

int cmd_compare(const FitArgs& args) {
  const repfreq::FrequencyHistogram hist =
      repfreq::histogram_from_json(read_file(args.hist_path));
  const repfreq::FitOptions opts = make_options(args.seed, args.threshold);
  const repfreq::FitReport zipf = repfreq::fit_zipf(hist, opts);
  const repfreq::ModelSelection sel =
      repfreq::select_model(hist, args.max_M, args.alpha, opts);

  nlohmann::ordered_json doc;
  doc["zipf"] = nlohmann::ordered_json::parse(repfreq::report_to_json(zipf));
  doc["selection"] = nlohmann::ordered_json::parse(repfreq::selection_to_json(sel));
  write_file(args.out, doc.dump(2) + "\n");

  print_table_header();
  print_table_row(zipf);
  print_table_row(sel.selected());
  return kExitOk;
}

struct GenArgs {
  std::string params;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  const repfreq::Mixture mix = load_mixture(args.params);
  if (args.n < 1) throw repfreq::InputError("sample count must be >= 1");
  const std::vector<std::uint64_t> samples =
      repfreq::sample_mixture(mix, args.n, args.seed);
  std::map<std::uint64_t, std::uint64_t> bins;
  for (std::uint64_t k : samples) ++bins[k];
  std::ostringstream source;
  source << "synthetic(n=" << args.n << ", seed=" << args.seed << ")";
  const repfreq::FrequencyHistogram hist =
      repfreq::FrequencyHistogram::from_bins(std::move(bins), source.str());
  write_file(args.out, repfreq::histogram_to_json(hist));
  std::printf("types: %llu\n", static_cast<unsigned long long>(hist.total_types));
  std::printf("tokens: %llu\n", static_cast<unsigned long long>(hist.total_tokens));
  std::printf("wrote %s\n", args.out.c_str());
  return kExitOk;
}

struct SimulateArgs {
  repfreq::DiffusionConfig cfg;
  std::string out;
  std::string samples_out;
};

int cmd_simulate(SimulateArgs& args) {
  const repfreq::DiffusionResult result = repfreq::simulate_diffusion(args.cfg);
  double mean = 0.0;
  for (double z : result.z_samples) mean += z;
  mean /= static_cast<double>(result.z_samples.size());
  const double lambda_empirical = 1.0 / mean;
  const repfreq::KsResult ks =
      repfreq::ks_exponential(result.z_samples, result.lambda_theory);

  if (args.samples_out.empty()) args.samples_out = args.out + ".csv";
  std::ostringstream csv;
  char buf[64];
  for (double z : result.z_samples) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", z);
    csv << buf;
  }
  write_file(args.samples_out, csv.str());
  write_file(args.out, repfreq::diffusion_result_to_json(
                           result, ks.ks_stat, lambda_empirical, args.samples_out));
  std::printf("lambda_theory: %.6g\n", result.lambda_theory);
  std::printf("lambda_empirical: %.6g\n", lambda_empirical);
  std::printf("ks: %.6g (n=%zu)\n", ks.ks_stat, ks.n);
  std::printf("wrote %s and %s\n", args.out.c_str(), args.samples_out.c_str());
  return kExitOk;
}

struct EvolveArgs {
  std::string params;
  double z_fr = 0.0;
  double delta_zfr = 0.0;
  std::string out;
};

int cmd_evolve(const EvolveArgs& args) {
  const repfreq::Mixture mix = load_mixture(args.params);
  const repfreq::EvolutionAssessment a =
      repfreq::assess_model(mix, args.z_fr, args.delta_zfr);
  const std::string json = repfreq::assessment_to_json(a);
  if (!args.out.empty()) write_file(args.out, json);
  if (a.divergent()) {
    std::printf("zbar: divergent (component index");
    for (std::size_t i : a.divergent_components)
      std::printf(" %zu", i);
    std::printf(" has shape <= 1)\n");
    std::printf("delta_zbar: divergent\n");
  } else {
    std::printf("zbar: %.6g\n", *a.zbar);
    std::printf("delta_zbar: %.6g\n", *a.delta_zbar);
  }
  return kExitOk;
}

struct PlotDataArgs {
  std::string report_path;
  std::string hist_path;
  std::string out;
};

int cmd_plotdata(const PlotDataArgs& args) {
  const std::string report_text = read_file(args.report_path);
  repfreq::FitReport report = [&] {
    try {
      return repfreq::report_from_json(report_text);
    } catch (const repfreq::InputError&) {
      const repfreq::ModelSelection sel = repfreq::selection_from_json(report_text);
      return sel.selected();
    }
  }();
  const repfreq::FrequencyHistogram hist =
      repfreq::histogram_from_json(read_file(args.hist_path));
  if (report.sample_types != hist.total_types)
    throw repfreq::InputError(
        "report and histogram disagree on the number of types");

  std::unique_ptr<repfreq::CountModel> model;
  if (report.model == repfreq::ModelKind::zipf)
    model = std::make_unique<repfreq::ZipfModel>(report.zipf_exponent);
  else
    model = std::make_unique<repfreq::MixtureModel>(*report.mixture);

  std::ostringstream csv;
  csv << "k,observed_fraction,model_pmf,observed_cdf,model_cdf\n";
  const double total = static_cast<double>(hist.total_types);
  double cumulative = 0.0;
  char buf[256];
  for (const auto& [k, n] : hist.bins) {
    cumulative += static_cast<double>(n);
    std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<unsigned long long>(k),
                  static_cast<double>(n) / total, model->pmf(k),
                  cumulative / total, 1.0 - model->tail_mass(k + 1));
    csv << buf;
  }
  write_file(args.out, csv.str());
  std::printf("wrote %s (%zu rows)\n", args.out.c_str(), hist.bins.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tailed occurrence-frequency modeling for text and hypertext"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_ing = app.add_subcommand(
      "ingest", "build a frequency-of-frequencies histogram from text files");
  cmd_ing->add_option("files", ingest.paths, "input files")->required();
  cmd_ing->add_flag("--html", ingest.html, "strip hypertext markup first");
  cmd_ing->add_option("-o,--out", ingest.out, "output histogram JSON")->required();

  FitArgs fit;
  auto* cmd_f = app.add_subcommand("fit", "fit a model to a histogram");
  cmd_f->add_option("histogram", fit.hist_path, "histogram JSON")->required();
  cmd_f->add_option("--model", fit.model, "zipf or mixture")
      ->check(CLI::IsMember({"zipf", "mixture"}));
  cmd_f->add_option("--max-m", fit.max_M, "largest mixture size to try");
  cmd_f->add_option("--alpha", fit.alpha, "significance level for selection");
  cmd_f->add_option("--seed", fit.seed, "random seed");
  cmd_f->add_option("--threshold", fit.threshold, "bin-merge threshold");
  cmd_f->add_option("-o,--out", fit.out, "output report JSON")->required();

  FitArgs compare;
  auto* cmd_cmp = app.add_subcommand(
      "compare", "fit both models and print a two-row summary");
  cmd_cmp->add_option("histogram", compare.hist_path, "histogram JSON")->required();
  cmd_cmp->add_option("--max-m", compare.max_M, "largest mixture size to try");
  cmd_cmp->add_option("--alpha", compare.alpha, "significance level");
  cmd_cmp->add_option("--seed", compare.seed, "random seed");
  cmd_cmp->add_option("--threshold", compare.threshold, "bin-merge threshold");
  cmd_cmp->add_option("-o,--out", compare.out, "output JSON")->required();

  GenArgs gen;
  auto* cmd_g = app.add_subcommand("gen", "sample a histogram from mixture parameters");
  cmd_g->add_option("--params", gen.params, "mixture JSON (inline or a path)")
      ->required();
  cmd_g->add_option("-n,--samples", gen.n, "number of draws")->required();
  cmd_g->add_option("--seed", gen.seed, "random seed");
  cmd_g->add_option("-o,--out", gen.out, "output histogram JSON")->required();

  SimulateArgs sim;
  auto* cmd_s = app.add_subcommand(
      "simulate", "run the competing-rates diffusion and test the exponential law");
  cmd_s->add_option("--n", sim.cfg.n_competing, "number of competing realizations N");
  cmd_s->add_option("--rho", sim.cfg.rho, "parallelism coefficient");
  cmd_s->add_option("--mu", sim.cfg.mu, "macrostate rate");
  cmd_s->add_option("--theta", sim.cfg.theta, "observation time");
  cmd_s->add_option("--gain", sim.cfg.gain, "drift gain a");
  cmd_s->add_option("--sigma", sim.cfg.sigma, "noise intensity (default auto)");
  cmd_s->add_option("--dt", sim.cfg.dt, "step size (default 0.1/(a*(N+1)))");
  cmd_s->add_option("--burn-in", sim.cfg.burn_in, "steps before sampling");
  cmd_s->add_option("--samples", sim.cfg.n_samples, "number of z samples");
  cmd_s->add_option("--stride", sim.cfg.sample_stride, "steps between samples");
  cmd_s->add_option("--seed", sim.cfg.seed, "random seed");
  cmd_s->add_option("--initial-sum", sim.cfg.initial_sum,
                    "starting sum of rates (default rho*mu)");
  cmd_s->add_option("-o,--out", sim.out, "output result JSON")->required();
  cmd_s->add_option("--samples-out", sim.samples_out,
                    "samples CSV path (default: out + .csv)");

  EvolveArgs evolve;
  auto* cmd_e = app.add_subcommand(
      "evolve", "assess medium evolution from fitted mixture parameters");
  cmd_e->add_option("--params", evolve.params, "mixture JSON (inline or a path)")
      ->required();
  cmd_e->add_option("--z-fr", evolve.z_fr, "selection threshold frequency")
      ->required();
  cmd_e->add_option("--delta-zfr", evolve.delta_zfr, "selection error");
  cmd_e->add_option("-o,--out", evolve.out, "output assessment JSON");

  PlotDataArgs plot;
  auto* cmd_p = app.add_subcommand(
      "plotdata", "emit observed vs model pmf/cdf columns for plotting");
  cmd_p->add_option("--report", plot.report_path, "fit report JSON")->required();
  cmd_p->add_option("--hist", plot.hist_path, "histogram JSON")->required();
  cmd_p->add_option("-o,--out", plot.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (cmd_ing->parsed()) return cmd_ingest(ingest);
    if (cmd_f->parsed()) return cmd_fit(fit);
    if (cmd_cmp->parsed()) return cmd_compare(compare);
    if (cmd_g->parsed()) return cmd_gen(gen);
    if (cmd_s->parsed()) return cmd_simulate(sim);
    if (cmd_e->parsed()) return cmd_evolve(evolve);
    if (cmd_p->parsed()) return cmd_plotdata(plot);
  } catch (const repfreq::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const repfreq::ParameterError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const repfreq::ConvergenceError& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  } catch (const repfreq::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}
