#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli/io.hpp"
#include "nef/errors.hpp"
#include "nef/estimation.hpp"
#include "nef/mp_sums.hpp"
#include "nef/nef.hpp"
#include "nef/rng.hpp"
#include "nef/stability.hpp"
#include "nef/study.hpp"

namespace nef::cli {

namespace {

struct Common {
  std::string family = "gamma";
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  bool json = false;
};

struct FitOptions {
  std::string input;
  bool prices = false;
  bool returns = false;
  bool plots = false;
  double epsilon = 1e-4;
  int max_iter = 500;
  std::size_t qq_draws = 1000000;
};

struct ParamOptions {
  double mu = 0.0;
  double sigma2 = 1.0;
  double phi = 1.0;

  NefParams params() const { return NefParams{mu, sigma2, phi}; }
};

struct StudyOptions {
  ParamOptions truth{3.0, 4.0, 2.0};
  std::size_t n = 1000;
  std::size_t replicas = 1000;
  double epsilon = 1e-4;
  int max_iter = 500;
};

struct SumsOptions {
  std::string lambdas = "30,50,500";
  double phi = 2.0;
  std::string summand = "exp:1";
  std::size_t replicas = 500;
  int bins = 40;
};

struct StabilityOptions {
  double phi = 2.0;
  std::string stable = "normal:0,1";
  double tmin = -20.0;
  double tmax = 20.0;
  int points = 401;
};

struct DensityOptions {
  ParamOptions p;
  std::optional<double> from;
  std::optional<double> to;
  int points = 2001;
};

struct SampleOptions {
  ParamOptions p;
  std::size_t n = 1000;
};

Json params_json(const NefParams& p) {
  return Json{{"mu", p.mu}, {"sigma2", p.sigma2}, {"phi", p.phi}};
}

Json std_errors_json(const std::optional<StdErrors>& se) {
  if (!se) return nullptr;
  return Json{{"mu", (*se)[0]}, {"sigma2", (*se)[1]}, {"phi", (*se)[2]}};
}

Json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

Json meta(const std::string& command, const Common& c, Json flags) {
  Json all{{"family", c.family}, {"seed", c.seed}, {"out", c.out}, {"json", c.json}};
  for (auto& [k, v] : flags.items()) all[k] = v;
  return Json{{"program", "nefstat"},
              {"version", NEF_VERSION},
              {"command", command},
              {"seed", c.seed},
              {"flags", all}};
}

MixingFamily family_with_density(const std::string& name) {
  try {
    MixingFamily fam = MixingFamily::from_name(name);
    fam.require_density("this command");
    return fam;
  } catch (const UnsupportedFamily& e) {
    throw InputError(e.what());
  }
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    x[static_cast<std::size_t>(k)] =
        points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  }
  return x;
}

double normal_pdf(double mu, double sigma2, double y) {
  const double z = y - mu;
  return std::exp(-0.5 * z * z / sigma2) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

// Type-7 sample quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;

  Histogram(double lo_, double hi_, int bins) : lo(lo_), counts(static_cast<std::size_t>(bins)) {
    width = hi_ > lo_ ? (hi_ - lo_) / bins : 1.0;
  }
  void add(double y) {
    auto k = static_cast<long>(std::floor((y - lo) / width));
    k = std::clamp<long>(k, 0, static_cast<long>(counts.size()) - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  double edge(std::size_t k) const { return lo + width * static_cast<double>(k); }
};

// ---- fit ----

int cmd_fit(const FitOptions& o, const Common& c, std::ostream& out, std::ostream& err) {
  const MixingFamily fam = family_with_density(c.family);
  if (o.plots && c.out.empty()) throw InputError("--plots needs --out PATH");
  const std::vector<double> raw = read_column(o.input);
  const std::vector<double> data = o.prices ? log_returns(raw) : raw;
  if (data.size() < 3) throw InputError("fit needs at least 3 observations");

  Json report;
  report["meta"] = meta("fit", c,
                        Json{{"input", o.input},
                             {"prices", o.prices},
                             {"plots", o.plots},
                             {"epsilon", o.epsilon},
                             {"max_iter", o.max_iter},
                             {"qq_draws", o.qq_draws}});
  report["input"] = Json{{"path", o.input},
                         {"mode", o.prices ? "prices" : "returns"},
                         {"rows", raw.size()},
                         {"n", data.size()}};

  const SampleMoments m = SampleMoments::of(data);
  if (!(m.m2 - m.m1 * m.m1 > 0.0)) throw InputError("input has zero or non-finite variance");
  try {
    const MomentEstimate mm = method_of_moments(data, fam);
    report["mm"] = Json{{"params", params_json(mm.params)},
                        {"multiple_roots", mm.multiple_roots}};
  } catch (const InadmissibleEstimate& e) {
    report["mm"] = Json{{"error", e.what()}};
  }

  const FitResult normal = normal_mle(data);
  report["normal"] = Json{{"params", Json{{"mu", normal.params.mu}, {"sigma2", normal.params.sigma2}}},
                          {"std_errors", Json{{"mu", (*normal.std_errors)[0]},
                                              {"sigma2", (*normal.std_errors)[1]}}},
                          {"loglik", normal.loglik_trace.back()}};

  EmOptions opts;
  opts.epsilon = o.epsilon;
  opts.max_iter = o.max_iter;
  FitResult em;
  try {
    em = em_fit(data, fam, opts);
  } catch (const std::exception& e) {
    report["em"] = nullptr;
    report["error"] = std::string("EM failed: ") + e.what();
    emit(c, out, dump(report));
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  report["em"] = Json{{"params", params_json(em.params)},
                      {"std_errors", std_errors_json(em.std_errors)},
                      {"iterations", em.iterations},
                      {"converged", em.converged},
                      {"loglik", em.loglik_trace.back()},
                      {"init", params_json(em.init)},
                      {"init_from_moments", em.init_from_moments},
                      {"loglik_trace", em.loglik_trace}};
  report["loglik"] = Json{{"em", em.loglik_trace.back()},
                          {"normal", normal.loglik_trace.back()}};
  if (!em.std_errors) err << "warning: observed information is singular\n";

  if (o.plots) {
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    const Json plot_meta = report["meta"];

    const int bins = std::clamp(static_cast<int>(std::ceil(std::sqrt(sorted.size()))), 10, 100);
    Histogram h(sorted.front(), sorted.back(), bins);
    for (double y : sorted) h.add(y);
    CsvWriter hist(plot_meta, {"bin_lo", "bin_hi", "count", "density", "fitted_pdf", "normal_pdf"});
    const double n = static_cast<double>(sorted.size());
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      const double lo = h.edge(k);
      const double mid = lo + 0.5 * h.width;
      hist.row({lo, lo + h.width, static_cast<double>(h.counts[k]),
                static_cast<double>(h.counts[k]) / (n * h.width),
                nef_pdf(em.params, fam, mid),
                normal_pdf(normal.params.mu, normal.params.sigma2, mid)});
    }
    write_file(c.out + ".hist.csv", hist.str());

    Rng rng = stream_for(c.seed, 0);
    std::vector<double> draws = sample_nef(em.params, fam, o.qq_draws, rng);
    std::sort(draws.begin(), draws.end());
    CsvWriter qq(plot_meta, {"level", "empirical", "fitted"});
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const double level = static_cast<double>(k + 1) / (n + 1.0);
      qq.row({level, sorted[k], quantile_sorted(draws, level)});
    }
    write_file(c.out + ".qq.csv", qq.str());
  }

  emit(c, out, dump(report));
  return kOk;
}

// ---- mc-study ----

int cmd_mc_study(const StudyOptions& o, const Common& c, std::ostream& out, std::ostream& err) {
  StudyConfig cfg;
  cfg.family = family_with_density(c.family);
  cfg.truth = o.truth.params();
  try {
    cfg.truth.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  if (o.n < 3) throw InputError("--n must be at least 3");
  if (o.replicas < 1) throw InputError("--replicas must be at least 1");
  cfg.n = o.n;
  cfg.replicas = o.replicas;
  cfg.seed = c.seed;
  cfg.em.epsilon = o.epsilon;
  cfg.em.max_iter = o.max_iter;

  const auto start = std::chrono::steady_clock::now();
  const std::vector<ReplicaOutcome> outcomes = run_replicas(cfg);
  const StudySummary s = summarize(cfg, outcomes);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "mc-study: " << cfg.replicas << " replicas in " << seconds << " s\n";

  const Json m = meta("mc-study", c,
                      Json{{"mu", o.truth.mu},
                           {"sigma2", o.truth.sigma2},
                           {"phi", o.truth.phi},
                           {"n", o.n},
                           {"replicas", o.replicas},
                           {"epsilon", o.epsilon},
                           {"max_iter", o.max_iter}});
  Json params = Json::array();
  const char* names[3] = {"mu", "sigma2", "phi"};
  for (std::size_t j = 0; j < 3; ++j) {
    const ParameterSummary& ps = s.params[j];
    params.push_back(Json{{"name", names[j]},
                          {"truth", ps.truth},
                          {"mean", s.used > 0 ? Json(ps.mean) : Json(nullptr)},
                          {"bias", s.used > 0 ? Json(ps.bias) : Json(nullptr)},
                          {"empirical_sd", optional_json(ps.empirical_sd)},
                          {"mean_std_error", optional_json(ps.mean_std_error)}});
  }
  Json report{{"meta", m},
              {"summary",
               Json{{"requested", s.requested},
                    {"used", s.used},
                    {"discarded", Json{{"mm_inadmissible", s.discarded_mm_inadmissible},
                                       {"fit_failed", s.discarded_fit_failed}}},
                    {"mm_inadmissible_rate", s.mm_inadmissible_rate},
                    {"mm_multiple_roots", s.mm_multiple_roots},
                    {"std_errors_unavailable", s.std_errors_unavailable},
                    {"not_converged", s.not_converged},
                    {"monotonicity_violations", s.monotonicity_violations},
                    {"parameters", params}}}};

  if (!c.out.empty()) {
    CsvWriter rows(m, {"replica", "status", "mu", "sigma2", "phi", "se_mu", "se_sigma2",
                       "se_phi", "iterations", "converged"});
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      const ReplicaOutcome& o2 = outcomes[r];
      const char* status = o2.status == ReplicaStatus::Ok              ? "ok"
                           : o2.status == ReplicaStatus::MmInadmissible ? "mm_inadmissible"
                                                                        : "fit_failed";
      std::vector<std::string> cells{std::to_string(r), status};
      if (o2.status == ReplicaStatus::Ok) {
        cells.push_back(fmt(o2.estimate.mu));
        cells.push_back(fmt(o2.estimate.sigma2));
        cells.push_back(fmt(o2.estimate.phi));
        for (std::size_t j = 0; j < 3; ++j) {
          cells.push_back(o2.std_errors ? fmt((*o2.std_errors)[j]) : "");
        }
        cells.push_back(std::to_string(o2.iterations));
        cells.push_back(o2.converged ? "1" : "0");
      } else {
        cells.resize(cells.size() + 8);
      }
      rows.row(cells);
    }
    write_file(c.out + ".replicas.csv", rows.str());
  }
  emit(c, out, dump(report));
  return kOk;
}

// ---- sums-demo ----

int cmd_sums_demo(const SumsOptions& o, const Common& c, std::ostream& out, std::ostream&) {
  const MixingFamily fam = family_with_density(c.family);
  const std::vector<double> lambdas = parse_number_list(o.lambdas);
  for (double l : lambdas) {
    if (!(l > 0.0)) throw InputError("--lambdas must be positive");
  }
  if (!(o.phi > 0.0)) throw InputError("--phi must be positive");
  if (o.replicas < 1) throw InputError("--replicas must be at least 1");
  if (o.bins < 1) throw InputError("--bins must be at least 1");
  std::optional<SummandSpec> summand;
  try {
    summand = SummandSpec::parse(o.summand);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  const NefParams limit{summand->mu(), summand->sigma2(), o.phi};

  std::vector<std::vector<double>> samples;
  std::vector<double> ks;
  for (double l : lambdas) {
    const MpCountParams counts{l, o.phi, fam};
    samples.push_back(sample_normalized_sums(counts, *summand, o.replicas, c.seed));
    ks.push_back(ks_distance(samples.back(), limit, fam));
  }

  const Json m = meta("sums-demo", c,
                      Json{{"lambdas", lambdas},
                           {"phi", o.phi},
                           {"summand", summand->label()},
                           {"replicas", o.replicas},
                           {"bins", o.bins}});
  if (c.json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      rows.push_back(Json{{"lambda", lambdas[i]}, {"replicas", o.replicas}, {"ks_distance", ks[i]}});
    }
    emit(c, out, dump(Json{{"meta", m}, {"limit", params_json(limit)}, {"rows", rows}}));
  } else {
    CsvWriter table(m, {"lambda", "replicas", "ks_distance"});
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      table.row({lambdas[i], static_cast<double>(o.replicas), ks[i]});
    }
    emit(c, out, table.str());
  }

  if (!c.out.empty()) {
    double lo = samples.front().front();
    double hi = lo;
    CsvWriter raw(m, {"lambda", "replica", "value"});
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      for (std::size_t r = 0; r < samples[i].size(); ++r) {
        raw.row({lambdas[i], static_cast<double>(r), samples[i][r]});
        lo = std::min(lo, samples[i][r]);
        hi = std::max(hi, samples[i][r]);
      }
    }
    write_file(c.out + ".samples.csv", raw.str());

    CsvWriter hist(m, {"lambda", "bin_lo", "bin_hi", "density"});
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      Histogram h(lo, hi, o.bins);
      for (double y : samples[i]) h.add(y);
      for (std::size_t k = 0; k < h.counts.size(); ++k) {
        hist.row({lambdas[i], h.edge(k), h.edge(k) + h.width,
                  static_cast<double>(h.counts[k]) /
                      (static_cast<double>(o.replicas) * h.width)});
      }
    }
    write_file(c.out + ".hist.csv", hist.str());

    CsvWriter curve(m, {"y", "pdf"});
    for (double y : linspace(lo, hi, 401)) curve.row({y, nef_pdf(limit, fam, y)});
    write_file(c.out + ".limit.csv", curve.str());
  }
  return kOk;
}

// ---- stability-check ----

struct StableArg {
  StableCfSpec spec;
  std::string label;
};

StableArg parse_stable(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<double> v;
  if (colon != std::string::npos) v = parse_number_list(text.substr(colon + 1));
  try {
    if (kind == "normal" && v.size() == 2) {
      return {StableCfSpec::normal_drift(v[0], v[1]), text};
    }
    if (kind == "sym" && v.size() == 2) {
      return {StableCfSpec::symmetric(v[0], v[1]), text};
    }
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  throw InputError("--stable must look like normal:MU,SIGMA2 or sym:C,ALPHA");
}

int cmd_stability_check(const StabilityOptions& o, const Common& c, std::ostream& out,
                        std::ostream&) {
  const MixingFamily fam = family_with_density(c.family);
  if (!(o.phi > 0.0)) throw InputError("--phi must be positive");
  if (o.points < 1 || !(o.tmax >= o.tmin)) throw InputError("bad t-grid");
  const std::string& text = o.stable;
  const StableArg stable = parse_stable(text);
  const auto colon = text.find(':');
  const std::vector<double> v = parse_number_list(text.substr(colon + 1));

  // Direct closed form of the same law.
  auto direct = [&](double t) -> std::complex<double> {
    if (stable.spec.kind() == StableCfSpec::Kind::NormalDrift) {
      return nef_cf(NefParams{v[0], v[1], o.phi}, fam, t);
    }
    const double ct = v[0] * std::pow(std::abs(t), v[1]) / o.phi;
    if (fam.tag() == FamilyTag::Gamma) return std::pow(1.0 + ct, -o.phi);
    return std::exp(o.phi * (1.0 - std::sqrt(1.0 + 2.0 * ct)));
  };

  const std::vector<double> grid = linspace(o.tmin, o.tmax, o.points);
  std::vector<std::complex<double>> composed;
  std::vector<std::complex<double>> closed;
  double max_err = 0.0;
  for (double t : grid) {
    composed.push_back(mp_stable_cf(fam, o.phi, stable.spec, t));
    closed.push_back(direct(t));
    max_err = std::max(max_err, std::abs(composed.back() - closed.back()));
  }

  Json m = meta("stability-check", c,
                Json{{"phi", o.phi}, {"stable", o.stable}, {"tmin", o.tmin},
                     {"tmax", o.tmax}, {"points", o.points}});
  if (c.json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows.push_back(Json{{"t", grid[i]},
                          {"composed", {composed[i].real(), composed[i].imag()}},
                          {"direct", {closed[i].real(), closed[i].imag()}},
                          {"abs_error", std::abs(composed[i] - closed[i])}});
    }
    emit(c, out, dump(Json{{"meta", m}, {"max_abs_error", max_err}, {"rows", rows}}));
  } else {
    m["max_abs_error"] = max_err;
    CsvWriter csv(m, {"t", "composed_re", "composed_im", "direct_re", "direct_im", "abs_error"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.row({grid[i], composed[i].real(), composed[i].imag(), closed[i].real(),
               closed[i].imag(), std::abs(composed[i] - closed[i])});
    }
    emit(c, out, csv.str());
  }
  return kOk;
}

// ---- density / sample ----

NefParams checked(const ParamOptions& p) {
  const NefParams params = p.params();
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return params;
}

int cmd_density(const DensityOptions& o, const Common& c, std::ostream& out, std::ostream&) {
  const MixingFamily fam = family_with_density(c.family);
  const NefParams p = checked(o.p);
  if (o.points < 2) throw InputError("--points must be at least 2");
  const Cumulants k = nef_cumulants(p, fam);
  const double sd = std::sqrt(k.k2);
  const double lo = o.from.value_or(k.k1 - 40.0 * sd);
  const double hi = o.to.value_or(k.k1 + 40.0 * sd);
  if (!(hi > lo)) throw InputError("--to must exceed --from");

  const std::vector<double> grid = linspace(lo, hi, o.points);
  std::vector<double> pdf;
  pdf.reserve(grid.size());
  for (double y : grid) pdf.push_back(nef_pdf(p, fam, y));

  const Json m = meta("density", c,
                      Json{{"mu", p.mu}, {"sigma2", p.sigma2}, {"phi", p.phi},
                           {"from", lo}, {"to", hi}, {"points", o.points}});
  if (c.json) {
    emit(c, out, dump(Json{{"meta", m}, {"y", grid}, {"pdf", pdf}}));
  } else {
    CsvWriter csv(m, {"y", "pdf"});
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({grid[i], pdf[i]});
    emit(c, out, csv.str());
  }
  return kOk;
}

int cmd_sample(const SampleOptions& o, const Common& c, std::ostream& out, std::ostream&) {
  const MixingFamily fam = family_with_density(c.family);
  const NefParams p = checked(o.p);
  Rng rng = stream_for(c.seed, 0);
  const std::vector<double> y = sample_nef(p, fam, o.n, rng);
  const Json m = meta("sample", c,
                      Json{{"mu", p.mu}, {"sigma2", p.sigma2}, {"phi", p.phi}, {"n", o.n}});
  if (c.json) {
    emit(c, out, dump(Json{{"meta", m}, {"y", y}}));
  } else {
    CsvWriter csv(m, {"y"});
    for (double v : y) csv.row({v});
    emit(c, out, csv.str());
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--family", c.family, "mixing family: gamma | ig")->capture_default_str();
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (stdout if omitted); side files use it as prefix");
  sub->add_flag("--json", c.json, "JSON instead of CSV for the primary output");
}

void add_params(CLI::App* sub, ParamOptions& p) {
  sub->add_option("--mu", p.mu)->capture_default_str();
  sub->add_option("--sigma2", p.sigma2)->capture_default_str();
  sub->add_option("--phi", p.phi)->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normal-exponential-family laws: fitting, simulation and checks", "nefstat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(NEF_VERSION));

  Common common;
  FitOptions fit;
  StudyOptions study;
  SumsOptions sums;
  StabilityOptions stab;
  DensityOptions dens;
  SampleOptions samp;

  auto* fit_cmd = app.add_subcommand("fit", "fit MM, EM and normal MLE to a return series");
  add_common(fit_cmd, common);
  fit_cmd->add_option("input", fit.input, "CSV with one numeric column")->required();
  auto* prices = fit_cmd->add_flag("--prices", fit.prices, "input holds prices; fit log-returns");
  auto* returns = fit_cmd->add_flag("--returns", fit.returns, "input holds returns (default)");
  prices->excludes(returns);
  fit_cmd->add_flag("--plots", fit.plots, "write <out>.hist.csv and <out>.qq.csv");
  fit_cmd->add_option("--epsilon", fit.epsilon)->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.max_iter)->capture_default_str();
  fit_cmd->add_option("--qq-draws", fit.qq_draws)->capture_default_str();

  auto* study_cmd = app.add_subcommand("mc-study", "Monte Carlo study of the EM estimator");
  add_common(study_cmd, common);
  add_params(study_cmd, study.truth);
  study_cmd->add_option("--n", study.n)->capture_default_str();
  study_cmd->add_option("--replicas", study.replicas)->capture_default_str();
  study_cmd->add_option("--epsilon", study.epsilon)->capture_default_str();
  study_cmd->add_option("--max-iter", study.max_iter)->capture_default_str();

  auto* sums_cmd = app.add_subcommand("sums-demo", "normalized mixed-Poisson sums vs the limit law");
  add_common(sums_cmd, common);
  sums_cmd->add_option("--lambdas", sums.lambdas)->capture_default_str();
  sums_cmd->add_option("--phi", sums.phi)->capture_default_str();
  sums_cmd->add_option("--summand", sums.summand, "exp:MEAN | normal:MU,SIGMA2")->capture_default_str();
  sums_cmd->add_option("--replicas", sums.replicas)->capture_default_str();
  sums_cmd->add_option("--bins", sums.bins)->capture_default_str();

  auto* stab_cmd = app.add_subcommand("stability-check", "composed vs direct characteristic functions");
  add_common(stab_cmd, common);
  stab_cmd->add_option("--phi", stab.phi)->capture_default_str();
  stab_cmd->add_option("--stable", stab.stable, "normal:MU,SIGMA2 | sym:C,ALPHA")->capture_default_str();
  stab_cmd->add_option("--tmin", stab.tmin)->capture_default_str();
  stab_cmd->add_option("--tmax", stab.tmax)->capture_default_str();
  stab_cmd->add_option("--points", stab.points)->capture_default_str();

  auto* dens_cmd = app.add_subcommand("density", "tabulate the density on a grid");
  add_common(dens_cmd, common);
  add_params(dens_cmd, dens.p);
  dens_cmd->add_option("--from", dens.from);
  dens_cmd->add_option("--to", dens.to);
  dens_cmd->add_option("--points", dens.points)->capture_default_str();

  auto* samp_cmd = app.add_subcommand("sample", "draw from the law");
  add_common(samp_cmd, common);
  add_params(samp_cmd, samp.p);
  samp_cmd->add_option("--n", samp.n)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, common, out, err);
    if (*study_cmd) return cmd_mc_study(study, common, out, err);
    if (*sums_cmd) return cmd_sums_demo(sums, common, out, err);
    if (*stab_cmd) return cmd_stability_check(stab, common, out, err);
    if (*dens_cmd) return cmd_density(dens, common, out, err);
    if (*samp_cmd) return cmd_sample(samp, common, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedFamily& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace nef::cli
