#include "starvol/runner.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "starvol/experiments.hpp"
#include "starvol/parallel.hpp"

namespace starvol {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

struct Ctx {
  const RunConfig& cfg;
  std::filesystem::path out;
  int workers;
  RunResult* result;
};

void write_comparison_csv(const Ctx& ctx, const std::string& name, const ComparisonReport& rep) {
  const auto path = ctx.out / (name + ".csv");
  std::ofstream f(path);
  f << "experiment,verdict,lhs,lhs_stderr,rhs,rhs_stderr,margin,margin_stderr,lhs_samples,"
       "rhs_samples,master_seed,config_hash\n";
  f << name << ',' << verdict_name(rep.verdict) << ',' << format_double(rep.lhs.value) << ','
    << format_double(rep.lhs.std_error) << ',' << format_double(rep.rhs.value) << ','
    << format_double(rep.rhs.std_error) << ',' << format_double(rep.margin) << ','
    << format_double(rep.margin_std_error) << ',' << rep.lhs.sample_count << ','
    << rep.rhs.sample_count << ',' << ctx.cfg.master_seed << ',' << ctx.cfg.config_hash << '\n';
  ctx.result->files_written.push_back(path.string());
}

void write_trend_csv(const Ctx& ctx, const std::string& name, const TrendReport& rep) {
  const auto path = ctx.out / (name + ".csv");
  std::ofstream f(path);
  f << "experiment,parameter,value,stderr,target,target_stderr,rel_error,master_seed,config_hash\n";
  for (std::size_t i = 0; i < rep.parameters.size(); ++i) {
    f << name << ',' << format_double(rep.parameters[i]) << ',' << format_double(rep.values[i])
      << ',' << format_double(rep.value_se[i]) << ',' << format_double(rep.target) << ','
      << format_double(rep.target_se) << ',' << format_double(rep.rel_errors[i]) << ','
      << ctx.cfg.master_seed << ',' << ctx.cfg.config_hash << '\n';
  }
  ctx.result->files_written.push_back(path.string());
}

template <typename T>
T get_or(const json& e, const char* key, T dflt) {
  return e.contains(key) ? e.at(key).get<T>() : dflt;
}

std::string run_one(const Ctx& ctx, const json& e, std::size_t index, std::ostream& log) {
  const std::string type = e.at("type").get<std::string>();
  const std::string name = e.at("name").get<std::string>();
  RngStream rng(ctx.cfg.master_seed, 0x1000 + index);

  auto density = [&](const char* key) { return ctx.cfg.densities.at(e.at(key).get<std::string>()); };

  if (type == "rearrangement" || type == "ball-flattening") {
    RearrangementSpec spec;
    spec.name = name;
    spec.f = density("density");
    if (e.contains("body")) spec.bodies = {ctx.cfg.bodies.at(e.at("body").get<std::string>())};
    spec.p = e.at("p").get<double>();
    spec.alpha = get_or(e, "alpha", -1.0);
    spec.empirical = get_or<std::string>(e, "mode", "exact") == "empirical";
    spec.N = get_or(e, "N", 8);
    spec.trials = get_or<std::size_t>(e, "trials", 10000);
    spec.quad_resolution = get_or(e, "quad_resolution", 256);
    spec.control_variates = get_or(e, "control_variates", true);
    spec.allow_thin_blocks = get_or(e, "allow_thin_blocks", false);
    spec.workers = ctx.workers;
    const ComparisonReport rep = (type == "rearrangement")
                                     ? rearrangement_inequality(spec, rng)
                                     : ball_flattening_inequality(spec, rng);
    write_comparison_csv(ctx, name, rep);
    if (rep.verdict == Verdict::violation) ++ctx.result->violations;
    log << name << ": " << verdict_name(rep.verdict) << " (margin " << format_double(rep.margin)
        << " +- " << format_double(rep.margin_std_error) << ")\n";
    return verdict_name(rep.verdict);
  }
  if (type == "busemann") {
    BusemannSpec spec;
    spec.name = name;
    spec.f = density("density");
    spec.quad_resolution = get_or(e, "quad_resolution", 2048);
    spec.mc_directions = get_or<std::size_t>(e, "mc_directions", 4096);
    const ComparisonReport rep = busemann_ratio(spec, rng);
    write_comparison_csv(ctx, name, rep);
    if (rep.verdict == Verdict::violation) ++ctx.result->violations;
    const double ratio = rep.lhs.value / rep.rhs.value;
    log << name << ": " << verdict_name(rep.verdict) << " (ratio " << format_double(ratio) << ")\n";
    return verdict_name(rep.verdict);
  }
  if (type == "convergence") {
    StudySpec spec;
    spec.name = name;
    spec.f = density("density");
    const std::string kind = e.at("kind").get<std::string>();
    spec.kind = kind == "N" ? StudyKind::N_to_infinity
                            : (kind == "alpha" ? StudyKind::alpha_to_zero : StudyKind::m_to_infinity);
    spec.p = e.at("p").get<double>();
    spec.alpha = get_or(e, "alpha", 0.1);
    if (e.contains("parameters")) spec.parameters = e.at("parameters").get<std::vector<double>>();
    if (spec.parameters.empty()) {
      if (spec.kind == StudyKind::N_to_infinity) spec.parameters = {4, 8, 16, 32, 64};
      if (spec.kind == StudyKind::alpha_to_zero) spec.parameters = {0.5, 0.2, 0.1, 0.05};
      if (spec.kind == StudyKind::m_to_infinity) spec.parameters = {2, 4, 8, 16};
    }
    spec.N = get_or(e, "N", 8);
    spec.trials = get_or<std::size_t>(e, "trials", 4000);
    spec.target_trials = get_or<std::size_t>(e, "target_trials", 4096);
    spec.quad_resolution = get_or(e, "quad_resolution", 256);
    spec.control_variates = get_or(e, "control_variates", true);
    spec.workers = ctx.workers;
    const TrendReport rep = convergence_study(spec, rng);
    write_trend_csv(ctx, name, rep);
    log << name << ": trend " << (rep.monotone ? "nonincreasing" : "NOT-MONOTONE")
        << ", final rel err " << format_double(rep.final_relative_error);
    if (rep.target_se > 0.0 || rep.value_se.back() > 0.0)
      log << ", ci overlap " << (rep.final_ci_overlap ? "yes" : "no");
    log << "\n";
    return rep.monotone ? "trend-ok" : "trend-not-monotone";
  }
  if (type == "moment-bound") {
    MomentBoundSpec spec;
    spec.name = name;
    spec.f = density("density");
    spec.body = ctx.cfg.bodies.at(e.at("body").get<std::string>());
    spec.p = e.at("p").get<double>();
    spec.epsilon = get_or(e, "epsilon", 0.5);
    if (e.contains("Ns")) spec.Ns = e.at("Ns").get<std::vector<int>>();
    spec.trials = get_or<std::size_t>(e, "trials", 2000);
    spec.directions = get_or(e, "directions", 32);
    spec.allow_thin_blocks = get_or(e, "allow_thin_blocks", false);
    spec.workers = ctx.workers;
    const TrendReport rep = moment_bound_probe(spec, rng);
    write_trend_csv(ctx, name, rep);
    log << name << ": " << (rep.growth_flagged ? "GROWTH-FLAGGED" : "bounded") << "\n";
    return rep.growth_flagged ? "growth-flagged" : "bounded";
  }
  // cefpp
  CefppSpec spec;
  spec.name = name;
  for (const auto& cj : e.at("columns"))
    spec.columns.push_back(ctx.cfg.densities.at(cj.get<std::string>()));
  spec.C = ctx.cfg.bodies.at(e.at("body").get<std::string>());
  spec.nu = get_or<std::string>(e, "nu", "gaussian") == "gaussian" ? RadialMeasure::gaussian
                                                                   : RadialMeasure::lebesgue_ball;
  spec.ball_radius = get_or(e, "ball_radius", 2.0);
  spec.flatten_rhs = get_or(e, "flatten", false);
  spec.trials = get_or<std::size_t>(e, "trials", 2000);
  spec.nu_budget = get_or<std::size_t>(e, "nu_budget", 512);
  spec.workers = ctx.workers;
  const ComparisonReport rep = cefpp_probe(spec, rng);
  write_comparison_csv(ctx, name, rep);
  if (rep.verdict == Verdict::violation) ++ctx.result->violations;
  log << name << ": " << verdict_name(rep.verdict) << "\n";
  return verdict_name(rep.verdict);
}

}  // namespace

RunResult run_config(const RunConfig& cfg, std::ostream& log) {
  RunResult result;
  Ctx ctx{cfg, std::filesystem::path(cfg.output_dir),
          cfg.workers > 0 ? cfg.workers : default_workers(), &result};
  std::filesystem::create_directories(ctx.out);
  {
    std::ofstream rc(ctx.out / "resolved_config.json");
    rc << cfg.resolved_text << "\n";
    result.files_written.push_back((ctx.out / "resolved_config.json").string());
  }
  std::ofstream summary(ctx.out / "summary.txt");
  summary << "config_hash " << cfg.config_hash << "\n";
  summary << "master_seed " << cfg.master_seed << "\n";
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    const json e = json::parse(cfg.experiments[i]);
    const std::string name = e.at("name").get<std::string>();
    try {
      const std::string status = run_one(ctx, e, i, log);
      summary << name << " " << status << "\n";
    } catch (const std::exception& err) {
      ++result.errors;
      summary << name << " ERROR " << err.what() << "\n";
      log << name << ": ERROR " << err.what() << "\n";
    }
  }
  result.files_written.push_back((ctx.out / "summary.txt").string());
  return result;
}

}  // namespace starvol
