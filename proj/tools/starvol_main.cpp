// starvol: star-body volume laboratory command line front end.
//
// Subcommands:
//   run       config-driven experiment suite (CSV reports + summary)
//   constant  special-function constants (omega, b, c, d, a)
//   volume    one-shot volume estimate of a geometric body spec
//   radial    radial function of a body spec at a point
//
// Exit codes: 0 ok, 1 error, 2 at least one VIOLATION verdict.

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "starvol/config.hpp"
#include "starvol/experiments.hpp"
#include "starvol/runner.hpp"
#include "starvol/special.hpp"
#include "starvol/volume.hpp"

namespace {

using namespace starvol;

/// Geometric body specs for the one-shot subcommands:
///   unit-disc | unit-ball-3 | ball:<n>:<R> | box:<n>:<a1,...,an> | shifted-disc:<R>:<cx>,<cy>
StarBody parse_body_spec(const std::string& spec) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
  };
  if (spec == "unit-disc") return ball_star(2, 1.0);
  if (spec == "unit-ball-3") return ball_star(3, 1.0);
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "ball")
    return ball_star(std::stoi(parts[1]), std::stod(parts[2]));
  if (parts.size() == 3 && parts[0] == "box") {
    const int n = std::stoi(parts[1]);
    std::vector<double> a;
    for (const auto& t : split(parts[2], ',')) a.push_back(std::stod(t));
    return indicator_star_body(uniform_box(n, a));
  }
  if (parts.size() == 3 && parts[0] == "shifted-disc") {
    const double R = std::stod(parts[1]);
    const auto cs = split(parts[2], ',');
    Eigen::VectorXd c(2);
    c << std::stod(cs.at(0)), std::stod(cs.at(1));
    return indicator_star_body(uniform_ball(2, R, c));
  }
  throw CLI::ValidationError("body", "unknown body spec '" + spec + "'");
}

void print_estimate(const Estimate& e, double wall_s) {
  std::printf("%s\n", format_double(e.value).c_str());
  std::fprintf(stderr, "method,value,stderr,n_samples,seed,wall_time\n");
  std::fprintf(stderr, "%s,%s,%s,%zu,%llu,%s\n", e.method.c_str(), format_double(e.value).c_str(),
               format_double(e.std_error).c_str(), e.sample_count,
               static_cast<unsigned long long>(e.seed), format_double(wall_s).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"starvol: stochastic star-body volume laboratory"};
  app.require_subcommand(1);

  // --- run -------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run a config-driven experiment suite");
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int workers = -1;
  std::string out_dir;
  run->add_option("--config", config_path, "JSON run config")->required();
  run->add_option("--set", overrides, "dotted key=value override (repeatable)");
  run->add_option("--master_seed", seed_override, "override the master seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--workers", workers, "worker threads (0 = hardware)");
  run->add_option("--out", out_dir, "output directory override");

  // --- constant ----------------------------------------------------------
  auto* constant = app.add_subcommand("constant", "print a special-function constant");
  std::string const_name;
  std::vector<double> const_args;
  constant->add_option("name", const_name, "omega | b | c | d | a")->required();
  constant->add_option("args", const_args, "numeric arguments");

  // --- volume ------------------------------------------------------------
  auto* volume = app.add_subcommand("volume", "one-shot volume estimate");
  std::string method, body_spec_v;
  int resolution = 1024;
  std::size_t budget = 200000;
  std::uint64_t seed = 1;
  volume->add_option("method", method, "radial | gaussian | exponential")->required();
  volume->add_option("body", body_spec_v, "body spec (e.g. unit-disc, ball:3:2)")->required();
  volume->add_option("--resolution", resolution, "sphere grid resolution");
  volume->add_option("--budget", budget, "Monte Carlo budget");
  volume->add_option("--seed", seed, "random seed");

  // --- radial ------------------------------------------------------------
  auto* radial = app.add_subcommand("radial", "radial function of a body at a point");
  std::string body_spec_r;
  std::vector<double> coords;
  radial->add_option("body", body_spec_r, "body spec")->required();
  radial->add_option("x", coords, "point coordinates")->required()->expected(-2);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<std::string> all = overrides;
      if (seed_set) all.push_back("master_seed=" + std::to_string(seed_override));
      if (workers >= 0) all.push_back("workers=" + std::to_string(workers));
      if (!out_dir.empty()) all.push_back("output_dir=" + out_dir);
      const RunConfig cfg = load_config(config_path, all);
      const RunResult result = run_config(cfg, std::cerr);
      if (result.errors > 0) return 1;
      return result.violations > 0 ? 2 : 0;
    }
    if (*constant) {
      auto need = [&](std::size_t k) {
        if (const_args.size() != k)
          throw CLI::ValidationError("constant", "expected " + std::to_string(k) + " arguments");
      };
      if (const_name == "omega") {
        need(1);
        std::printf("%s\n", format_double(unit_ball_volume(static_cast<int>(const_args[0]))).c_str());
      } else if (const_name == "b") {
        need(2);
        std::printf("%s\n",
                    format_double(gaussian_neg_moment(static_cast<int>(const_args[0]), const_args[1]))
                        .c_str());
      } else if (const_name == "c" || const_name == "d" || const_name == "a") {
        // c <n> <p> | d <p> | a <N> <n> <p>
        NtConstants nt{};
        if (const_name == "c") {
          need(2);
          nt = nt_constants(1, static_cast<int>(const_args[0]), const_args[1]);
          std::printf("%s\n", format_double(nt.c_np).c_str());
        } else if (const_name == "d") {
          need(1);
          nt = nt_constants(1, 1, const_args[0]);
          std::printf("%s\n", format_double(nt.d_p).c_str());
        } else {
          need(3);
          nt = nt_constants(static_cast<int>(const_args[0]), static_cast<int>(const_args[1]),
                            const_args[2]);
          std::printf("%s\n", format_double(nt.a_Nnp).c_str());
        }
      } else {
        throw CLI::ValidationError("constant", "unknown constant '" + const_name + "'");
      }
      return 0;
    }
    if (*volume) {
      const StarBody K = parse_body_spec(body_spec_v);
      const auto t0 = std::chrono::steady_clock::now();
      Estimate e;
      RngStream rng(seed, 0);
      if (method == "radial") {
        e = volume_radial(K, sphere_quadrature(K.dim(), resolution, GridMode::deterministic));
      } else if (method == "gaussian") {
        e = volume_gaussian_extrapolated(K, budget, rng);
      } else if (method == "exponential") {
        e = volume_exponential_mc(K, 1.0, budget, rng);
      } else {
        throw CLI::ValidationError("volume", "unknown method '" + method + "'");
      }
      e.seed = seed;
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      print_estimate(e, wall);
      return 0;
    }
    if (*radial) {
      const StarBody K = parse_body_spec(body_spec_r);
      if (static_cast<int>(coords.size()) != K.dim())
        throw CLI::ValidationError("radial", "point dimension does not match the body");
      Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(coords.data(),
                                                            static_cast<long>(coords.size()));
      std::printf("%s\n", format_double(K.rho(x)).c_str());
      return 0;
    }
  } catch (const CLI::Error& err) {
    return app.exit(err);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 1;
}
