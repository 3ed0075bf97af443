#include "starvol/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace starvol {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at '" + path + "': " + what);
}

void require_keys(const json& j, const std::string& path, const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (required.count(key) == 0 && optional.count(key) == 0)
      fail(path + "." + key, "unknown key");
  }
  for (const auto& key : required)
    if (!j.contains(key)) fail(path, "missing required key '" + key + "'");
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int intval(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "." + std::to_string(i)));
  return out;
}

}  // namespace

namespace detail {

Density density_from_json(const json& j, const std::string& path) {
  require_keys(j, path, {"family"}, {"n", "radius", "center", "halfwidths", "r_inner", "r_outer",
                                     "sigma", "cutoff", "components", "weights", "path", "box_lo",
                                     "box_hi", "resolution", "values"});
  const std::string fam = j.at("family").get<std::string>();
  auto n_of = [&](int dflt = 0) {
    if (!j.contains("n")) {
      if (dflt > 0) return dflt;
      fail(path, "missing 'n'");
    }
    return intval(j.at("n"), path + ".n");
  };
  if (fam == "uniform-ball" || fam == "shifted-uniform-ball") {
    const int n = n_of();
    Eigen::VectorXd c;
    if (j.contains("center")) {
      const auto cv = vec(j.at("center"), path + ".center");
      c = Eigen::Map<const Eigen::VectorXd>(cv.data(), static_cast<long>(cv.size()));
    }
    return uniform_ball(n, j.contains("radius") ? num(j.at("radius"), path + ".radius") : 1.0, c);
  }
  if (fam == "uniform-cube") {
    const int n = n_of();
    std::vector<double> hw;
    if (j.contains("halfwidths"))
      hw = vec(j.at("halfwidths"), path + ".halfwidths");
    else
      hw.assign(static_cast<std::size_t>(n), 1.0);
    return uniform_box(n, std::move(hw));
  }
  if (fam == "uniform-annulus") {
    if (!j.contains("r_inner") || !j.contains("r_outer")) fail(path, "annulus needs r_inner and r_outer");
    return uniform_annulus(n_of(), num(j.at("r_inner"), path + ".r_inner"),
                           num(j.at("r_outer"), path + ".r_outer"));
  }
  if (fam == "truncated-gaussian") {
    const double sigma = j.contains("sigma") ? num(j.at("sigma"), path + ".sigma") : 1.0;
    const double cutoff = j.contains("cutoff") ? num(j.at("cutoff"), path + ".cutoff")
                                               : std::numeric_limits<double>::infinity();
    return truncated_gaussian(n_of(), sigma, cutoff);
  }
  if (fam == "mixture") {
    if (!j.contains("components") || !j.contains("weights"))
      fail(path, "mixture needs components and weights");
    std::vector<Density> comps;
    const auto& cj = j.at("components");
    if (!cj.is_array()) fail(path + ".components", "expected an array");
    for (std::size_t i = 0; i < cj.size(); ++i)
      comps.push_back(density_from_json(cj[i], path + ".components." + std::to_string(i)));
    return mixture(std::move(comps), vec(j.at("weights"), path + ".weights"));
  }
  if (fam == "custom-grid") {
    if (j.contains("path")) return load_grid_density(j.at("path").get<std::string>());
    for (const char* key : {"box_lo", "box_hi", "resolution", "values"})
      if (!j.contains(key)) fail(path, std::string("custom-grid needs '") + key + "' (or 'path')");
    return grid_density(num(j.at("box_lo"), path + ".box_lo"), num(j.at("box_hi"), path + ".box_hi"),
                        intval(j.at("resolution"), path + ".resolution"),
                        vec(j.at("values"), path + ".values"));
  }
  fail(path + ".family", "unknown density family '" + fam + "'");
}

SupportBody body_from_json(const json& j, const std::string& path) {
  require_keys(j, path, {"kind"}, {"dim", "halflen", "radius", "halfwidth", "scale", "m", "alpha",
                                   "lambda", "body", "a", "b", "angle"});
  const std::string kind = j.at("kind").get<std::string>();
  auto dim_of = [&](int dflt = 0) {
    if (!j.contains("dim")) {
      if (dflt > 0) return dflt;
      fail(path, "missing 'dim'");
    }
    return intval(j.at("dim"), path + ".dim");
  };
  if (kind == "segment")
    return segment(j.contains("halflen") ? num(j.at("halflen"), path + ".halflen") : 1.0);
  if (kind == "euclidean-ball")
    return euclidean_ball(dim_of(), j.contains("radius") ? num(j.at("radius"), path + ".radius") : 1.0);
  if (kind == "cube")
    return cube(dim_of(), j.contains("halfwidth") ? num(j.at("halfwidth"), path + ".halfwidth") : 1.0);
  if (kind == "cross-polytope")
    return cross_polytope(dim_of(), j.contains("scale") ? num(j.at("scale"), path + ".scale") : 1.0);
  if (kind == "segment-cross-l2") {
    if (!j.contains("m") || !j.contains("alpha")) fail(path, "segment-cross-l2 needs m and alpha");
    return segment_cross_l2(intval(j.at("m"), path + ".m"), num(j.at("alpha"), path + ".alpha"));
  }
  if (kind == "scaled") {
    if (!j.contains("lambda") || !j.contains("body")) fail(path, "scaled needs lambda and body");
    return scaled(num(j.at("lambda"), path + ".lambda"), body_from_json(j.at("body"), path + ".body"));
  }
  if (kind == "l2-sum") {
    if (!j.contains("a") || !j.contains("b")) fail(path, "l2-sum needs a and b");
    return l2_sum(body_from_json(j.at("a"), path + ".a"), body_from_json(j.at("b"), path + ".b"));
  }
  if (kind == "rotated") {
    if (!j.contains("angle") || !j.contains("body")) fail(path, "rotated needs angle and body");
    const SupportBody base = body_from_json(j.at("body"), path + ".body");
    if (base.dim() != 2) fail(path, "rotated supports 2-dimensional bodies");
    const double a = num(j.at("angle"), path + ".angle");
    Eigen::Matrix2d Q;
    Q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return rotated(base, Q);
  }
  fail(path + ".kind", "unknown body kind '" + kind + "'");
}

}  // namespace detail

namespace {

using detail::density_from_json;
using detail::body_from_json;

const std::set<std::string> kExperimentTypes = {"rearrangement", "ball-flattening", "busemann",
                                                "convergence", "moment-bound", "cefpp"};

void validate_experiment(const json& e, const std::string& path,
                         const std::map<std::string, Density>& densities,
                         const std::map<std::string, SupportBody>& bodies) {
  if (!e.is_object()) fail(path, "expected an object");
  if (!e.contains("type")) fail(path, "missing 'type'");
  const std::string type = e.at("type").get<std::string>();
  if (kExperimentTypes.count(type) == 0) fail(path + ".type", "unknown experiment type '" + type + "'");
  if (!e.contains("name")) fail(path, "missing 'name'");

  auto need_density = [&](const char* key) {
    if (!e.contains(key)) fail(path, std::string("missing '") + key + "'");
    const std::string name = e.at(key).get<std::string>();
    if (densities.count(name) == 0) fail(path + "." + key, "unknown density '" + name + "'");
  };
  auto need_body = [&](const char* key) {
    const std::string name = e.at(key).get<std::string>();
    if (bodies.count(name) == 0) fail(path + "." + key, "unknown body '" + name + "'");
  };

  if (type == "rearrangement" || type == "ball-flattening") {
    require_keys(e, path, {"type", "name", "density", "p"},
                 {"body", "alpha", "mode", "N", "trials", "quad_resolution", "control_variates",
                  "allow_thin_blocks"});
    need_density("density");
    if (e.contains("body")) need_body("body");
    const std::string mode = e.contains("mode") ? e.at("mode").get<std::string>() : "exact";
    if (mode != "exact" && mode != "empirical") fail(path + ".mode", "expected 'exact' or 'empirical'");
    if (mode == "empirical") {
      const std::size_t trials =
          e.contains("trials") ? e.at("trials").get<std::size_t>() : std::size_t{10000};
      if (trials < 10000)
        fail(path + ".trials", "empirical comparisons require at least 10000 trials (got " +
                                   std::to_string(trials) + ")");
    }
  } else if (type == "busemann") {
    require_keys(e, path, {"type", "name", "density"}, {"quad_resolution", "mc_directions"});
    need_density("density");
  } else if (type == "convergence") {
    require_keys(e, path, {"type", "name", "kind", "density", "p"},
                 {"alpha", "parameters", "N", "trials", "target_trials", "quad_resolution",
                  "control_variates"});
    need_density("density");
    const std::string kind = e.at("kind").get<std::string>();
    if (kind != "N" && kind != "alpha" && kind != "m")
      fail(path + ".kind", "expected 'N', 'alpha' or 'm'");
  } else if (type == "moment-bound") {
    require_keys(e, path, {"type", "name", "density", "body", "p"},
                 {"epsilon", "Ns", "trials", "directions", "allow_thin_blocks"});
    need_density("density");
    need_body("body");
  } else if (type == "cefpp") {
    require_keys(e, path, {"type", "name", "columns", "body"},
                 {"nu", "ball_radius", "flatten", "trials", "nu_budget"});
    need_body("body");
    const auto& cols = e.at("columns");
    if (!cols.is_array() || cols.empty()) fail(path + ".columns", "expected a nonempty array");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string name = cols[i].get<std::string>();
      if (densities.count(name) == 0)
        fail(path + ".columns." + std::to_string(i), "unknown density '" + name + "'");
    }
    const std::size_t trials = e.contains("trials") ? e.at("trials").get<std::size_t>() : 2000;
    const std::size_t nu_budget = e.contains("nu_budget") ? e.at("nu_budget").get<std::size_t>() : 512;
    if (trials * nu_budget < 100000)
      fail(path, "cefpp needs trials * nu_budget >= 100000 sample points");
  }
}

}  // namespace

namespace {

RunConfig parse_config(const json& j) {
  require_keys(j, "$", {"schema_version", "master_seed", "experiments"},
               {"workers", "output_dir", "densities", "bodies"});
  RunConfig cfg;
  cfg.schema_version = intval(j.at("schema_version"), "$.schema_version");
  if (cfg.schema_version != 1) fail("$.schema_version", "unsupported schema version");
  if (!j.at("master_seed").is_number_unsigned() && !j.at("master_seed").is_number_integer())
    fail("$.master_seed", "expected an integer");
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = intval(j.at("workers"), "$.workers");
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

  if (j.contains("densities")) {
    if (!j.at("densities").is_object()) fail("$.densities", "expected an object");
    for (const auto& [name, dj] : j.at("densities").items())
      cfg.densities.emplace(name, density_from_json(dj, "$.densities." + name));
  }
  if (j.contains("bodies")) {
    if (!j.at("bodies").is_object()) fail("$.bodies", "expected an object");
    for (const auto& [name, bj] : j.at("bodies").items())
      cfg.bodies.emplace(name, body_from_json(bj, "$.bodies." + name));
  }
  const auto& ex = j.at("experiments");
  if (!ex.is_array()) fail("$.experiments", "expected an array");
  for (std::size_t i = 0; i < ex.size(); ++i) {
    validate_experiment(ex[i], "$.experiments." + std::to_string(i), cfg.densities, cfg.bodies);
    cfg.experiments.push_back(ex[i].dump());
  }
  cfg.resolved_text = j.dump(2);
  // hash the experiment-relevant content only: execution environment keys
  // (workers, output_dir) must not change result identity
  json hashed = j;
  hashed.erase("workers");
  hashed.erase("output_dir");
  std::ostringstream hash;
  hash << std::hex << fnv1a64(hashed.dump());
  cfg.config_hash = hash.str();
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
  return parse_config(json::parse(json_text, nullptr, true, /*ignore_comments=*/true));
}

namespace {

json parse_override_value(const std::string& text) {
  const json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "' must look like key=value");
  const std::string keypath = assignment.substr(0, eq);
  const json value = parse_override_value(assignment.substr(eq + 1));
  json* node = &root;
  std::istringstream ss(keypath);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& k = parts[i];
    if (node->is_array()) {
      node = &(*node)[static_cast<std::size_t>(std::stoul(k))];
    } else {
      node = &(*node)[k];
    }
  }
  if (node->is_array()) {
    (*node)[static_cast<std::size_t>(std::stoul(parts.back()))] = value;
  } else {
    (*node)[parts.back()] = value;
  }
}

}  // namespace

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  for (const auto& o : overrides) apply_override(j, o);
  return parse_config(j);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace starvol
