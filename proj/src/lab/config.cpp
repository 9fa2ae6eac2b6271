#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wmap/lab.hpp"

namespace wmap::lab {

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  fail(ErrorCode::Validation, where + ": " + what);
}

// Strict view of one JSON object: every key must be consumed before done().
class Reader {
 public:
  Reader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) invalid(where_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const Json& raw(const std::string& key) {
    if (!has(key)) invalid(where_, "missing required key '" + key + "'");
    used_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!has(key)) return def ? *def : missing<double>(key);
    const Json& v = raw(key);
    if (!v.is_number()) invalid(where_, "'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(where_, "'" + key + "' must be finite");
    return x;
  }

  std::uint64_t unsignedInt(const std::string& key, std::optional<std::uint64_t> def = std::nullopt) {
    if (!has(key)) return def ? *def : missing<std::uint64_t>(key);
    const Json& v = raw(key);
    if (!v.is_number_unsigned()) invalid(where_, "'" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) return def ? *def : missing<std::string>(key);
    const Json& v = raw(key);
    if (!v.is_string()) invalid(where_, "'" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) invalid(where_, "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        invalid(where_, "'" + key + "' must contain finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void done() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) invalid(where_, "unknown key '" + it.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  template <class T>
  [[noreturn]] T missing(const std::string& key) {
    invalid(where_, "missing required key '" + key + "'");
  }

  const Json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

Task parseTask(const std::string& name) {
  static const std::pair<const char*, Task> names[] = {
      {"sample-prior", Task::SamplePrior},   {"solve-map", Task::SolveMap},
      {"estimate-cm", Task::EstimateCm},     {"verify-om", Task::VerifyOm},
      {"verify-wmap", Task::VerifyWmap},     {"bregman-compare", Task::BregmanCompare},
      {"refine-study", Task::RefineStudy},
  };
  for (const auto& [n, t] : names) {
    if (name == n) return t;
  }
  invalid("config", "unknown task '" + name + "'");
}

Vector toVector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector powerWeights(double power, std::size_t trunc) {
  Vector w(static_cast<Eigen::Index>(trunc));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::pow(static_cast<double>(i + 1), power);
  return w;
}

Vector weightsFrom(Reader& r, const std::string& arrayKey, const std::string& powerKey, std::size_t trunc) {
  if (r.has(arrayKey) && r.has(powerKey)) {
    invalid(r.where(), "give at most one of '" + arrayKey + "' and '" + powerKey + "'");
  }
  if (r.has(arrayKey)) {
    const auto w = r.numbers(arrayKey);
    if (w.size() != trunc) {
      invalid(r.where(), "'" + arrayKey + "' has " + std::to_string(w.size()) + " entries, trunc is " +
                             std::to_string(trunc));
    }
    return toVector(w);
  }
  return powerWeights(r.number(powerKey, 0.0), trunc);
}

void parseSolver(const Json& block, SolveOptions& opts) {
  Reader r(block, "options.solver");
  opts.maxIter = static_cast<int>(r.unsignedInt("max_iter", static_cast<std::uint64_t>(opts.maxIter)));
  opts.gradTol = r.number("grad_tol", opts.gradTol);
  opts.lineSearch.shrink = r.number("shrink", opts.lineSearch.shrink);
  opts.lineSearch.sufficientDecrease = r.number("sufficient_decrease", opts.lineSearch.sufficientDecrease);
  const std::string method = r.string("method", "auto");
  if (method == "auto") {
    opts.method = SolveMethod::Auto;
  } else if (method == "iterative") {
    opts.method = SolveMethod::Iterative;
  } else {
    invalid(r.where(), "method must be 'auto' or 'iterative'");
  }
  if (r.has("initial_point")) opts.initialPoint = CoeffVec(toVector(r.numbers("initial_point")));
  r.done();
  try {
    opts.validate();
  } catch (const Error& e) {
    invalid(r.where(), e.what());
  }
}

TaskOptions parseOptions(Task task, const Json& block) {
  TaskOptions o;
  if (task == Task::BregmanCompare || task == Task::VerifyWmap) o.samples = 100000;
  Reader r(block, "options");
  auto positive = [&](std::uint64_t v, const char* key) {
    if (v < 1) invalid("options", std::string("'") + key + "' must be >= 1");
    return static_cast<std::size_t>(v);
  };
  auto solver = [&] {
    if (r.has("solver")) parseSolver(r.raw("solver"), o.solver);
  };
  switch (task) {
    case Task::SamplePrior:
      o.count = positive(r.unsignedInt("count", o.count), "count");
      break;
    case Task::SolveMap:
      solver();
      break;
    case Task::EstimateCm:
      o.sampler = r.string("sampler", o.sampler);
      if (o.sampler != "auto" && o.sampler != "is" && o.sampler != "rwm") {
        invalid("options", "sampler must be 'auto', 'is' or 'rwm'");
      }
      o.samples = positive(r.unsignedInt("samples", o.samples), "samples");
      o.stepSize = r.number("step_size", o.stepSize);
      if (!(o.stepSize > 0.0)) invalid("options", "'step_size' must be positive");
      o.burnIn = r.unsignedInt("burn_in", o.burnIn);
      o.thin = positive(r.unsignedInt("thin", o.thin), "thin");
      break;
    case Task::VerifyOm:
      o.directions = r.unsignedInt("directions", o.directions);
      o.nodes = r.unsignedInt("nodes", o.nodes);
      if (o.nodes < 2) invalid("options", "'nodes' must be >= 2");
      o.point = r.string("point", o.point);
      if (o.point != "prior-draw" && o.point != "map") invalid("options", "point must be 'prior-draw' or 'map'");
      o.field = r.string("field", o.field);
      if (o.field != "posterior" && o.field != "prior") invalid("options", "field must be 'posterior' or 'prior'");
      o.scale = r.number("scale", o.scale);
      solver();
      break;
    case Task::VerifyWmap:
      o.directions = r.unsignedInt("directions", o.directions);
      o.tol = r.number("tol", o.tol);
      if (!(o.tol > 0.0)) invalid("options", "'tol' must be positive");
      o.perturbation = r.number("perturbation", o.perturbation);
      if (r.has("eps")) {
        o.eps = r.numbers("eps");
        for (double e : o.eps) {
          if (!(e > 0.0)) invalid("options", "every eps must be positive");
        }
      }
      o.samples = positive(r.unsignedInt("samples", o.samples), "samples");
      o.ballDirections = r.unsignedInt("ball_directions", o.ballDirections);
      o.ballStep = r.number("ball_step", o.ballStep);
      solver();
      break;
    case Task::BregmanCompare:
      o.samples = positive(r.unsignedInt("samples", o.samples), "samples");
      solver();
      break;
    case Task::RefineStudy: {
      const Json& lv = r.raw("levels");
      if (!lv.is_array() || lv.empty()) invalid("options", "'levels' must be a nonempty array");
      for (const auto& e : lv) {
        if (!e.is_number_unsigned() || e.get<std::uint64_t>() < 1) {
          invalid("options", "'levels' must contain positive integers");
        }
        const auto n = static_cast<std::size_t>(e.get<std::uint64_t>());
        if (!o.levels.empty() && n <= o.levels.back()) invalid("options", "'levels' must be strictly increasing");
        o.levels.push_back(n);
      }
      o.normSmoothness = r.number("norm_smoothness", o.normSmoothness);
      if (r.has("norm_p")) {
        o.normP = r.number("norm_p");
        if (!(*o.normP > 1.0 && *o.normP <= 2.0)) invalid("options", "'norm_p' must lie in (1, 2]");
      }
      solver();
      break;
    }
  }
  r.done();
  return o;
}

void validatePriorBlock(const Json& block) {
  // Structural check only; numeric validity is checked when the prior is built.
  Reader r(block, "prior");
  const std::string family = r.string("family");
  if (family == "gaussian") {
    if (r.has("cm_weights")) r.numbers("cm_weights");
    if (r.has("cm_weight_power")) r.number("cm_weight_power");
  } else if (family == "besov") {
    r.number("s");
    r.number("p");
    r.unsignedInt("d", 1);
  } else if (family == "hierarchical") {
    if (r.has("cov_weights")) r.numbers("cov_weights");
    if (r.has("cov_weight_power")) r.number("cov_weight_power");
    r.numbers("mean");
    r.number("rho_variance", 1.0);
  } else {
    invalid("prior", "family must be 'gaussian', 'besov' or 'hierarchical'");
  }
  r.done();
}

ProblemSpec parseProblem(const Json& block, const std::filesystem::path& baseDir) {
  Reader r(block, "problem");
  ProblemSpec spec;
  if (r.has("builtin")) {
    spec.builtin = r.string("builtin");
    if (*spec.builtin != "gauss-1d" && *spec.builtin != "hier-1d" && *spec.builtin != "smoothing") {
      invalid("problem", "unknown builtin '" + *spec.builtin + "'");
    }
    if (r.has("params")) {
      spec.params = r.raw("params");
      Reader p(spec.params, "problem.params");
      if (*spec.builtin == "hier-1d") {
        p.number("m", 3.0);
      } else if (*spec.builtin == "smoothing") {
        if (p.unsignedInt("measurements", 32) < 1) invalid("problem.params", "'measurements' must be >= 1");
        p.number("alpha", 1.5);
      }
      p.done();
    }
    if (r.has("matrix_file") || r.has("data_file")) {
      invalid("problem", "give either 'builtin' or 'matrix_file' + 'data_file'");
    }
  } else {
    spec.matrixFile = r.string("matrix_file");
    spec.dataFile = r.string("data_file");
    if (spec.matrixFile.is_relative()) spec.matrixFile = baseDir / spec.matrixFile;
    if (spec.dataFile.is_relative()) spec.dataFile = baseDir / spec.dataFile;
    spec.noiseStd = r.number("noise_std", 1.0);
    if (!(spec.noiseStd > 0.0)) invalid("problem", "'noise_std' must be positive");
  }
  r.done();
  return spec;
}

}  // namespace

const char* toString(Task task) {
  switch (task) {
    case Task::SamplePrior: return "sample-prior";
    case Task::SolveMap: return "solve-map";
    case Task::EstimateCm: return "estimate-cm";
    case Task::VerifyOm: return "verify-om";
    case Task::VerifyWmap: return "verify-wmap";
    case Task::BregmanCompare: return "bregman-compare";
    case Task::RefineStudy: return "refine-study";
  }
  return "unknown";
}

PriorModel buildPrior(const Json& block, std::size_t trunc) {
  Reader r(block, "prior");
  const std::string family = r.string("family");
  try {
    if (family == "gaussian") {
      Vector q = weightsFrom(r, "cm_weights", "cm_weight_power", trunc);
      r.done();
      return PriorModel::gaussianDiag(std::move(q));
    }
    if (family == "besov") {
      const double s = r.number("s");
      const double p = r.number("p");
      const auto d = static_cast<int>(r.unsignedInt("d", 1));
      r.done();
      return PriorModel::besov(s, p, d, trunc);
    }
    if (family == "hierarchical") {
      Vector q = weightsFrom(r, "cov_weights", "cov_weight_power", trunc);
      const auto mean = r.numbers("mean");
      if (mean.size() != trunc) invalid("prior", "'mean' must have trunc entries");
      const double rho = r.number("rho_variance", 1.0);
      r.done();
      return PriorModel::hierarchical(std::move(q), toVector(mean), rho);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Validation) throw;
    invalid("prior", e.what());
  }
  invalid("prior", "family must be 'gaussian', 'besov' or 'hierarchical'");
}

ExperimentConfig parseConfig(const Json& doc, const std::filesystem::path& baseDir) {
  Reader r(doc, "config");
  ExperimentConfig cfg;
  cfg.echo = doc;
  cfg.task = parseTask(r.string("task"));
  cfg.seed = r.unsignedInt("seed", 0);
  if (r.has("trunc")) {
    const auto n = r.unsignedInt("trunc");
    if (n < 1) invalid("config", "'trunc' must be >= 1");
    cfg.trunc = static_cast<std::size_t>(n);
  }
  cfg.problem = parseProblem(r.raw("problem"), baseDir);
  if (r.has("prior")) {
    validatePriorBlock(r.raw("prior"));
    cfg.prior = r.raw("prior");
  }
  cfg.options = parseOptions(cfg.task, r.has("options") ? r.raw("options") : Json::object());
  r.done();

  if (cfg.task == Task::RefineStudy) {
    if (!cfg.problem.builtin) invalid("config", "refine-study needs a builtin problem family");
    if (cfg.trunc) invalid("config", "refine-study takes its truncations from options.levels, not 'trunc'");
  } else if (!cfg.trunc) {
    if (cfg.problem.builtin && (*cfg.problem.builtin == "gauss-1d" || *cfg.problem.builtin == "hier-1d")) {
      cfg.trunc = 1;
    } else {
      invalid("config", "missing required key 'trunc'");
    }
  }
  if (cfg.problem.builtin && (*cfg.problem.builtin == "gauss-1d" || *cfg.problem.builtin == "hier-1d")) {
    const bool ok = cfg.task == Task::RefineStudy
                        ? cfg.options.levels.size() == 1 && cfg.options.levels[0] == 1
                        : *cfg.trunc == 1;
    if (!ok) invalid("config", *cfg.problem.builtin + " is defined only for trunc 1");
  }
  // Fail on bad prior parameters before any computation.
  if (cfg.prior) {
    for (std::size_t n : cfg.task == Task::RefineStudy ? cfg.options.levels : std::vector<std::size_t>{*cfg.trunc}) {
      (void)buildPrior(*cfg.prior, n);
    }
  }
  return cfg;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Parse, "cannot open config file '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "invalid JSON in '" + path.string() + "': " + e.what());
  }
  return parseConfig(doc, path.parent_path());
}

}  // namespace wmap::lab
