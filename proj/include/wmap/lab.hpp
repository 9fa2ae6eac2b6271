#pragma once

// Experiment runner: JSON configuration, built-in test problems, task
// dispatch and CSV/JSON reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wmap/posterior.hpp"
#include "wmap/solvers.hpp"

namespace wmap::lab {

using Json = nlohmann::ordered_json;

enum class Task { SamplePrior, SolveMap, EstimateCm, VerifyOm, VerifyWmap, BregmanCompare, RefineStudy };

const char* toString(Task task);

struct ProblemSpec {
  std::optional<std::string> builtin;
  Json params = Json::object();
  std::filesystem::path matrixFile;
  std::filesystem::path dataFile;
  double noiseStd = 1.0;
};

/// Task-specific options with their defaults; only the keys of the selected
/// task are accepted in the "options" block.
struct TaskOptions {
  SolveOptions solver;
  std::size_t count = 10;             // sample-prior
  std::string sampler = "auto";       // estimate-cm: "auto" | "is" | "rwm"
  std::size_t samples = 10000;        // estimate-cm, bregman-compare, verify-wmap small balls
  double stepSize = 0.5;              // rwm
  std::size_t burnIn = 1000;          // rwm
  std::size_t thin = 1;               // rwm
  std::size_t directions = 10;        // verify-om, verify-wmap
  std::size_t nodes = kDefaultOmNodes;
  std::string point = "prior-draw";   // verify-om: "prior-draw" | "map"
  std::string field = "posterior";    // verify-om: "posterior" | "prior"
  double scale = 1.0;                 // verify-om direction length
  double tol = 1e-8;                  // verify-wmap
  double perturbation = 1e-3;         // verify-wmap
  std::vector<double> eps;            // verify-wmap small-ball radii
  std::size_t ballDirections = 5;
  double ballStep = 0.5;
  std::vector<std::size_t> levels;    // refine-study
  double normSmoothness = 0.0;
  std::optional<double> normP;
};

struct ExperimentConfig {
  Task task = Task::SolveMap;
  std::uint64_t seed = 0;
  std::optional<std::size_t> trunc;
  ProblemSpec problem;
  std::optional<Json> prior;  // validated prior block, built per truncation
  TaskOptions options;
  Json echo;                  // the document as read
};

/// Validates a parsed document. Unknown keys and ill-typed values throw
/// ErrorCode::Validation. Relative file paths resolve against baseDir.
ExperimentConfig parseConfig(const Json& doc, const std::filesystem::path& baseDir = {});

/// Reads and validates a config file; unreadable or malformed JSON throws ErrorCode::Parse.
ExperimentConfig loadConfig(const std::filesystem::path& path);

/// Builds a prior from a validated prior block at truncation `trunc`.
PriorModel buildPrior(const Json& block, std::size_t trunc);

/// Named problem generators:
///   "gauss-1d"  A = [1], m = 2, white-noise prior (trunc 1)
///   "hier-1d"   A = [1], m = params.m (default 3), hierarchical prior with
///               e = (1), unit weights, rhoVariance 1 (trunc 1)
///   "smoothing" A_kl = l^{-alpha} g_kl with seeded standard normal g, M rows
///               (params.measurements, default 32), alpha = params.alpha
///               (default 1.5); m = A u_true + unit noise, u_true_l = 1/l for
///               l in {1,2,3,5,8}. Default prior Besov s = 1.5, p = 1.5, d = 1.
/// Column l of A and the noise are drawn from their own streams, so problems
/// for different truncations are nested.
PosteriorModel builtinProblem(const std::string& name, std::size_t trunc, std::uint64_t seed,
                              const Json& params = Json::object(),
                              const std::optional<PriorModel>& prior = std::nullopt);

/// Posterior of a validated config at truncation `trunc`: the builtin (with the
/// config's prior, if any) or the matrix/data files, prewhitened by noise_std.
PosteriorModel buildProblem(const ExperimentConfig& cfg, std::size_t trunc);

/// Ground truth of the "smoothing" problem at truncation `trunc`.
CoeffVec smoothingTruth(std::size_t trunc);

using Cell = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  Json config;
  std::vector<Table> tables;
  Json provenance = Json::object();
  std::vector<std::string> warnings;
  /// Set when the task ran but failed its own contract (e.g. non-convergence).
  std::optional<std::string> failure;
};

struct RunSettings {
  unsigned threads = 1;
  bool timestamp = true;
};

Report runExperiment(const ExperimentConfig& cfg, const RunSettings& settings = {});

/// RFC-4180 CSV with 17 significant digits for reals.
std::string toCsv(const Table& table);
Json toJson(const Report& report);

struct ReportFormats {
  bool csv = true;
  bool json = true;
};

/// Writes <table>.csv per table and report.json into outDir.
void emitReport(const Report& report, const std::filesystem::path& outDir, const ReportFormats& formats);

}  // namespace wmap::lab
