#include <cmath>
#include <fstream>
#include <sstream>

#include "wmap/lab.hpp"
#include "wmap/rng.hpp"

namespace wmap::lab {

namespace {

constexpr std::uint64_t kNoiseStream = 0;

std::vector<std::vector<double>> readNumberRows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Validation, "cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) {
        fail(ErrorCode::Validation, path.string() + ":" + std::to_string(lineNo) + ": bad number '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::Validation, "'" + path.string() + "' contains no numbers");
  return rows;
}

PosteriorModel fromFiles(const ProblemSpec& spec, const PriorModel& prior) {
  const auto rows = readNumberRows(spec.matrixFile);
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().size();
  Matrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != n) fail(ErrorCode::Validation, "matrix file rows differ in length");
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  std::vector<double> flat;
  for (const auto& r : readNumberRows(spec.dataFile)) flat.insert(flat.end(), r.begin(), r.end());
  if (flat.size() != m) {
    fail(ErrorCode::Validation, "data file has " + std::to_string(flat.size()) + " values, matrix has " +
                                    std::to_string(m) + " rows");
  }
  if (n != prior.trunc()) {
    fail(ErrorCode::Validation, "matrix has " + std::to_string(n) + " columns, trunc is " + std::to_string(prior.trunc()));
  }
  Vector data = Eigen::Map<const Vector>(flat.data(), static_cast<Eigen::Index>(m));
  return PosteriorModel::prewhitened(prior, std::move(a), std::move(data), spec.noiseStd);
}

double param(const Json& params, const char* key, double def) {
  return params.contains(key) ? params.at(key).get<double>() : def;
}

}  // namespace

CoeffVec smoothingTruth(std::size_t trunc) {
  Vector u = Vector::Zero(static_cast<Eigen::Index>(trunc));
  for (std::size_t l : {1, 2, 3, 5, 8}) {
    if (l <= trunc) u[static_cast<Eigen::Index>(l - 1)] = 1.0 / static_cast<double>(l);
  }
  return CoeffVec(std::move(u));
}

PosteriorModel builtinProblem(const std::string& name, std::size_t trunc, std::uint64_t seed,
                              const Json& params, const std::optional<PriorModel>& prior) {
  if (trunc < 1) fail(ErrorCode::InvalidArgument, "trunc must be >= 1");
  if (name == "gauss-1d" || name == "hier-1d") {
    if (trunc != 1) fail(ErrorCode::InvalidArgument, name + " is defined only for trunc 1");
    Matrix a{{1.0}};
    if (name == "gauss-1d") {
      return PosteriorModel(prior ? *prior : PriorModel::whiteNoise(1), ForwardOperator(a), Vector::Constant(1, 2.0));
    }
    const double m = param(params, "m", 3.0);
    return PosteriorModel(prior ? *prior : PriorModel::hierarchical(Vector::Ones(1), Vector::Ones(1), 1.0),
                          ForwardOperator(a), Vector::Constant(1, m));
  }
  if (name == "smoothing") {
    const auto rows = static_cast<Eigen::Index>(params.contains("measurements")
                                                    ? params.at("measurements").get<std::uint64_t>()
                                                    : 32);
    if (rows < 1) fail(ErrorCode::InvalidArgument, "smoothing needs at least one measurement");
    const double alpha = param(params, "alpha", 1.5);
    const auto n = static_cast<Eigen::Index>(trunc);
    Matrix a(rows, n);
    for (Eigen::Index l = 0; l < n; ++l) {
      Rng rng(seed, static_cast<std::uint64_t>(l + 1));
      const double decay = std::pow(static_cast<double>(l + 1), -alpha);
      for (Eigen::Index k = 0; k < rows; ++k) a(k, l) = decay * rng.normal();
    }
    Rng noise(seed, kNoiseStream);
    Vector m = a * smoothingTruth(trunc).values();
    for (Eigen::Index k = 0; k < rows; ++k) m[k] += noise.normal();
    return PosteriorModel(prior ? *prior : PriorModel::besov(1.5, 1.5, 1, trunc), ForwardOperator(std::move(a)),
                          std::move(m));
  }
  fail(ErrorCode::InvalidArgument, "unknown builtin problem '" + name + "'");
}

PosteriorModel buildProblem(const ExperimentConfig& cfg, std::size_t trunc) {
  std::optional<PriorModel> prior;
  if (cfg.prior) prior = buildPrior(*cfg.prior, trunc);
  if (cfg.problem.builtin) return builtinProblem(*cfg.problem.builtin, trunc, cfg.seed, cfg.problem.params, prior);
  if (!prior) fail(ErrorCode::Validation, "problems read from files need a 'prior' block");
  return fromFiles(cfg.problem, *prior);
}

}  // namespace wmap::lab
