#include "wmap/samples.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace wmap {

std::string toString(SampleSource source) {
  switch (source) {
    case SampleSource::DirectPrior: return "direct-prior";
    case SampleSource::PriorImportance: return "prior-importance";
    case SampleSource::RwMetropolis: return "rw-metropolis";
  }
  return "unknown";
}

SampleBatch::SampleBatch(Matrix draws, std::optional<Vector> logWeights, std::uint64_t seed,
                         SampleSource source, SampleDiagnostics diagnostics)
    : draws_(std::move(draws)),
      logWeights_(std::move(logWeights)),
      seed_(seed),
      source_(source),
      diag_(diagnostics) {
  if (draws_.cols() == 0) fail(ErrorCode::InvalidArgument, "sample batch is empty");
  const auto k = draws_.cols();
  if (logWeights_) {
    if (logWeights_->size() != k) {
      fail(ErrorCode::DimensionMismatch, "log-weights and draws differ in length");
    }
    const double top = logWeights_->maxCoeff();
    if (!std::isfinite(top)) fail(ErrorCode::InvalidArgument, "all importance weights are zero");
    weights_ = (logWeights_->array() - top).exp();
    weights_ /= weights_.sum();
  } else {
    weights_ = Vector::Constant(k, 1.0 / static_cast<double>(k));
  }
}

Vector SampleBatch::normalizedWeights() const { return weights_; }

double SampleBatch::effectiveSampleSize() const { return 1.0 / weights_.squaredNorm(); }

bool SampleBatch::flagged() const {
  if (source_ == SampleSource::PriorImportance) {
    return effectiveSampleSize() < 0.01 * static_cast<double>(size());
  }
  if (source_ == SampleSource::RwMetropolis) {
    return diag_.acceptanceRate < 0.1 || diag_.acceptanceRate > 0.6;
  }
  return false;
}

McEstimate SampleBatch::expectation(const Vector& values) const {
  if (values.size() != draws_.cols()) {
    fail(ErrorCode::DimensionMismatch, "one value per draw expected");
  }
  const auto n = values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (source_) {
    case SampleSource::PriorImportance: {
      const double mean = weights_.dot(values);
      if (n < 2) return {mean, nan};
      // Delta-method variance of the self-normalized estimator.
      const double var = (weights_.array().square() * (values.array() - mean).square()).sum();
      return {mean, std::sqrt(var)};
    }
    case SampleSource::DirectPrior: {
      const double mean = values.mean();
      if (n < 2) return {mean, nan};
      const double var = (values.array() - mean).square().sum() / static_cast<double>(n - 1);
      return {mean, std::sqrt(var / static_cast<double>(n))};
    }
    case SampleSource::RwMetropolis: {
      const double mean = values.mean();
      const auto batches = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(n))));
      if (batches < 2) return {mean, nan};
      const Eigen::Index len = n / batches;
      double acc = 0.0;
      double total = 0.0;
      for (Eigen::Index b = 0; b < batches; ++b) total += values.segment(b * len, len).mean();
      const double grand = total / static_cast<double>(batches);
      for (Eigen::Index b = 0; b < batches; ++b) {
        const double d = values.segment(b * len, len).mean() - grand;
        acc += d * d;
      }
      const double var = acc / static_cast<double>(batches - 1);
      return {mean, std::sqrt(var / static_cast<double>(batches))};
    }
  }
  return {nan, nan};
}

McEstimate SampleBatch::expectation(const std::function<double(Eigen::Ref<const Vector>)>& f) const {
  Vector values(draws_.cols());
  for (Eigen::Index k = 0; k < draws_.cols(); ++k) values[k] = f(draws_.col(k));
  return expectation(values);
}

void forEachChunk(std::size_t count, std::size_t chunkSize, unsigned threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (chunkSize == 0) fail(ErrorCode::InvalidArgument, "chunk size must be positive");
  const std::size_t chunks = (count + chunkSize - 1) / chunkSize;
  auto run = [&](std::size_t c) {
    const std::size_t begin = c * chunkSize;
    body(c, begin, std::min(count, begin + chunkSize));
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex errorMu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorMu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wmap
