#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "wmap/seqspace.hpp"

namespace wmap {

enum class SampleSource { DirectPrior, PriorImportance, RwMetropolis };

std::string toString(SampleSource source);

/// Monte Carlo estimate with its standard error.
struct McEstimate {
  double value = 0.0;
  double stdError = 0.0;
};

/// Draws are generated in chunks of this many; chunk c is seeded from (seed, c).
inline constexpr std::size_t kDefaultChunkSize = 4096;

struct SampleDiagnostics {
  std::size_t chunkSize = kDefaultChunkSize;
  double acceptanceRate = -1.0;  // RWM only
  std::size_t burnIn = 0;
  std::size_t thin = 1;
};

/// Seeded collection of state-space draws, one per column.
///
/// Importance batches carry unnormalized log-weights; the estimators below
/// are self-normalized. Metropolis batches are unweighted and use batch means
/// for standard errors.
class SampleBatch {
 public:
  SampleBatch(Matrix draws, std::optional<Vector> logWeights, std::uint64_t seed,
              SampleSource source, SampleDiagnostics diagnostics = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(draws_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(draws_.rows()); }
  const Matrix& draws() const noexcept { return draws_; }
  Eigen::Ref<const Vector> draw(std::size_t k) const { return draws_.col(static_cast<Eigen::Index>(k)); }
  CoeffVec drawVec(std::size_t k) const { return CoeffVec(Vector(draw(k))); }

  const std::optional<Vector>& logWeights() const noexcept { return logWeights_; }
  std::uint64_t seed() const noexcept { return seed_; }
  SampleSource source() const noexcept { return source_; }
  const SampleDiagnostics& diagnostics() const noexcept { return diag_; }

  /// Self-normalized weights (uniform when the batch is unweighted).
  Vector normalizedWeights() const;
  double effectiveSampleSize() const;
  /// ESS below 1% of the batch size, or Metropolis acceptance outside [0.1, 0.6].
  bool flagged() const;

  /// Estimate of E[f] from per-draw values f(draw_k).
  McEstimate expectation(const Vector& values) const;
  McEstimate expectation(const std::function<double(Eigen::Ref<const Vector>)>& f) const;

 private:
  Matrix draws_;
  std::optional<Vector> logWeights_;
  std::uint64_t seed_;
  SampleSource source_;
  SampleDiagnostics diag_;
  Vector weights_;
};

/// Runs body(chunk, begin, end) for every chunk of [0, count), on up to `threads` threads.
void forEachChunk(std::size_t count, std::size_t chunkSize, unsigned threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace wmap
