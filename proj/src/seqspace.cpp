#include "wmap/seqspace.hpp"

#include <cmath>
#include <string>

namespace wmap {

namespace {

void requireFinite(const Vector& v) {
  if (v.size() == 0) fail(ErrorCode::InvalidArgument, "coefficient vector must have trunc >= 1");
  if (!v.allFinite()) fail(ErrorCode::InvalidArgument, "coefficient vector has non-finite entries");
}

}  // namespace

void requireSameTrunc(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": truncation mismatch (" +
                                           std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

CoeffVec::CoeffVec(Vector entries) : entries_(std::move(entries)) { requireFinite(entries_); }

CoeffVec::CoeffVec(std::initializer_list<double> entries)
    : entries_(static_cast<Eigen::Index>(entries.size())) {
  Eigen::Index i = 0;
  for (double x : entries) entries_[i++] = x;
  requireFinite(entries_);
}

CoeffVec CoeffVec::zeros(std::size_t trunc) {
  return CoeffVec(Vector::Zero(static_cast<Eigen::Index>(trunc)));
}

CoeffVec CoeffVec::basis(std::size_t i, std::size_t trunc) {
  if (i < 1 || i > trunc) {
    fail(ErrorCode::OutOfRange, "basis index " + std::to_string(i) + " outside 1.." +
                                    std::to_string(trunc));
  }
  Vector e = Vector::Zero(static_cast<Eigen::Index>(trunc));
  e[static_cast<Eigen::Index>(i - 1)] = 1.0;
  return CoeffVec(std::move(e));
}

std::vector<double> CoeffVec::toStdVector() const {
  return {entries_.data(), entries_.data() + entries_.size()};
}

CoeffVec CoeffVec::zeroExtended(std::size_t trunc) const {
  if (trunc < this->trunc()) fail(ErrorCode::InvalidArgument, "zero extension cannot shrink");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(trunc));
  out.head(entries_.size()) = entries_;
  return CoeffVec(std::move(out));
}

CoeffVec operator+(const CoeffVec& a, const CoeffVec& b) {
  requireSameTrunc(a.trunc(), b.trunc(), "operator+");
  return CoeffVec(a.entries_ + b.entries_);
}

CoeffVec operator-(const CoeffVec& a, const CoeffVec& b) {
  requireSameTrunc(a.trunc(), b.trunc(), "operator-");
  return CoeffVec(a.entries_ - b.entries_);
}

CoeffVec operator*(double s, const CoeffVec& a) { return CoeffVec(s * a.entries_); }

CoeffVec operator-(const CoeffVec& a) { return CoeffVec(-a.entries_); }

BesovWeights::BesovWeights(double s, double p, int d, std::size_t trunc)
    : s_(s), p_(p), d_(d) {
  if (!(p > 1.0 && p <= 2.0)) fail(ErrorCode::InvalidArgument, "Besov prior requires 1 < p <= 2");
  if (d < 1) fail(ErrorCode::InvalidArgument, "dimension d must be positive");
  if (!std::isfinite(s)) fail(ErrorCode::InvalidArgument, "smoothness s must be finite");
  if (trunc < 1) fail(ErrorCode::InvalidArgument, "trunc must be >= 1");

  const auto n = static_cast<Eigen::Index>(trunc);
  norm_.resize(n);
  scale_.resize(n);
  diff_.resize(n);
  const double sd = s / static_cast<double>(d);
  const double normExp = p * (sd + 0.5) - 1.0;
  const double diffExp = sd + 0.5 - 1.0 / p;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = static_cast<double>(i + 1);
    norm_[i] = std::pow(l, normExp);
    diff_[i] = std::pow(l, diffExp);
    scale_[i] = std::pow(l, -diffExp);
  }
}

double besovNormPow(const Vector& u, const BesovWeights& wts) {
  requireSameTrunc(static_cast<std::size_t>(u.size()), wts.trunc(), "besov norm");
  const double p = wts.p();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += wts.norm()[i] * std::pow(std::abs(u[i]), p);
  return acc;
}

double besovNorm(const CoeffVec& u, const BesovWeights& wts) {
  return std::pow(besovNormPow(u.values(), wts), 1.0 / wts.p());
}

double weightedInner(const CoeffVec& u, const CoeffVec& v, const Vector& weights) {
  requireSameTrunc(u.trunc(), v.trunc(), "weighted inner product");
  requireSameTrunc(u.trunc(), static_cast<std::size_t>(weights.size()), "weighted inner product");
  if ((weights.array() <= 0.0).any()) fail(ErrorCode::InvalidArgument, "weights must be positive");
  return (weights.array() * u.values().array() * v.values().array()).sum();
}

}  // namespace wmap
