#include "reception/embedding.hpp"

#include <cmath>
#include <string>

#include "reception/error.hpp"

namespace reception {

namespace {

double l2(std::span<const double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

}  // namespace

EmbeddingVector EmbeddingVector::from_delivered(std::vector<double> components,
                                                double delivered_tolerance) {
  if (components.size() < 2) throw ProtocolError("embedding must have at least 2 components");
  for (double x : components) {
    if (!std::isfinite(x)) throw ProtocolError("embedding contains a non-finite component");
  }
  const double n = l2(components);
  if (std::fabs(n - 1.0) > delivered_tolerance) {
    throw ProtocolError("embedding norm " + std::to_string(n) + " is not within " +
                        std::to_string(delivered_tolerance) + " of 1");
  }
  for (double& x : components) x /= n;
  return EmbeddingVector(std::move(components));
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> components) {
  const double n = l2(components);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ValidationError("cannot normalize a zero or non-finite vector");
  }
  for (double& x : components) x /= n;
  return EmbeddingVector(std::move(components));
}

EmbeddingVector EmbeddingVector::stored(std::vector<double> components) {
  const double n = l2(components);
  if (components.size() < 2 || !(std::fabs(n - 1.0) <= 1e-9)) {
    throw ParseError("stored embedding is not a unit vector");
  }
  return EmbeddingVector(std::move(components));
}

double EmbeddingVector::norm() const { return l2(components_); }

}  // namespace reception
