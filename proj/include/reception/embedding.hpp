#pragma once

#include <span>
#include <vector>

namespace reception {

// Unit-norm sentence embedding. Construction goes through one of the two
// factories so every instance carries norm 1 within 1e-9.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // Accepts a vector as delivered by a backend: its norm must already be
  // within `delivered_tolerance` of 1. Re-normalizes. Throws ProtocolError.
  static EmbeddingVector from_delivered(std::vector<double> components,
                                        double delivered_tolerance = 1e-3);

  // Normalizes an arbitrary non-zero vector. Throws ValidationError on zero.
  static EmbeddingVector normalized(std::vector<double> components);

  // Reloads a vector written out earlier. Components are kept bit for bit;
  // the norm must be within 1e-9 of 1. Throws ParseError.
  static EmbeddingVector stored(std::vector<double> components);

  std::span<const double> components() const { return components_; }
  std::size_t dim() const { return components_.size(); }
  double norm() const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> c) : components_(std::move(c)) {}
  std::vector<double> components_;
};

}  // namespace reception
