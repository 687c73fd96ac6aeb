#pragma once

#include <stdexcept>
#include <string>

namespace lyap {

class LyapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRadius : public LyapError {
 public:
  explicit InvalidRadius(double r);
};

class NotHyperbolic : public LyapError {
 public:
  using LyapError::LyapError;
};

class NotDifferentiable : public LyapError {
 public:
  using LyapError::LyapError;
};

class CloudTooLarge : public LyapError {
 public:
  explicit CloudTooLarge(std::size_t size);
};

/// No sampled candidate survived the Bowen-ball filter at step n.
class EmptyBowenSample : public LyapError {
 public:
  EmptyBowenSample(int n, double delta);
  int n() const { return n_; }
  double delta() const { return delta_; }

 private:
  int n_;
  double delta_;
};

}  // namespace lyap
