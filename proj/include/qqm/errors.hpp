#pragma once

#include <stdexcept>
#include <string>

namespace qqm {

/// Invalid argument to a total-by-contract operation (zero-norm inverse,
/// non-pure exponent, bad grid dimensions, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A constraint equation that should hold by construction was violated.
/// Carries the largest observed violation magnitude.
class ConstraintError : public std::runtime_error {
 public:
  ConstraintError(const std::string& what, double max_violation)
      : std::runtime_error(what + " (max violation " +
                           std::to_string(max_violation) + ")"),
        max_violation_(max_violation) {}
  double max_violation() const { return max_violation_; }

 private:
  double max_violation_;
};

/// A formula hit a removable singularity that is not removable for the
/// given configuration (division by sin/cos of an angle pinned at a
/// degenerate value). Names the offending grid node when known.
class SingularConfigError : public std::runtime_error {
 public:
  explicit SingularConfigError(const std::string& what)
      : std::runtime_error(what), i_(-1), j_(-1) {}
  SingularConfigError(const std::string& what, int i, int j)
      : std::runtime_error(what + " at node (" + std::to_string(i) + "," +
                           std::to_string(j) + ")"),
        i_(i),
        j_(j) {}
  int node_i() const { return i_; }
  int node_j() const { return j_; }

 private:
  int i_, j_;
};

/// Evaluation requested inside a masked (excluded) region.
class MaskedRegionError : public std::runtime_error {
 public:
  explicit MaskedRegionError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Time integration diverged (norm growth beyond the configured factor).
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, int step, double norm)
      : std::runtime_error(what + " (step " + std::to_string(step) +
                           ", total probability " + std::to_string(norm) + ")"),
        step_(step),
        norm_(norm) {}
  int step() const { return step_; }
  double norm() const { return norm_; }

 private:
  int step_;
  double norm_;
};

}  // namespace qqm
