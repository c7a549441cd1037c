#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace octa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised for contract violations and unattainable requests (bad shapes,
/// enumeration limits, infeasible parameter chains, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

}  // namespace octa
