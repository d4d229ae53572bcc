#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace contacton {

// Ambient dimension 2n+1 is capped so small vectors live on the stack.
inline constexpr int kMaxN = 3;
inline constexpr int kMaxDim = 2 * kMaxN + 1;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Raised when an input violates the hypothesis an identity needs, e.g. a
// validator fed a map that is not Cauchy-Riemann. `residual` names the culprit.
class PreconditionError : public Error {
public:
    PreconditionError(std::string residual, double value, double threshold);
    const std::string& residual() const { return residual_; }
    double value() const { return value_; }

private:
    std::string residual_;
    double value_;
};

class FlowBlowUp : public Error {
public:
    using Error::Error;
};

inline int ambient_dim(int n) { return 2 * n + 1; }

}  // namespace contacton
