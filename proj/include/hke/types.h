#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace hke {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Thrown for malformed user input (files, names, parameter ranges).
class InputError : public std::runtime_error {
public:
  InputError(std::string stage, const std::string& msg)
      : std::runtime_error(msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

// Thrown when a pipeline stage fails on valid input (solver breakdown,
// degenerate geometry).
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& msg)
      : std::runtime_error(msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

} // namespace hke
