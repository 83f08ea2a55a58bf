// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <iosfwd>
#include <string>

#include "radp/linear_fa.hpp"
#include "radp/model.hpp"

namespace radp {

/// Parse a model from its JSON description and validate it; any violations
/// raise ValidationError listing them all.
RobustMdp load_model(std::istream& in);
RobustMdp load_model_file(const std::string& path);

/// Kernel files carry the transition matrix and an optional start
/// distribution for the visit-weight branch.
struct KernelFile {
    ExplorationKernel kernel;
    numvec start;  // empty when absent
};

KernelFile load_kernel(std::istream& in);
KernelFile load_kernel_file(const std::string& path);

/// Feature matrix with one row per state.
Eigen::MatrixXd load_feature_matrix(std::istream& in);
Eigen::MatrixXd load_feature_matrix_file(const std::string& path);

}  // namespace radp
