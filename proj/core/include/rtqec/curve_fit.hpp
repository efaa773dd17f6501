// Copyright 2026 The rtqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace rtqec {

class FitError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Fills `residuals` (already sized) for parameter vector `x`.
using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals)>;

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double rms = 0;  // sqrt(mean residual^2)
    int status = 0;  // Eigen LevenbergMarquardtSpace::Status
    int evaluations = 0;
};

/// Levenberg-Marquardt with forward-difference Jacobian. Never throws on slow convergence;
/// callers inspect `status` and `rms` and decide.
LeastSquaresResult least_squares(const ResidualFn& fn, std::size_t num_residuals, const Eigen::VectorXd& x0,
                                 int max_evaluations = 4000);

std::string describe_status(int status);

}  // namespace rtqec
