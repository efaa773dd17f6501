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

#include "rtqec/curve_fit.hpp"

#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace rtqec {
namespace {

struct Functor : Eigen::DenseFunctor<double> {
    Functor(const ResidualFn& fn, int inputs, int values) : Eigen::DenseFunctor<double>(inputs, values), fn(fn) {}
    int operator()(const InputType& x, ValueType& fvec) const {
        fn(x, fvec);
        return 0;
    }
    const ResidualFn& fn;
};

}  // namespace

LeastSquaresResult least_squares(const ResidualFn& fn, std::size_t num_residuals, const Eigen::VectorXd& x0,
                                 int max_evaluations) {
    if (num_residuals < static_cast<std::size_t>(x0.size())) {
        throw FitError("fewer residuals than parameters");
    }
    Functor functor(fn, static_cast<int>(x0.size()), static_cast<int>(num_residuals));
    Eigen::NumericalDiff<Functor> numdiff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(numdiff);
    lm.setMaxfev(max_evaluations);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);

    LeastSquaresResult out;
    out.x = x0;
    out.status = static_cast<int>(lm.minimize(out.x));
    out.evaluations = static_cast<int>(lm.nfev());

    Eigen::VectorXd r(static_cast<Eigen::Index>(num_residuals));
    fn(out.x, r);
    out.rms = std::sqrt(r.squaredNorm() / static_cast<double>(num_residuals));
    if (!std::isfinite(out.rms) || !out.x.allFinite()) {
        throw FitError("least squares diverged (" + describe_status(out.status) + ")");
    }
    return out;
}

std::string describe_status(int status) {
    using namespace Eigen::LevenbergMarquardtSpace;
    switch (static_cast<Status>(status)) {
        case NotStarted: return "not started";
        case Running: return "running";
        case ImproperInputParameters: return "improper input parameters";
        case RelativeReductionTooSmall: return "relative reduction below tolerance";
        case RelativeErrorTooSmall: return "relative step below tolerance";
        case RelativeErrorAndReductionTooSmall: return "step and reduction below tolerance";
        case CosinusTooSmall: return "residual orthogonal to Jacobian";
        case TooManyFunctionEvaluation: return "evaluation budget exhausted";
        case FtolTooSmall: return "ftol too small";
        case XtolTooSmall: return "xtol too small";
        case GtolTooSmall: return "gtol too small";
        case UserAsked: return "stopped by user";
    }
    return "unknown status " + std::to_string(status);
}

}  // namespace rtqec
