// Copyright 2026 The Unravel Authors
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

#ifndef UNRAVEL_ERROR_H
#define UNRAVEL_ERROR_H

#include <stdexcept>
#include <string>

namespace unravel {

/// Coarse classification used by the command-line tool to pick an exit code.
enum class ErrorCategory {
    Validation,  // bad input, bad config, contract violation
    Numerical,   // solver / integrator / optimizer failure
    Io,
};

class Error : public std::runtime_error {
   public:
    Error(ErrorCategory category, const std::string &what) : std::runtime_error(what), category_(category) {
    }
    ErrorCategory category() const noexcept {
        return category_;
    }

   private:
    ErrorCategory category_;
};

class ValidationError : public Error {
   public:
    explicit ValidationError(const std::string &what) : Error(ErrorCategory::Validation, what) {
    }
};

class NumericalError : public Error {
   public:
    explicit NumericalError(const std::string &what) : Error(ErrorCategory::Numerical, what) {
    }
};

class IoError : public Error {
   public:
    explicit IoError(const std::string &what) : Error(ErrorCategory::Io, what) {
    }
};

#define UNRAVEL_DEFINE_ERROR(Name, Base)                           \
    class Name : public Base {                                     \
       public:                                                     \
        explicit Name(const std::string &what) : Base(what) {      \
        }                                                          \
    }

UNRAVEL_DEFINE_ERROR(DimensionError, ValidationError);
UNRAVEL_DEFINE_ERROR(InvalidOperatorError, ValidationError);
UNRAVEL_DEFINE_ERROR(InvalidStateError, ValidationError);
UNRAVEL_DEFINE_ERROR(LabelError, ValidationError);
UNRAVEL_DEFINE_ERROR(RangeError, ValidationError);
UNRAVEL_DEFINE_ERROR(ParameterError, ValidationError);
UNRAVEL_DEFINE_ERROR(NormalizationError, ValidationError);
UNRAVEL_DEFINE_ERROR(UndefinedBranchError, ValidationError);
UNRAVEL_DEFINE_ERROR(EmptyBranchError, ValidationError);
UNRAVEL_DEFINE_ERROR(SchemaError, ValidationError);
UNRAVEL_DEFINE_ERROR(CalibrationError, ValidationError);
UNRAVEL_DEFINE_ERROR(SampleSizeError, ValidationError);
UNRAVEL_DEFINE_ERROR(ConfigError, ValidationError);
UNRAVEL_DEFINE_ERROR(EigenDecompositionError, NumericalError);
UNRAVEL_DEFINE_ERROR(StepSizeError, NumericalError);
UNRAVEL_DEFINE_ERROR(BootstrapError, NumericalError);

#undef UNRAVEL_DEFINE_ERROR

/// Raised when the constrained least-squares unfolding does not converge.
class OptimizationError : public NumericalError {
   public:
    OptimizationError(const std::string &what, double residual)
        : NumericalError(what + " (final residual " + std::to_string(residual) + ")"), residual_(residual) {
    }
    double residual() const noexcept {
        return residual_;
    }

   private:
    double residual_;
};

}  // namespace unravel

#endif
