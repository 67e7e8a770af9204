// Copyright 2026 The qundo Authors
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

#include <stdexcept>
#include <string>

namespace qundo {

/// Rejected input: shape mismatch, broken invariant, bad configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for failures that come from the numbers rather than the input
/// format. The CLI maps every subclass to the numeric-failure exit code.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A measurement outcome whose probability is (numerically) zero.
class ImpossibleOutcomeError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The measurement was projective (or nearly so) on some direction, so no
/// physical operator can undo it.
class UncollapseImpossibleError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace qundo
