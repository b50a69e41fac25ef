// Copyright 2026 The selfcheck Authors
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

namespace selfcheck {

/// Operand dimensions do not fit the operation.
class ShapeError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Input violates a declared invariant (non-orthonormal basis, non-PSD density, ...).
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called on an input outside its contract, e.g. a self-checking
/// test on a source without the index-1 measurements.
class ContractError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

}  // namespace selfcheck
