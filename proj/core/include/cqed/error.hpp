// Copyright 2026 The cqed-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQED_ERROR_HPP_
#define CQED_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace cqed {

/// One violated invariant, located by a JSON-style field path such as
/// `emitters[1].gamma`.
struct Issue {
  std::string path;
  std::string message;
};

/// Thrown when a configuration or parameter set breaks an invariant. Carries
/// every violation found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  ValidationError(std::string path, std::string message);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// Thrown for numerical failures: singular systems, eigensolver
/// non-convergence, non-finite results.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqed

#endif  // CQED_ERROR_HPP_
