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

#ifndef CQED_PARALLEL_HPP_
#define CQED_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace cqed {

/// 0 means "use every hardware thread". Never returns 0.
unsigned resolve_threads(unsigned requested) noexcept;

/// Splits [0, n) into at most `threads` contiguous blocks and runs
/// `body(begin, end)` on each. Blocks write to disjoint outputs, so results do
/// not depend on the thread count. The exception from the lowest-indexed
/// failing block is rethrown.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace cqed

#endif  // CQED_PARALLEL_HPP_
