// Copyright 2026 The uncset Authors
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

#ifndef UNCSET_THREAD_POOL_H_
#define UNCSET_THREAD_POOL_H_

#include <cstddef>
#include <functional>

namespace uncset {

// Worker count from UNCSET_THREADS (0 or unset = hardware concurrency).
int ConfiguredThreads();

// Runs fn(0..n-1) on up to `threads` workers and returns when all calls
// finished. The first exception thrown by any call is rethrown.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn,
                 int threads = ConfiguredThreads());

}  // namespace uncset

#endif  // UNCSET_THREAD_POOL_H_
