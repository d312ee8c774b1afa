// Copyright 2026 The Spreadlearn Authors
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

#include "spreadlearn/parallel.h"

#include <atomic>
#include <cstdlib>

namespace spreadlearn {
namespace {

int ThreadsFromEnvironment() {
  const char* value = std::getenv("SPREADLEARN_THREADS");
  if (value != nullptr) {
    const int threads = std::atoi(value);
    if (threads > 0) return threads;
  }
  return omp_get_max_threads();
}

std::atomic<int> g_override{0};

}  // namespace

int MaxThreads() {
  static const int from_env = ThreadsFromEnvironment();
  const int forced = g_override.load(std::memory_order_relaxed);
  return forced > 0 ? forced : from_env;
}

void SetMaxThreads(int threads) {
  g_override.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace spreadlearn
