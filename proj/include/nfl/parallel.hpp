// Copyright 2026 The nfl-lab Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace nfl {

// Evaluates fn(0..count-1) on up to `workers` threads, each owning a
// contiguous block. Results come back in index order, so any reduction the
// caller performs is independent of the worker count.
template <typename Fn>
auto parallel_map(std::size_t count, unsigned workers, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<Result>> slots(count);
  const std::size_t threads =
      std::max<std::size_t>(1, std::min<std::size_t>(workers == 0 ? 1 : workers, count));

  std::vector<std::exception_ptr> errors(threads);
  auto run_block = [&](std::size_t t) {
    const std::size_t begin = count * t / threads;
    const std::size_t end = count * (t + 1) / threads;
    try {
      for (std::size_t i = begin; i < end; ++i) slots[i].emplace(fn(i));
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  if (threads == 1) {
    run_block(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run_block, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline unsigned available_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace nfl
