// Copyright (c) 2026 The styletok Authors
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

#include <cstddef>
#include <functional>
#include <vector>

#include "styletok/numcore/tensor.hpp"

namespace styletok::num {

// Ordered record of differentiable operations.
//
// Ops append one node per call; backward() replays the nodes in reverse
// creation order, each at most once, accumulating gradients additively into
// every input that requires them. A tape supports a single backward pass;
// gradients on leaf tensors persist until explicitly zeroed.
class Tape {
 public:
  enum class Mode { kRecord, kInference };
  using BackwardFn = std::function<void(const Tensor& out)>;

  explicit Tape(Mode mode = Mode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return mode_ == Mode::kRecord; }

  // Registers `out` as computed from `inputs`. When recording and any input
  // requires a gradient, `out` is marked requires_grad and `fn` is kept for
  // the reverse pass; otherwise `out` is returned untouched.
  Tensor record(Tensor out, const std::vector<Tensor>& inputs, BackwardFn fn);

  void backward(const Tensor& loss);

  std::size_t size() const { return nodes_.size(); }
  // Number of backward closures run by the last backward().
  std::size_t replayed() const { return replayed_; }
  bool consumed() const { return consumed_; }

 private:
  struct Node {
    Tensor out;
    BackwardFn fn;
  };
  Mode mode_;
  std::vector<Node> nodes_;
  bool consumed_ = false;
  std::size_t replayed_ = 0;
};

}  // namespace styletok::num
