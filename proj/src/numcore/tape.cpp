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

#include "styletok/numcore/tape.hpp"

#include "styletok/error.hpp"

namespace styletok::num {

Tensor Tape::record(Tensor out, const std::vector<Tensor>& inputs, BackwardFn fn) {
  if (!recording()) return out;
  if (consumed_) throw ContractError("cannot record onto a tape after backward()");
  bool needs_grad = false;
  for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
  if (!needs_grad) return out;
  out.s_->requires_grad = true;
  out.s_->tape = this;
  out.s_->node = nodes_.size();
  nodes_.push_back({out, std::move(fn)});
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined()) throw ContractError("backward on undefined tensor");
  if (loss.numel() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
  }
  if (loss.s_->tape != this) throw ContractError("backward: loss was not produced on this tape");
  if (consumed_) throw ContractError("backward called twice on the same tape");

  Tensor seed = loss;
  seed.grad_buffer()[0] += 1.0;
  replayed_ = 0;
  for (std::size_t i = loss.s_->node + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.out.has_grad()) continue;
    node.fn(node.out);
    ++replayed_;
  }
  consumed_ = true;
  nodes_.clear();
  nodes_.shrink_to_fit();
}

}  // namespace styletok::num
