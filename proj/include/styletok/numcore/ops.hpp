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
#include <span>
#include <vector>

#include "styletok/numcore/tape.hpp"
#include "styletok/numcore/tensor.hpp"

// Differentiable operations. Every op takes the tape it records onto; on an
// inference tape (or when no input requires a gradient) nothing is recorded.
// 1-D tensors are treated as a single row wherever a matrix is expected.
namespace styletok::num {

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);

// out[i,j] = m[i,j] + v[j]
Tensor broadcast_add(Tape& tape, const Tensor& m, const Tensor& v);
// out[i,j] = x[i,j] * s[i], s has one entry per row.
Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& s);

Tensor sigmoid(Tape& tape, const Tensor& x);
Tensor tanh(Tape& tape, const Tensor& x);

// Row-wise softmax with max subtraction.
Tensor softmax(Tape& tape, const Tensor& x);
// Row-wise softmax over the first lengths[r] entries of row r; the remaining
// entries are exactly zero.
Tensor masked_softmax(Tape& tape, const Tensor& x, std::span<const std::size_t> lengths);

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);
Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts);
Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);
Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end);

// Row gather; backward scatters additively into the table.
Tensor embedding_lookup(Tape& tape, const Tensor& table, std::span<const std::size_t> ids);

Tensor sum(Tape& tape, const Tensor& x);
// sum(|pred - target| * mask) / max(1, sum(mask)); target and mask are constants.
Tensor l1_loss(Tape& tape, const Tensor& pred, const Tensor& target, const Tensor& mask);

// Additive attention energies for B queries against N keys:
//   e[b,i] = sum_a w[a] * tanh(q[b,a] + k[row(i,b),a])
// Keys are either shared (N rows) or time-major per query (N*B rows, row
// i*B + b).
enum class KeyRows { kShared, kPerQuery };
Tensor additive_scores(Tape& tape, const Tensor& q, const Tensor& keys, const Tensor& w,
                       KeyRows rows);
// out[b,:] = sum_i alpha[b,i] * values[row(i,b),:] with the same key layout
// convention as additive_scores.
Tensor weighted_rows(Tape& tape, const Tensor& alpha, const Tensor& values);

}  // namespace styletok::num
