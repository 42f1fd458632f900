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

#include "styletok/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "styletok/error.hpp"

namespace styletok::num {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

// Rows of a key/value matrix laid out either shared (n rows) or time-major
// per batch entry (n * batch rows).
struct KeyLayout {
  std::size_t n;
  bool shared;
  std::size_t row(std::size_t i, std::size_t b, std::size_t batch) const {
    return shared ? i : i * batch + b;
  }
};

template <typename Fn>
Tensor unary(Tape& tape, const Tensor& x, Fn&& f, bool grad_from_output,
             double (*dfn)(double in, double out)) {
  std::vector<double> out(x.numel());
  const auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
  Tensor y(x.shape(), std::move(out));
  return tape.record(y, {x}, [x, dfn, grad_from_output](const Tensor& o) mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_buffer();
    const auto go = o.grad();
    const auto ov = o.values();
    const auto xv = x.values();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += go[i] * (grad_from_output ? dfn(0.0, ov[i]) : dfn(xv[i], ov[i]));
    }
  });
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_str(a.shape()) + " by " +
                         shape_str(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  Tensor y({m, n}, std::move(out));
  return tape.record(y, {a, b}, [a, b, m, k, n](const Tensor& o) mutable {
    const auto go = o.grad();
    if (a.requires_grad()) {
      auto ga = a.grad_buffer();
      const auto bv = b.values();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = go.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = bv.data() + p * n;
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (b.requires_grad()) {
      auto gb = b.grad_buffer();
      const auto av = a.values();
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = go.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          if (aip == 0.0) continue;
          double* gbrow = gb.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
        }
      }
    }
  });
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  Tensor y(a.shape(), std::move(out));
  return tape.record(y, {a, b}, [a, b](const Tensor& o) mutable {
    const auto go = o.grad();
    for (const Tensor* t : {&a, &b}) {
      if (!t->requires_grad()) continue;
      auto g = t->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
    }
  });
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  Tensor y(a.shape(), std::move(out));
  return tape.record(y, {a, b}, [a, b](const Tensor& o) mutable {
    const auto go = o.grad();
    if (a.requires_grad()) {
      auto g = a.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
    }
    if (b.requires_grad()) {
      auto g = b.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= go[i];
    }
  });
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  Tensor y(a.shape(), std::move(out));
  return tape.record(y, {a, b}, [a, b](const Tensor& o) mutable {
    const auto go = o.grad();
    if (a.requires_grad()) {
      auto g = a.grad_buffer();
      const auto bv = b.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * bv[i];
    }
    if (b.requires_grad()) {
      auto g = b.grad_buffer();
      const auto av = a.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * av[i];
    }
  });
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (auto& v : out) v *= factor;
  Tensor y(a.shape(), std::move(out));
  return tape.record(y, {a}, [a, factor](const Tensor& o) mutable {
    if (!a.requires_grad()) return;
    auto g = a.grad_buffer();
    const auto go = o.grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * factor;
  });
}

Tensor broadcast_add(Tape& tape, const Tensor& m, const Tensor& v) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (v.numel() != cols || v.rows() != 1) {
    throw DimensionError("broadcast_add: vector " + shape_str(v.shape()) +
                         " does not match columns of " + shape_str(m.shape()));
  }
  std::vector<double> out(m.values().begin(), m.values().end());
  const auto vv = v.values();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += vv[j];
  Tensor y(m.shape(), std::move(out));
  return tape.record(y, {m, v}, [m, v, rows, cols](const Tensor& o) mutable {
    const auto go = o.grad();
    if (m.requires_grad()) {
      auto g = m.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
    }
    if (v.requires_grad()) {
      auto g = v.grad_buffer();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g[j] += go[i * cols + j];
    }
  });
}

Tensor scale_rows(Tape& tape, const Tensor& x, const Tensor& s) {
  const std::size_t rows = x.rows(), cols = x.cols();
  if (s.numel() != rows) {
    throw DimensionError("scale_rows: " + shape_str(s.shape()) + " scales do not match rows of " +
                         shape_str(x.shape()));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  const auto sv = s.values();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] *= sv[i];
  Tensor y(x.shape(), std::move(out));
  return tape.record(y, {x, s}, [x, s, rows, cols](const Tensor& o) mutable {
    const auto go = o.grad();
    if (x.requires_grad()) {
      auto g = x.grad_buffer();
      const auto sv = s.values();
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) g[i * cols + j] += go[i * cols + j] * sv[i];
    }
    if (s.requires_grad()) {
      auto g = s.grad_buffer();
      const auto xv = x.values();
      for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += go[i * cols + j] * xv[i * cols + j];
        g[i] += acc;
      }
    }
  });
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
  return unary(
      tape, x,
      [](double v) {
        // Split by sign so exp never overflows.
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      true, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(Tape& tape, const Tensor& x) {
  return unary(
      tape, x, [](double v) { return std::tanh(v); }, true,
      [](double, double y) { return 1.0 - y * y; });
}

Tensor softmax(Tape& tape, const Tensor& x) {
  if (x.numel() == 0) throw DimensionError("softmax: empty input");
  std::vector<std::size_t> lengths(x.rows(), x.cols());
  return masked_softmax(tape, x, lengths);
}

Tensor masked_softmax(Tape& tape, const Tensor& x, std::span<const std::size_t> lengths) {
  const std::size_t rows = x.rows(), cols = x.cols();
  if (lengths.size() != rows) {
    throw DimensionError("masked_softmax: " + std::to_string(lengths.size()) +
                         " lengths for " + std::to_string(rows) + " rows");
  }
  std::vector<double> out(rows * cols, 0.0);
  const auto xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t len = lengths[r];
    if (len == 0 || len > cols) {
      throw DimensionError("masked_softmax: row length " + std::to_string(len) +
                           " outside [1, " + std::to_string(cols) + "]");
    }
    const double* in = xv.data() + r * cols;
    double* o = out.data() + r * cols;
    const double mx = *std::max_element(in, in + len);
    double total = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < len; ++j) o[j] /= total;
  }
  Tensor y(x.shape(), std::move(out));
  std::vector<std::size_t> lens(lengths.begin(), lengths.end());
  return tape.record(y, {x}, [x, rows, cols, lens](const Tensor& o) mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_buffer();
    const auto go = o.grad();
    const auto ov = o.values();
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t base = r * cols;
      double dot = 0.0;
      for (std::size_t j = 0; j < lens[r]; ++j) dot += go[base + j] * ov[base + j];
      for (std::size_t j = 0; j < lens[r]; ++j) gx[base + j] += ov[base + j] * (go[base + j] - dot);
    }
  });
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    total += p.cols();
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.cols();
    const auto pv = p.values();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(pv.data() + r * c, c, out.data() + r * total + offset);
    offset += c;
  }
  Tensor y({rows, total}, std::move(out));
  return tape.record(y, parts, [parts, rows, total](const Tensor& o) mutable {
    const auto go = o.grad();
    std::size_t offset = 0;
    for (auto& p : parts) {
      const std::size_t c = p.cols();
      if (p.requires_grad()) {
        auto g = p.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < c; ++j) g[r * c + j] += go[r * total + offset + j];
      }
      offset += c;
    }
  });
}

Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) {
      throw DimensionError("concat_rows: column mismatch " + shape_str(parts[0].shape()) + " vs " +
                           shape_str(p.shape()));
    }
    rows += p.rows();
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  Tensor y({rows, cols}, std::move(out));
  return tape.record(y, parts, [parts](const Tensor& o) mutable {
    const auto go = o.grad();
    std::size_t offset = 0;
    for (auto& p : parts) {
      const std::size_t n = p.numel();
      if (p.requires_grad()) {
        auto g = p.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) g[i] += go[offset + i];
      }
      offset += n;
    }
  });
}

Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  const std::size_t rows = x.rows(), cols = x.cols();
  if (begin >= end || end > rows) {
    throw IndexError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside " + shape_str(x.shape()));
  }
  const auto xv = x.values();
  std::vector<double> out(xv.begin() + begin * cols, xv.begin() + end * cols);
  Tensor y({end - begin, cols}, std::move(out));
  return tape.record(y, {x}, [x, begin, cols](const Tensor& o) mutable {
    if (!x.requires_grad()) return;
    auto g = x.grad_buffer();
    const auto go = o.grad();
    for (std::size_t i = 0; i < go.size(); ++i) g[begin * cols + i] += go[i];
  });
}

Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t end) {
  const std::size_t rows = x.rows(), cols = x.cols();
  if (begin >= end || end > cols) {
    throw IndexError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside " + shape_str(x.shape()));
  }
  const std::size_t w = end - begin;
  const auto xv = x.values();
  std::vector<double> out(rows * w);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(xv.data() + r * cols + begin, w, out.data() + r * w);
  Tensor y({rows, w}, std::move(out));
  return tape.record(y, {x}, [x, begin, rows, cols, w](const Tensor& o) mutable {
    if (!x.requires_grad()) return;
    auto g = x.grad_buffer();
    const auto go = o.grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < w; ++j) g[r * cols + begin + j] += go[r * w + j];
  });
}

Tensor embedding_lookup(Tape& tape, const Tensor& table, std::span<const std::size_t> ids) {
  const std::size_t vocab = table.rows(), dim = table.cols();
  if (ids.empty()) throw DimensionError("embedding_lookup: empty id sequence");
  std::vector<double> out(ids.size() * dim);
  const auto tv = table.values();
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= vocab) {
      throw IndexError("embedding_lookup: id " + std::to_string(ids[t]) +
                       " out of range for table with V=" + std::to_string(vocab));
    }
    std::copy_n(tv.data() + ids[t] * dim, dim, out.data() + t * dim);
  }
  Tensor y({ids.size(), dim}, std::move(out));
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  return tape.record(y, {table}, [table, idv, dim](const Tensor& o) mutable {
    if (!table.requires_grad()) return;
    auto g = table.grad_buffer();
    const auto go = o.grad();
    for (std::size_t t = 0; t < idv.size(); ++t)
      for (std::size_t j = 0; j < dim; ++j) g[idv[t] * dim + j] += go[t * dim + j];
  });
}

Tensor sum(Tape& tape, const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return tape.record(Tensor::scalar(total), {x}, [x](const Tensor& o) mutable {
    if (!x.requires_grad()) return;
    auto g = x.grad_buffer();
    const double go = o.grad()[0];
    for (auto& v : g) v += go;
  });
}

Tensor l1_loss(Tape& tape, const Tensor& pred, const Tensor& target, const Tensor& mask) {
  require_same_shape("l1_loss", pred, target);
  require_same_shape("l1_loss", pred, mask);
  const auto pv = pred.values(), tv = target.values(), mv = mask.values();
  double total = 0.0, count = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    total += std::abs(pv[i] - tv[i]) * mv[i];
    count += mv[i];
  }
  const double denom = std::max(1.0, count);
  return tape.record(Tensor::scalar(total / denom), {pred},
                     [pred, target, mask, denom](const Tensor& o) mutable {
                       if (!pred.requires_grad()) return;
                       auto g = pred.grad_buffer();
                       const double go = o.grad()[0] / denom;
                       const auto pv = pred.values(), tv = target.values(), mv = mask.values();
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         const double d = pv[i] - tv[i];
                         const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                         g[i] += go * sign * mv[i];
                       }
                     });
}

namespace {

KeyLayout key_layout(const char* op, const Tensor& keys, std::size_t batch, std::size_t n) {
  if (keys.rows() == n) return {n, true};
  if (keys.rows() == n * batch) return {n, false};
  throw DimensionError(std::string(op) + ": key rows " + std::to_string(keys.rows()) +
                       " are neither " + std::to_string(n) + " nor " + std::to_string(n * batch));
}

}  // namespace

Tensor additive_scores(Tape& tape, const Tensor& q, const Tensor& keys, const Tensor& w,
                       KeyRows rows) {
  const std::size_t batch = q.rows(), depth = q.cols();
  if (keys.cols() != depth || w.numel() != depth) {
    throw DimensionError("additive_scores: query " + shape_str(q.shape()) + ", keys " +
                         shape_str(keys.shape()) + ", w " + shape_str(w.shape()));
  }
  const bool shared = rows == KeyRows::kShared;
  if (!shared && keys.rows() % batch != 0) {
    throw DimensionError("additive_scores: " + std::to_string(keys.rows()) +
                         " per-query key rows do not tile batch " + std::to_string(batch));
  }
  const std::size_t n = shared ? keys.rows() : keys.rows() / batch;
  const KeyLayout layout{n, shared};
  // Cache tanh activations for the reverse pass.
  std::vector<double> act(batch * n * depth);
  std::vector<double> out(batch * n);
  const auto qv = q.values(), kv = keys.values(), wv = w.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* krow = kv.data() + layout.row(i, b, batch) * depth;
      const double* qrow = qv.data() + b * depth;
      double* a = act.data() + (b * n + i) * depth;
      double e = 0.0;
      for (std::size_t d = 0; d < depth; ++d) {
        a[d] = std::tanh(qrow[d] + krow[d]);
        e += wv[d] * a[d];
      }
      out[b * n + i] = e;
    }
  }
  Tensor y({batch, n}, std::move(out));
  return tape.record(y, {q, keys, w},
                     [q, keys, w, act = std::move(act), layout, batch, depth](const Tensor& o) mutable {
                       const auto go = o.grad();
                       const auto wv = w.values();
                       const std::size_t n = layout.n;
                       std::span<double> gq, gk, gw;
                       if (q.requires_grad()) gq = q.grad_buffer();
                       if (keys.requires_grad()) gk = keys.grad_buffer();
                       if (w.requires_grad()) gw = w.grad_buffer();
                       for (std::size_t b = 0; b < batch; ++b) {
                         for (std::size_t i = 0; i < n; ++i) {
                           const double g = go[b * n + i];
                           const double* a = act.data() + (b * n + i) * depth;
                           const std::size_t kr = layout.row(i, b, batch);
                           for (std::size_t d = 0; d < depth; ++d) {
                             if (!gw.empty()) gw[d] += g * a[d];
                             const double dz = g * wv[d] * (1.0 - a[d] * a[d]);
                             if (!gq.empty()) gq[b * depth + d] += dz;
                             if (!gk.empty()) gk[kr * depth + d] += dz;
                           }
                         }
                       }
                     });
}

Tensor weighted_rows(Tape& tape, const Tensor& alpha, const Tensor& values) {
  const std::size_t batch = alpha.rows(), n = alpha.cols(), dim = values.cols();
  const KeyLayout layout = key_layout("weighted_rows", values, batch, n);
  std::vector<double> out(batch * dim, 0.0);
  const auto av = alpha.values(), vv = values.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = av[b * n + i];
      if (a == 0.0) continue;
      const double* vrow = vv.data() + layout.row(i, b, batch) * dim;
      for (std::size_t d = 0; d < dim; ++d) out[b * dim + d] += a * vrow[d];
    }
  }
  Tensor y({batch, dim}, std::move(out));
  return tape.record(y, {alpha, values}, [alpha, values, layout, batch, dim](const Tensor& o) mutable {
    const auto go = o.grad();
    const std::size_t n = layout.n;
    if (alpha.requires_grad()) {
      auto ga = alpha.grad_buffer();
      const auto vv = values.values();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < n; ++i) {
          const double* vrow = vv.data() + layout.row(i, b, batch) * dim;
          double acc = 0.0;
          for (std::size_t d = 0; d < dim; ++d) acc += go[b * dim + d] * vrow[d];
          ga[b * n + i] += acc;
        }
    }
    if (values.requires_grad()) {
      auto gv = values.grad_buffer();
      const auto av = alpha.values();
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < n; ++i) {
          const double a = av[b * n + i];
          double* grow = gv.data() + layout.row(i, b, batch) * dim;
          for (std::size_t d = 0; d < dim; ++d) grow[d] += a * go[b * dim + d];
        }
    }
  });
}

}  // namespace styletok::num
