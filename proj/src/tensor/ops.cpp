// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssa/errors.hpp"

namespace ssa::ops {

namespace {

// Row-major kernels written as row updates (c[i,:] += a * b[p,:]) so every
// output element is summed in a fixed order whatever the buffer alignment.

// C[m,n] += A[m,k] * B[k,n]
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// out[c,r] = in[r,c]
void transpose_into(std::size_t r, std::size_t c, const double* in, double* out) {
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = in[i * c + j];
}

// C[m,k] += G[m,n] * B[k,n]^T
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* g, const double* b, double* c) {
  std::vector<double> bt(n * k);
  transpose_into(k, n, b, bt.data());
  gemm_nn(m, n, k, g, bt.data(), c);
}

// C[k,n] += A[m,k]^T * G[m,n]
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* g, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* gi = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * gi[j];
    }
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

std::string pair_str(const char* op, const Tensor& a, const Tensor& b) {
  return std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
         shape_str(b.shape());
}

struct MatView {
  std::size_t batch;  // 1 when the operand is rank 2
  std::size_t rows;
  std::size_t cols;
};

MatView mat_view(const Tensor& t) {
  if (t.rank() == 2) return {1, t.dim(0), t.dim(1)};
  if (t.rank() == 3) return {t.dim(0), t.dim(1), t.dim(2)};
  throw DimensionError("matmul: expected rank 2 or 3, got " + shape_str(t.shape()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const MatView va = mat_view(a);
  const MatView vb = mat_view(b);
  require(va.cols == vb.rows, pair_str("matmul", a, b));
  require(va.batch == vb.batch || va.batch == 1 || vb.batch == 1, pair_str("matmul", a, b));
  const bool batched = a.rank() == 3 || b.rank() == 3;
  const std::size_t nb = std::max(va.batch, vb.batch);
  const std::size_t m = va.rows, k = va.cols, n = vb.cols;

  std::vector<double> out(nb * m * n);
  for (std::size_t i = 0; i < nb; ++i) {
    const double* pa = a.data().data() + (va.batch == 1 ? 0 : i * m * k);
    const double* pb = b.data().data() + (vb.batch == 1 ? 0 : i * k * n);
    gemm_nn(m, k, n, pa, pb, out.data() + i * m * n);
  }
  Shape shape = batched ? Shape{nb, m, n} : Shape{m, n};
  return Tensor::make_result(
      "matmul", std::move(shape), std::move(out), {&a, &b},
      [a, b, va, vb, nb, m, k, n](std::span<const double> g, Gradients& grads) {
        for (std::size_t i = 0; i < nb; ++i) {
          const double* gm = g.data() + i * m * n;
          if (a.requires_grad()) {
            auto& ga = grads.slot(a);
            const double* pb = b.data().data() + (vb.batch == 1 ? 0 : i * k * n);
            gemm_nt(m, n, k, gm, pb, ga.data() + (va.batch == 1 ? 0 : i * m * k));
          }
          if (b.requires_grad()) {
            auto& gb = grads.slot(b);
            const double* pa = a.data().data() + (va.batch == 1 ? 0 : i * m * k);
            gemm_tn(m, k, n, pa, gm, gb.data() + (vb.batch == 1 ? 0 : i * k * n));
          }
        }
      });
}

Tensor transpose(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  transpose_into(r, c, a.data().data(), out.data());
  return Tensor::make_result("transpose", {c, r}, std::move(out), {&a},
                             [a, r, c](std::span<const double> g, Gradients& grads) {
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < c; ++i)
                                 for (std::size_t j = 0; j < r; ++j) ga[j * c + i] += g[i * r + j];
                             });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const auto ad = a.data();
  const auto bd = b.data();
  if (a.shape() == b.shape()) {
    std::vector<double> out(ad.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] + bd[i];
    return Tensor::make_result("add", a.shape(), std::move(out), {&a, &b},
                               [a, b](std::span<const double> g, Gradients& grads) {
                                 if (a.requires_grad()) grads.accumulate(a, g);
                                 if (b.requires_grad()) grads.accumulate(b, g);
                               });
  }
  require(b.rank() == 1 && a.rank() >= 1 && a.shape().back() == b.dim(0),
          pair_str("add", a, b));
  const std::size_t n = b.dim(0);
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] + bd[i % n];
  return Tensor::make_result("add_bias", a.shape(), std::move(out), {&a, &b},
                             [a, b, n](std::span<const double> g, Gradients& grads) {
                               if (a.requires_grad()) grads.accumulate(a, g);
                               if (b.requires_grad()) {
                                 auto& gb = grads.slot(b);
                                 for (std::size_t i = 0; i < g.size(); ++i) gb[i % n] += g[i];
                               }
                             });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const auto ad = a.data();
  const auto bd = b.data();
  if (a.shape() == b.shape()) {
    std::vector<double> out(ad.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i];
    return Tensor::make_result("mul", a.shape(), std::move(out), {&a, &b},
                               [a, b](std::span<const double> g, Gradients& grads) {
                                 const auto ad = a.data();
                                 const auto bd = b.data();
                                 if (a.requires_grad()) {
                                   auto& ga = grads.slot(a);
                                   for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bd[i];
                                 }
                                 if (b.requires_grad()) {
                                   auto& gb = grads.slot(b);
                                   for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * ad[i];
                                 }
                               });
  }
  Shape collapsed = a.shape();
  require(!collapsed.empty(), pair_str("mul", a, b));
  collapsed.back() = 1;
  require(b.shape() == collapsed, pair_str("mul", a, b));
  const std::size_t n = a.shape().back();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i / n];
  return Tensor::make_result("mul_bcast", a.shape(), std::move(out), {&a, &b},
                             [a, b, n](std::span<const double> g, Gradients& grads) {
                               const auto ad = a.data();
                               const auto bd = b.data();
                               if (a.requires_grad()) {
                                 auto& ga = grads.slot(a);
                                 for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bd[i / n];
                               }
                               if (b.requires_grad()) {
                                 auto& gb = grads.slot(b);
                                 for (std::size_t i = 0; i < g.size(); ++i) gb[i / n] += g[i] * ad[i];
                               }
                             });
}

Tensor scale(const Tensor& a, double factor) {
  const auto ad = a.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * factor;
  return Tensor::make_result("scale", a.shape(), std::move(out), {&a},
                             [a, factor](std::span<const double> g, Gradients& grads) {
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
                             });
}

Tensor relu(const Tensor& a) {
  const auto ad = a.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] > 0.0 ? ad[i] : 0.0;
  return Tensor::make_result("relu", a.shape(), std::move(out), {&a},
                             [a](std::span<const double> g, Gradients& grads) {
                               const auto ad = a.data();
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < g.size(); ++i) {
                                 if (ad[i] > 0.0) ga[i] += g[i];
                               }
                             });
}

Tensor swish(const Tensor& a) {
  const auto ad = a.data();
  std::vector<double> out(ad.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] / (1.0 + std::exp(-ad[i]));
  return Tensor::make_result("swish", a.shape(), std::move(out), {&a},
                             [a](std::span<const double> g, Gradients& grads) {
                               const auto ad = a.data();
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < g.size(); ++i) {
                                 const double s = 1.0 / (1.0 + std::exp(-ad[i]));
                                 ga[i] += g[i] * (s + ad[i] * s * (1.0 - s));
                               }
                             });
}

Tensor softmax(const Tensor& x, std::size_t axis, std::span<const std::uint8_t> allowed) {
  const Shape& shape = x.shape();
  if (axis >= shape.size()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for " +
                         shape_str(shape));
  }
  if (!allowed.empty() && allowed.size() != x.numel()) {
    throw DimensionError("softmax: mask size does not match " + shape_str(shape));
  }
  const auto xd = x.data();
  for (double v : xd) {
    if (!std::isfinite(v)) throw NumericError("softmax: non-finite input");
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t n = shape[axis];

  std::vector<double> out(xd.size(), 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t idx = base + j * inner;
        if (allowed.empty() || allowed[idx]) mx = std::max(mx, xd[idx]);
      }
      if (!std::isfinite(mx)) throw ContractError("softmax: slice with every entry masked");
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t idx = base + j * inner;
        if (allowed.empty() || allowed[idx]) {
          out[idx] = std::exp(xd[idx] - mx);
          z += out[idx];
        }
      }
      for (std::size_t j = 0; j < n; ++j) out[base + j * inner] /= z;
    }
  }
  auto y = std::make_shared<std::vector<double>>(out);
  return Tensor::make_result(
      "softmax", shape, std::move(out), {&x},
      [x, y, outer, inner, n](std::span<const double> g, Gradients& grads) {
        auto& gx = grads.slot(x);
        const auto& yd = *y;
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * n * inner + in;
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += yd[base + j * inner] * g[base + j * inner];
            for (std::size_t j = 0; j < n; ++j) {
              const std::size_t idx = base + j * inner;
              gx[idx] += yd[idx] * (g[idx] - dot);
            }
          }
        }
      });
}

Tensor log_softmax(const Tensor& x) {
  require(x.rank() >= 1, "log_softmax: rank-0 input");
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.numel() / n;
  const auto xd = x.data();
  for (double v : xd) {
    if (!std::isfinite(v)) throw NumericError("log_softmax: non-finite input");
  }
  std::vector<double> out(xd.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd.data() + r * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    const double lz = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = row[j] - lz;
  }
  auto y = std::make_shared<std::vector<double>>(out);
  return Tensor::make_result("log_softmax", x.shape(), std::move(out), {&x},
                             [x, y, rows, n](std::span<const double> g, Gradients& grads) {
                               auto& gx = grads.slot(x);
                               for (std::size_t r = 0; r < rows; ++r) {
                                 double gs = 0.0;
                                 for (std::size_t j = 0; j < n; ++j) gs += g[r * n + j];
                                 for (std::size_t j = 0; j < n; ++j) {
                                   const std::size_t i = r * n + j;
                                   gx[i] += g[i] - std::exp((*y)[i]) * gs;
                                 }
                               }
                             });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require(x.rank() >= 1, "layer_norm: rank-0 input");
  const std::size_t n = x.shape().back();
  require(gain.rank() == 1 && gain.dim(0) == n, pair_str("layer_norm gain", x, gain));
  require(bias.rank() == 1 && bias.dim(0) == n, pair_str("layer_norm bias", x, bias));
  const std::size_t rows = x.numel() / n;
  const auto xd = x.data();
  const auto gd = gain.data();
  const auto bd = bias.data();

  auto xhat = std::make_shared<std::vector<double>>(xd.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(xd.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd.data() + r * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (row[j] - mu) * is;
      (*xhat)[r * n + j] = h;
      out[r * n + j] = h * gd[j] + bd[j];
    }
  }
  return Tensor::make_result(
      "layer_norm", x.shape(), std::move(out), {&x, &gain, &bias},
      [x, gain, bias, xhat, inv_std, rows, n](std::span<const double> g, Gradients& grads) {
        const auto gd = gain.data();
        const auto& xh = *xhat;
        if (gain.requires_grad()) {
          auto& gg = grads.slot(gain);
          for (std::size_t i = 0; i < g.size(); ++i) gg[i % n] += g[i] * xh[i];
        }
        if (bias.requires_grad()) {
          auto& gb = grads.slot(bias);
          for (std::size_t i = 0; i < g.size(); ++i) gb[i % n] += g[i];
        }
        if (x.requires_grad()) {
          auto& gx = grads.slot(x);
          const double inv_n = 1.0 / static_cast<double>(n);
          for (std::size_t r = 0; r < rows; ++r) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              const double dh = g[r * n + j] * gd[j];
              m1 += dh;
              m2 += dh * xh[r * n + j];
            }
            m1 *= inv_n;
            m2 *= inv_n;
            for (std::size_t j = 0; j < n; ++j) {
              const std::size_t i = r * n + j;
              gx[i] += (*inv_std)[r] * (g[i] * gd[j] - m1 - xh[i] * m2);
            }
          }
        }
      });
}

Tensor depthwise_conv1d(const Tensor& x, const Tensor& w) {
  require(x.rank() == 2 && w.rank() == 2 && x.cols() == w.cols() && x.rows() >= w.rows(),
          pair_str("depthwise_conv1d", x, w));
  const std::size_t k = w.rows(), c = w.cols();
  const std::size_t t_out = x.rows() - k + 1;
  const auto xd = x.data();
  const auto wd = w.data();
  std::vector<double> out(t_out * c, 0.0);
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      const double* xr = xd.data() + (t + j) * c;
      const double* wr = wd.data() + j * c;
      double* o = out.data() + t * c;
      for (std::size_t ch = 0; ch < c; ++ch) o[ch] += wr[ch] * xr[ch];
    }
  }
  return Tensor::make_result(
      "depthwise_conv1d", {t_out, c}, std::move(out), {&x, &w},
      [x, w, k, c, t_out](std::span<const double> g, Gradients& grads) {
        const auto xd = x.data();
        const auto wd = w.data();
        if (x.requires_grad()) {
          auto& gx = grads.slot(x);
          for (std::size_t t = 0; t < t_out; ++t)
            for (std::size_t j = 0; j < k; ++j)
              for (std::size_t ch = 0; ch < c; ++ch)
                gx[(t + j) * c + ch] += g[t * c + ch] * wd[j * c + ch];
        }
        if (w.requires_grad()) {
          auto& gw = grads.slot(w);
          for (std::size_t t = 0; t < t_out; ++t)
            for (std::size_t j = 0; j < k; ++j)
              for (std::size_t ch = 0; ch < c; ++ch)
                gw[j * c + ch] += g[t * c + ch] * xd[(t + j) * c + ch];
        }
      });
}

Tensor strided_conv1d(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride) {
  require(stride >= 1, "strided_conv1d: stride must be >= 1");
  require(x.rank() == 2 && w.rank() == 2 && w.rows() == stride * x.cols(),
          pair_str("strided_conv1d", x, w));
  require(b.rank() == 1 && b.dim(0) == w.cols(), pair_str("strided_conv1d bias", w, b));
  const std::size_t cin = x.cols(), cout = w.cols();
  const std::size_t t_out = x.rows() / stride;
  const std::size_t win = stride * cin;
  std::vector<double> out(t_out * cout);
  // Consecutive rows of a row-major [T, Cin] block are one contiguous window.
  for (std::size_t t = 0; t < t_out; ++t) std::copy_n(b.data().begin(), cout, out.begin() + static_cast<std::ptrdiff_t>(t * cout));
  gemm_nn(t_out, win, cout, x.data().data(), w.data().data(), out.data());
  return Tensor::make_result(
      "strided_conv1d", {t_out, cout}, std::move(out), {&x, &w, &b},
      [x, w, b, t_out, win, cout](std::span<const double> g, Gradients& grads) {
        if (x.requires_grad()) gemm_nt(t_out, cout, win, g.data(), w.data().data(), grads.slot(x).data());
        if (w.requires_grad()) gemm_tn(t_out, win, cout, x.data().data(), g.data(), grads.slot(w).data());
        if (b.requires_grad()) {
          auto& gb = grads.slot(b);
          for (std::size_t t = 0; t < t_out; ++t)
            for (std::size_t j = 0; j < cout; ++j) gb[j] += g[t * cout + j];
        }
      });
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
  require(a.rank() == 2 && start + count <= a.rows(),
          "slice_rows: [" + std::to_string(start) + ", +" + std::to_string(count) +
              ") out of range for " + shape_str(a.shape()));
  const std::size_t c = a.cols();
  const auto ad = a.data();
  std::vector<double> out(ad.begin() + static_cast<std::ptrdiff_t>(start * c),
                          ad.begin() + static_cast<std::ptrdiff_t>((start + count) * c));
  return Tensor::make_result("slice_rows", {count, c}, std::move(out), {&a},
                             [a, start, c](std::span<const double> g, Gradients& grads) {
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < g.size(); ++i) ga[start * c + i] += g[i];
                             });
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
  require(a.rank() == 2 && start + count <= a.cols(),
          "slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) +
              ") out of range for " + shape_str(a.shape()));
  const std::size_t r = a.rows(), c = a.cols();
  const auto ad = a.data();
  std::vector<double> out(r * count);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(ad.data() + i * c + start, count, out.data() + i * count);
  return Tensor::make_result("slice_cols", {r, count}, std::move(out), {&a},
                             [a, start, count, r, c](std::span<const double> g, Gradients& grads) {
                               auto& ga = grads.slot(a);
                               for (std::size_t i = 0; i < r; ++i)
                                 for (std::size_t j = 0; j < count; ++j)
                                   ga[i * c + start + j] += g[i * count + j];
                             });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::size_t c = parts[0].cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.rank() == 2 && p.cols() == c, pair_str("concat_rows", parts[0], p));
    total += p.rows();
  }
  std::vector<double> out;
  out.reserve(total * c);
  for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());

  std::vector<Tensor> held(parts.begin(), parts.end());
  const bool track = std::any_of(held.begin(), held.end(),
                                 [](const Tensor& p) { return p.requires_grad(); });
  return Tensor::make_result("concat_rows", {total, c}, std::move(out), track,
                             [held, c](std::span<const double> g, Gradients& grads) {
                               std::size_t off = 0;
                               for (const auto& p : held) {
                                 const std::size_t n = p.numel();
                                 if (p.requires_grad()) grads.accumulate(p, g.subspan(off, n));
                                 off += n;
                               }
                             });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t r = parts[0].rows();
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.rank() == 2 && p.rows() == r, pair_str("concat_cols", parts[0], p));
    total += p.cols();
  }
  std::vector<double> out(r * total);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.cols();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(p.data().data() + i * c, c, out.data() + i * total + off);
    off += c;
  }
  std::vector<Tensor> held(parts.begin(), parts.end());
  const bool track = std::any_of(held.begin(), held.end(),
                                 [](const Tensor& p) { return p.requires_grad(); });
  return Tensor::make_result("concat_cols", {r, total}, std::move(out), track,
                             [held, r, total](std::span<const double> g, Gradients& grads) {
                               std::size_t off = 0;
                               for (const auto& p : held) {
                                 const std::size_t c = p.cols();
                                 if (p.requires_grad()) {
                                   auto& gp = grads.slot(p);
                                   for (std::size_t i = 0; i < r; ++i)
                                     for (std::size_t j = 0; j < c; ++j)
                                       gp[i * c + j] += g[i * total + off + j];
                                 }
                                 off += c;
                               }
                             });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return Tensor::make_result("sum", {1}, {s}, {&a},
                             [a](std::span<const double> g, Gradients& grads) {
                               auto& ga = grads.slot(a);
                               for (double& v : ga) v += g[0];
                             });
}

Tensor mean(const Tensor& a) {
  require(a.numel() > 0, "mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

}  // namespace ssa::ops
