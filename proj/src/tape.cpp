// Copyright 2026 The lflh Authors
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

#include "lflh/tape.hpp"

#include <algorithm>
#include <cmath>

namespace lflh {

namespace {

double softplus_fwd(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Tape::push(std::vector<int> shape, std::vector<double> val,
               bool needs_grad) {
  Node n;
  n.shape = std::move(shape);
  n.val = std::move(val);
  n.grad.assign(n.val.size(), 0.0);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::check_same_tape(Var a) const {
  LFLH_REQUIRE(a.tape == this && a.id >= 0 &&
                   a.id < static_cast<int>(nodes_.size()),
               "variable does not belong to this tape");
}

Var Tape::param(Tensor& t) {
  Var v = push(t.shape, t.values, true);
  nodes_[v.id].bound = &t;
  return v;
}

Var Tape::constant(std::vector<int> shape, std::vector<double> values) {
  LFLH_REQUIRE(shape_product(shape) == values.size(),
               "constant shape/value mismatch");
  return push(std::move(shape), std::move(values), false);
}

Var Tape::constant(const Tensor& t) { return push(t.shape, t.values, false); }

Var Tape::scalar(double v) { return push({1}, {v}, false); }

Var Tape::add(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  LFLH_REQUIRE(same_shape(node(a.id).shape, node(b.id).shape),
               "add: shape mismatch");
  const auto& av = node(a.id).val;
  const auto& bv = node(b.id).val;
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  Var r = push(node(a.id).shape, std::move(out), needs(a) || needs(b));
  const int ra = a.id, rb = b.id, rr = r.id;
  node(rr).backprop = [ra, rb, rr](Tape& t) {
    const auto& g = t.node(rr).grad;
    if (t.node(ra).needs_grad) {
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      t.touch(ra);
    }
    if (t.node(rb).needs_grad) {
      auto& gb = t.node(rb).grad;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      t.touch(rb);
    }
  };
  return r;
}

Var Tape::sub(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  LFLH_REQUIRE(same_shape(node(a.id).shape, node(b.id).shape),
               "sub: shape mismatch");
  const auto& av = node(a.id).val;
  const auto& bv = node(b.id).val;
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  Var r = push(node(a.id).shape, std::move(out), needs(a) || needs(b));
  const int ra = a.id, rb = b.id, rr = r.id;
  node(rr).backprop = [ra, rb, rr](Tape& t) {
    const auto& g = t.node(rr).grad;
    if (t.node(ra).needs_grad) {
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      t.touch(ra);
    }
    if (t.node(rb).needs_grad) {
      auto& gb = t.node(rb).grad;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      t.touch(rb);
    }
  };
  return r;
}

Var Tape::mul(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  LFLH_REQUIRE(same_shape(node(a.id).shape, node(b.id).shape),
               "mul: shape mismatch");
  const auto& av = node(a.id).val;
  const auto& bv = node(b.id).val;
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  Var r = push(node(a.id).shape, std::move(out), needs(a) || needs(b));
  const int ra = a.id, rb = b.id, rr = r.id;
  node(rr).backprop = [ra, rb, rr](Tape& t) {
    const auto& g = t.node(rr).grad;
    if (t.node(ra).needs_grad) {
      auto& ga = t.node(ra).grad;
      const auto& bvv = t.node(rb).val;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bvv[i];
      t.touch(ra);
    }
    if (t.node(rb).needs_grad) {
      auto& gb = t.node(rb).grad;
      const auto& avv = t.node(ra).val;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * avv[i];
      t.touch(rb);
    }
  };
  return r;
}

Var Tape::div(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  LFLH_REQUIRE(same_shape(node(a.id).shape, node(b.id).shape),
               "div: shape mismatch");
  const auto& av = node(a.id).val;
  const auto& bv = node(b.id).val;
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] / bv[i];
  Var r = push(node(a.id).shape, std::move(out), needs(a) || needs(b));
  const int ra = a.id, rb = b.id, rr = r.id;
  node(rr).backprop = [ra, rb, rr](Tape& t) {
    const auto& g = t.node(rr).grad;
    const auto& avv = t.node(ra).val;
    const auto& bvv = t.node(rb).val;
    if (t.node(ra).needs_grad) {
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / bvv[i];
      t.touch(ra);
    }
    if (t.node(rb).needs_grad) {
      auto& gb = t.node(rb).grad;
      for (std::size_t i = 0; i < g.size(); ++i)
        gb[i] -= g[i] * avv[i] / (bvv[i] * bvv[i]);
      t.touch(rb);
    }
  };
  return r;
}

// Elementwise unary ops share one body; DERIV_EXPR may use the input x and
// the output y so cheap derivatives can reuse the forward value.
#define LFLH_UNARY_BODY(FWD_EXPR, DERIV_EXPR)                              \
  check_same_tape(a);                                                      \
  const auto& av = node(a.id).val;                                         \
  std::vector<double> out(av.size());                                      \
  for (std::size_t i = 0; i < av.size(); ++i) {                            \
    const double x = av[i];                                                \
    out[i] = (FWD_EXPR);                                                   \
  }                                                                        \
  Var r = push(node(a.id).shape, std::move(out), needs(a));                \
  if (needs(a)) {                                                          \
    const int ra = a.id, rr = r.id;                                        \
    node(rr).backprop = [ra, rr](Tape& t) {                                \
      const auto& g = t.node(rr).grad;                                     \
      const auto& xs = t.node(ra).val;                                     \
      const auto& ys = t.node(rr).val;                                     \
      auto& ga = t.node(ra).grad;                                          \
      for (std::size_t i = 0; i < g.size(); ++i) {                         \
        const double x = xs[i];                                            \
        const double y = ys[i];                                            \
        (void)x;                                                           \
        (void)y;                                                           \
        ga[i] += g[i] * (DERIV_EXPR);                                      \
      }                                                                    \
      t.touch(ra);                                                         \
    };                                                                     \
  }                                                                        \
  return r

Var Tape::relu(Var a) { LFLH_UNARY_BODY(x > 0.0 ? x : 0.0, x > 0.0 ? 1.0 : 0.0); }

Var Tape::tanh(Var a) { LFLH_UNARY_BODY(std::tanh(x), 1.0 - y * y); }

Var Tape::softplus(Var a) { LFLH_UNARY_BODY(softplus_fwd(x), sigmoid(x)); }

Var Tape::exp(Var a) { LFLH_UNARY_BODY(std::exp(x), y); }

Var Tape::log(Var a) { LFLH_UNARY_BODY(std::log(x), 1.0 / x); }

Var Tape::square(Var a) { LFLH_UNARY_BODY(x * x, 2.0 * x); }

Var Tape::sqrt(Var a) { LFLH_UNARY_BODY(std::sqrt(x), 0.5 / y); }

Var Tape::scale(Var a, double c) { LFLH_UNARY_BODY(x * c, c); }

Var Tape::add_scalar(Var a, double c) { LFLH_UNARY_BODY(x + c, 1.0); }

Var Tape::max_scalar(Var a, double c) {
  LFLH_UNARY_BODY(x > c ? x : c, x > c ? 1.0 : 0.0);
}

Var Tape::min_scalar(Var a, double c) {
  LFLH_UNARY_BODY(x < c ? x : c, x < c ? 1.0 : 0.0);
}

#undef LFLH_UNARY_BODY

Var Tape::matmul(Var a, Var b) {
  check_same_tape(a);
  check_same_tape(b);
  const auto& sa = node(a.id).shape;
  const auto& sb = node(b.id).shape;
  LFLH_REQUIRE(sa.size() == 2, "matmul: lhs must be 2-D");
  LFLH_REQUIRE(sb.size() == 1 || sb.size() == 2, "matmul: rhs must be 1-D or 2-D");
  const int m = sa[0], n = sa[1];
  const bool vec = sb.size() == 1;
  const int p = vec ? 1 : sb[1];
  LFLH_REQUIRE(sb[0] == n, "matmul: inner dimensions disagree");
  const auto& av = node(a.id).val;
  const auto& bv = node(b.id).val;
  std::vector<double> out(static_cast<std::size_t>(m) * p, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int kk = 0; kk < n; ++kk) {
      const double aik = av[static_cast<std::size_t>(i) * n + kk];
      if (aik == 0.0) continue;
      const std::size_t brow = static_cast<std::size_t>(kk) * p;
      const std::size_t crow = static_cast<std::size_t>(i) * p;
      for (int j = 0; j < p; ++j) out[crow + j] += aik * bv[brow + j];
    }
  }
  std::vector<int> oshape = vec ? std::vector<int>{m} : std::vector<int>{m, p};
  Var r = push(std::move(oshape), std::move(out), needs(a) || needs(b));
  const int ra = a.id, rb = b.id, rr = r.id;
  node(rr).backprop = [ra, rb, rr, m, n, p](Tape& t) {
    const auto& g = t.node(rr).grad;
    if (t.node(ra).needs_grad) {
      // dA = dC * B^T
      auto& ga = t.node(ra).grad;
      const auto& bvv = t.node(rb).val;
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < n; ++kk) {
          double acc = 0.0;
          const std::size_t crow = static_cast<std::size_t>(i) * p;
          const std::size_t brow = static_cast<std::size_t>(kk) * p;
          for (int j = 0; j < p; ++j) acc += g[crow + j] * bvv[brow + j];
          ga[static_cast<std::size_t>(i) * n + kk] += acc;
        }
      t.touch(ra);
    }
    if (t.node(rb).needs_grad) {
      // dB = A^T * dC
      auto& gb = t.node(rb).grad;
      const auto& avv = t.node(ra).val;
      for (int i = 0; i < m; ++i) {
        const std::size_t crow = static_cast<std::size_t>(i) * p;
        for (int kk = 0; kk < n; ++kk) {
          const double aik = avv[static_cast<std::size_t>(i) * n + kk];
          if (aik == 0.0) continue;
          const std::size_t brow = static_cast<std::size_t>(kk) * p;
          for (int j = 0; j < p; ++j) gb[brow + j] += aik * g[crow + j];
        }
      }
      t.touch(rb);
    }
  };
  return r;
}

Var Tape::transpose(Var a) {
  check_same_tape(a);
  const auto& sa = node(a.id).shape;
  LFLH_REQUIRE(sa.size() == 2, "transpose: 2-D only");
  const int m = sa[0], n = sa[1];
  const auto& av = node(a.id).val;
  std::vector<double> out(av.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * m + i] =
          av[static_cast<std::size_t>(i) * n + j];
  Var r = push({n, m}, std::move(out), needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr, m, n](Tape& t) {
      const auto& g = t.node(rr).grad;
      auto& ga = t.node(ra).grad;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          ga[static_cast<std::size_t>(i) * n + j] +=
              g[static_cast<std::size_t>(j) * m + i];
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::conv1d(Var input, Var kernels, Var bias, int stride) {
  check_same_tape(input);
  check_same_tape(kernels);
  check_same_tape(bias);
  LFLH_REQUIRE(stride >= 1, "conv1d: stride must be >= 1");
  const auto& si = node(input.id).shape;
  const auto& sk = node(kernels.id).shape;
  const auto& sb = node(bias.id).shape;
  LFLH_REQUIRE(si.size() == 2, "conv1d: input must be [channels x T]");
  LFLH_REQUIRE(sk.size() == 3, "conv1d: kernels must be [out x in x k]");
  LFLH_REQUIRE(sb.size() == 1 && sb[0] == sk[0],
               "conv1d: bias must match out channels");
  LFLH_REQUIRE(sk[1] == si[0], "conv1d: in-channel mismatch");
  const int cin = si[0], tlen = si[1];
  const int cout = sk[0], klen = sk[2];
  LFLH_REQUIRE(tlen >= klen, "conv1d: input shorter than kernel");
  const int tout = (tlen - klen) / stride + 1;
  const auto& iv = node(input.id).val;
  const auto& kv = node(kernels.id).val;
  const auto& bv = node(bias.id).val;
  std::vector<double> out(static_cast<std::size_t>(cout) * tout, 0.0);
  for (int o = 0; o < cout; ++o) {
    for (int t = 0; t < tout; ++t) {
      double acc = bv[o];
      const int t0 = t * stride;
      for (int c = 0; c < cin; ++c) {
        const std::size_t irow = static_cast<std::size_t>(c) * tlen + t0;
        const std::size_t krow =
            (static_cast<std::size_t>(o) * cin + c) * klen;
        for (int j = 0; j < klen; ++j) acc += iv[irow + j] * kv[krow + j];
      }
      out[static_cast<std::size_t>(o) * tout + t] = acc;
    }
  }
  Var r = push({cout, tout}, std::move(out),
               needs(input) || needs(kernels) || needs(bias));
  const int ri = input.id, rk = kernels.id, rb = bias.id, rr = r.id;
  node(rr).backprop = [ri, rk, rb, rr, cin, tlen, cout, klen, tout,
                       stride](Tape& t) {
    const auto& g = t.node(rr).grad;
    const auto& iv = t.node(ri).val;
    const auto& kv = t.node(rk).val;
    if (t.node(rb).needs_grad) {
      auto& gb = t.node(rb).grad;
      for (int o = 0; o < cout; ++o) {
        double acc = 0.0;
        for (int tt = 0; tt < tout; ++tt)
          acc += g[static_cast<std::size_t>(o) * tout + tt];
        gb[o] += acc;
      }
      t.touch(rb);
    }
    if (t.node(rk).needs_grad) {
      auto& gk = t.node(rk).grad;
      for (int o = 0; o < cout; ++o)
        for (int tt = 0; tt < tout; ++tt) {
          const double go = g[static_cast<std::size_t>(o) * tout + tt];
          if (go == 0.0) continue;
          const int t0 = tt * stride;
          for (int c = 0; c < cin; ++c) {
            const std::size_t irow = static_cast<std::size_t>(c) * tlen + t0;
            const std::size_t krow =
                (static_cast<std::size_t>(o) * cin + c) * klen;
            for (int j = 0; j < klen; ++j) gk[krow + j] += go * iv[irow + j];
          }
        }
      t.touch(rk);
    }
    if (t.node(ri).needs_grad) {
      auto& gi = t.node(ri).grad;
      for (int o = 0; o < cout; ++o)
        for (int tt = 0; tt < tout; ++tt) {
          const double go = g[static_cast<std::size_t>(o) * tout + tt];
          if (go == 0.0) continue;
          const int t0 = tt * stride;
          for (int c = 0; c < cin; ++c) {
            const std::size_t irow = static_cast<std::size_t>(c) * tlen + t0;
            const std::size_t krow =
                (static_cast<std::size_t>(o) * cin + c) * klen;
            for (int j = 0; j < klen; ++j) gi[irow + j] += go * kv[krow + j];
          }
        }
      t.touch(ri);
    }
  };
  return r;
}

Var Tape::add_rowvec(Var m, Var v) {
  check_same_tape(m);
  check_same_tape(v);
  const auto& sm = node(m.id).shape;
  const auto& sv = node(v.id).shape;
  LFLH_REQUIRE(sm.size() == 2 && sv.size() == 1 && sv[0] == sm[1],
               "add_rowvec: need [R,C] + [C]");
  const int rows = sm[0], cols = sm[1];
  const auto& mv = node(m.id).val;
  const auto& vv = node(v.id).val;
  std::vector<double> out(mv.size());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(i) * cols + j] =
          mv[static_cast<std::size_t>(i) * cols + j] + vv[j];
  Var r = push(sm, std::move(out), needs(m) || needs(v));
  const int rm = m.id, rv = v.id, rr = r.id;
  node(rr).backprop = [rm, rv, rr, rows, cols](Tape& t) {
    const auto& g = t.node(rr).grad;
    if (t.node(rm).needs_grad) {
      auto& gm = t.node(rm).grad;
      for (std::size_t i = 0; i < g.size(); ++i) gm[i] += g[i];
      t.touch(rm);
    }
    if (t.node(rv).needs_grad) {
      auto& gv = t.node(rv).grad;
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          gv[j] += g[static_cast<std::size_t>(i) * cols + j];
      t.touch(rv);
    }
  };
  return r;
}

Var Tape::broadcast(Var s, int n) {
  check_same_tape(s);
  LFLH_REQUIRE(node(s.id).val.size() == 1, "broadcast: source must be scalar");
  LFLH_REQUIRE(n >= 1, "broadcast: length must be positive");
  std::vector<double> out(static_cast<std::size_t>(n), node(s.id).val[0]);
  Var r = push({n}, std::move(out), needs(s));
  if (needs(s)) {
    const int rs = s.id, rr = r.id;
    node(rr).backprop = [rs, rr](Tape& t) {
      const auto& g = t.node(rr).grad;
      double acc = 0.0;
      for (double gi : g) acc += gi;
      t.node(rs).grad[0] += acc;
      t.touch(rs);
    };
  }
  return r;
}

Var Tape::slice_rows(Var a, int begin, int count) {
  check_same_tape(a);
  const auto& sa = node(a.id).shape;
  LFLH_REQUIRE(!sa.empty(), "slice_rows: scalar input");
  const int rows = sa[0];
  LFLH_REQUIRE(begin >= 0 && count >= 1 && begin + count <= rows,
               "slice_rows: range out of bounds");
  std::size_t rowlen = 1;
  for (std::size_t d = 1; d < sa.size(); ++d) rowlen *= sa[d];
  const auto& av = node(a.id).val;
  std::vector<double> out(av.begin() + begin * rowlen,
                          av.begin() + (begin + count) * rowlen);
  std::vector<int> oshape = sa;
  oshape[0] = count;
  Var r = push(std::move(oshape), std::move(out), needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr, begin, rowlen](Tape& t) {
      const auto& g = t.node(rr).grad;
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i)
        ga[begin * rowlen + i] += g[i];
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  LFLH_REQUIRE(!parts.empty(), "concat_rows: empty input");
  for (Var p : parts) check_same_tape(p);
  const auto& s0 = node(parts[0].id).shape;
  std::size_t rowlen = 1;
  for (std::size_t d = 1; d < s0.size(); ++d) rowlen *= s0[d];
  int rows = 0;
  bool any_grad = false;
  for (Var p : parts) {
    const auto& sp = node(p.id).shape;
    LFLH_REQUIRE(sp.size() == s0.size(), "concat_rows: rank mismatch");
    for (std::size_t d = 1; d < s0.size(); ++d)
      LFLH_REQUIRE(sp[d] == s0[d], "concat_rows: trailing dims differ");
    rows += sp[0];
    any_grad = any_grad || needs(p);
  }
  std::vector<double> out;
  out.reserve(rows * rowlen);
  for (Var p : parts)
    out.insert(out.end(), node(p.id).val.begin(), node(p.id).val.end());
  std::vector<int> oshape = s0;
  oshape[0] = rows;
  Var r = push(std::move(oshape), std::move(out), any_grad);
  if (any_grad) {
    std::vector<int> ids;
    ids.reserve(parts.size());
    for (Var p : parts) ids.push_back(p.id);
    const int rr = r.id;
    node(rr).backprop = [ids, rr](Tape& t) {
      const auto& g = t.node(rr).grad;
      std::size_t off = 0;
      for (int pid : ids) {
        const std::size_t sz = t.node(pid).val.size();
        if (t.node(pid).needs_grad) {
          auto& gp = t.node(pid).grad;
          for (std::size_t i = 0; i < sz; ++i) gp[i] += g[off + i];
          t.touch(pid);
        }
        off += sz;
      }
    };
  }
  return r;
}

Var Tape::reshape(Var a, std::vector<int> shape) {
  check_same_tape(a);
  LFLH_REQUIRE(shape_product(shape) == node(a.id).val.size(),
               "reshape: element count mismatch");
  Var r = push(std::move(shape), node(a.id).val, needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr](Tape& t) {
      const auto& g = t.node(rr).grad;
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::sum(Var a) {
  check_same_tape(a);
  const auto& av = node(a.id).val;
  double acc = 0.0;
  for (double x : av) acc += x;
  Var r = push({1}, {acc}, needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr](Tape& t) {
      const double g = t.node(rr).grad[0];
      auto& ga = t.node(ra).grad;
      for (double& gi : ga) gi += g;
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::mean(Var a) {
  check_same_tape(a);
  const auto& av = node(a.id).val;
  double acc = 0.0;
  for (double x : av) acc += x;
  const double inv = 1.0 / static_cast<double>(av.size());
  Var r = push({1}, {acc * inv}, needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr, inv](Tape& t) {
      const double g = t.node(rr).grad[0] * inv;
      auto& ga = t.node(ra).grad;
      for (double& gi : ga) gi += g;
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::reduce_min(Var a) {
  check_same_tape(a);
  const auto& av = node(a.id).val;
  LFLH_REQUIRE(!av.empty(), "reduce_min: empty input");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < av.size(); ++i)
    if (av[i] < av[arg]) arg = i;
  Var r = push({1}, {av[arg]}, needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr, arg](Tape& t) {
      t.node(ra).grad[arg] += t.node(rr).grad[0];
      t.touch(ra);
    };
  }
  return r;
}

Var Tape::row_min(Var a) {
  check_same_tape(a);
  const auto& sa = node(a.id).shape;
  LFLH_REQUIRE(sa.size() == 2, "row_min: 2-D only");
  const int rows = sa[0], cols = sa[1];
  const auto& av = node(a.id).val;
  std::vector<double> out(rows);
  std::vector<std::size_t> args(rows);
  for (int i = 0; i < rows; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * cols;
    std::size_t arg = base;
    for (int j = 1; j < cols; ++j)
      if (av[base + j] < av[arg]) arg = base + j;
    args[i] = arg;
    out[i] = av[arg];
  }
  Var r = push({rows}, std::move(out), needs(a));
  if (needs(a)) {
    const int ra = a.id, rr = r.id;
    node(rr).backprop = [ra, rr, args](Tape& t) {
      const auto& g = t.node(rr).grad;
      auto& ga = t.node(ra).grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[args[i]] += g[i];
      t.touch(ra);
    };
  }
  return r;
}

void Tape::backward(Var loss) {
  check_same_tape(loss);
  LFLH_REQUIRE(node(loss.id).val.size() == 1,
               "backward: loss must be a scalar");
  for (auto& n : nodes_) {
    std::fill(n.grad.begin(), n.grad.end(), 0.0);
    n.touched = false;
  }
  node(loss.id).grad[0] = 1.0;
  node(loss.id).touched = true;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.touched || !n.needs_grad) continue;
    if (n.backprop) n.backprop(*this);
    if (n.bound) {
      n.bound->ensure_grad();
      for (std::size_t j = 0; j < n.grad.size(); ++j)
        n.bound->grad[j] += n.grad[j];
    }
  }
}

const std::vector<double>& Tape::values(Var v) const {
  check_same_tape(v);
  return node(v.id).val;
}

const std::vector<int>& Tape::shape(Var v) const {
  check_same_tape(v);
  return node(v.id).shape;
}

double Tape::value(Var v) const {
  check_same_tape(v);
  LFLH_REQUIRE(node(v.id).val.size() == 1, "value: node is not scalar");
  return node(v.id).val[0];
}

}  // namespace lflh
