#include "jrank/ad/ops.hpp"

#include "jrank/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jrank::ad {
namespace {

[[noreturn]] void shape_fail(const char* op, const Array& a, const Array& b) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
}

Graph& graph_of(Var a, Var b) {
    if (a.graph == nullptr || a.graph != b.graph) throw ArgumentError("operands from different graphs");
    return *a.graph;
}

// Accumulate g (same shape as target, or scalar target receives the sum).
void accumulate(Graph& g, std::uint32_t target, const Array& contrib) {
    if (!g.requires_grad(target)) return;
    Array& dst = g.grad_buffer(target);
    if (dst.is_scalar() && !contrib.is_scalar()) {
        double s = 0.0;
        for (double v : contrib.values()) s += v;
        dst[0] += s;
        return;
    }
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += contrib[i];
}

enum class Broadcast { none, left_scalar, right_scalar };

Broadcast check_elementwise(const char* op, const Array& a, const Array& b) {
    if (a.same_shape(b)) return Broadcast::none;
    if (a.is_scalar()) return Broadcast::left_scalar;
    if (b.is_scalar()) return Broadcast::right_scalar;
    shape_fail(op, a, b);
}

template <typename F>
Array elementwise(const Array& a, const Array& b, Broadcast bc, F f) {
    const Array& big = bc == Broadcast::left_scalar ? b : a;
    Array out(big.rows(), big.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = bc == Broadcast::left_scalar ? a[0] : a[i];
        const double y = bc == Broadcast::right_scalar ? b[0] : b[i];
        out[i] = f(x, y);
    }
    return out;
}

} // namespace

Var add(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Broadcast bc = check_elementwise("add", a.value(), b.value());
    Array out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x + y; });
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(std::move(out), {a, b}, [ia, ib](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        accumulate(g, ia, go);
        accumulate(g, ib, go);
    });
}

Var sub(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Broadcast bc = check_elementwise("sub", a.value(), b.value());
    Array out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x - y; });
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(std::move(out), {a, b}, [ia, ib](Graph& g, std::uint32_t self) {
        Array go = g.grad_buffer(self);
        accumulate(g, ia, go);
        for (double& v : go.values()) v = -v;
        accumulate(g, ib, go);
    });
}

Var mul(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Broadcast bc = check_elementwise("mul", a.value(), b.value());
    Array out = elementwise(a.value(), b.value(), bc, [](double x, double y) { return x * y; });
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(std::move(out), {a, b}, [ia, ib, bc](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        const Array& av = g.value_of(ia);
        const Array& bv = g.value_of(ib);
        Array ga(go.rows(), go.cols()), gb(go.rows(), go.cols());
        for (std::size_t i = 0; i < go.size(); ++i) {
            const double x = bc == Broadcast::left_scalar ? av[0] : av[i];
            const double y = bc == Broadcast::right_scalar ? bv[0] : bv[i];
            ga[i] = go[i] * y;
            gb[i] = go[i] * x;
        }
        accumulate(g, ia, ga);
        accumulate(g, ib, gb);
    });
}

Var scale(Var a, double factor) {
    Graph& g = *a.graph;
    Array out = a.value();
    for (double& v : out.values()) v *= factor;
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia, factor](Graph& g, std::uint32_t self) {
        Array go = g.grad_buffer(self);
        for (double& v : go.values()) v *= factor;
        accumulate(g, ia, go);
    });
}

namespace {

// out (n x m) += a (n x k) * b (k x m)
void gemm_acc(const Array& a, const Array& b, Array& out) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* orow = out.values().data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a(i, p);
            if (av == 0.0) continue;
            const double* brow = b.values().data() + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

// out (k x m) += a^T (k x n) * go (n x m)
void gemm_at_b_acc(const Array& a, const Array& go, Array& out) {
    const std::size_t n = a.rows(), k = a.cols(), m = go.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* grow = go.values().data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a(i, p);
            if (av == 0.0) continue;
            double* orow = out.values().data() + p * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * grow[j];
        }
    }
}

// out (n x k) += go (n x m) * b^T (m x k)
void gemm_a_bt_acc(const Array& go, const Array& b, Array& out) {
    const std::size_t n = go.rows(), m = go.cols(), k = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* grow = go.values().data() + i * m;
        double* orow = out.values().data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double* brow = b.values().data() + p * m;
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
            orow[p] += s;
        }
    }
}

} // namespace

Var matmul(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Array& av = a.value();
    const Array& bv = b.value();
    if (av.cols() != bv.rows()) shape_fail("matmul", av, bv);
    Array out(av.rows(), bv.cols());
    gemm_acc(av, bv, out);
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(std::move(out), {a, b}, [ia, ib](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        if (g.requires_grad(ia)) gemm_a_bt_acc(go, g.value_of(ib), g.grad_buffer(ia));
        if (g.requires_grad(ib)) gemm_at_b_acc(g.value_of(ia), go, g.grad_buffer(ib));
    });
}

Var linear(Var x, Var w, Var bias) {
    Graph& g = graph_of(x, w);
    graph_of(x, bias);
    const Array& xv = x.value();
    const Array& wv = w.value();
    const Array& bv = bias.value();
    if (xv.cols() != wv.rows()) shape_fail("linear", xv, wv);
    if (bv.rows() != 1 || bv.cols() != wv.cols()) shape_fail("linear(bias)", wv, bv);
    Array out(xv.rows(), wv.cols());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = bv[j];
    gemm_acc(xv, wv, out);
    const std::uint32_t ix = x.id, iw = w.id, ib = bias.id;
    return g.record(std::move(out), {x, w, bias}, [ix, iw, ib](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        if (g.requires_grad(ix)) gemm_a_bt_acc(go, g.value_of(iw), g.grad_buffer(ix));
        if (g.requires_grad(iw)) gemm_at_b_acc(g.value_of(ix), go, g.grad_buffer(iw));
        if (g.requires_grad(ib)) {
            Array& gb = g.grad_buffer(ib);
            for (std::size_t i = 0; i < go.rows(); ++i)
                for (std::size_t j = 0; j < go.cols(); ++j) gb[j] += go(i, j);
        }
    });
}

Var transpose(Var a) {
    Graph& g = *a.graph;
    const Array& av = a.value();
    Array out(av.cols(), av.rows());
    for (std::size_t i = 0; i < av.rows(); ++i)
        for (std::size_t j = 0; j < av.cols(); ++j) out(j, i) = av(i, j);
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        Array& ga = g.grad_buffer(ia);
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += go(j, i);
    });
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ArgumentError("concat_cols: no operands");
    Graph& g = *parts.front().graph;
    const std::size_t rows = parts.front().rows();
    std::size_t cols = 0;
    for (const Var& p : parts) {
        if (p.rows() != rows) shape_fail("concat_cols", parts.front().value(), p.value());
        cols += p.cols();
    }
    Array out(rows, cols);
    std::vector<std::uint32_t> ids;
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const Var& p : parts) {
        const Array& v = p.value();
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < v.cols(); ++j) out(i, off + j) = v(i, j);
        ids.push_back(p.id);
        offsets.push_back(off);
        off += v.cols();
    }
    return g.record(std::move(out), parts, [ids, offsets](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (!g.requires_grad(ids[k])) continue;
            Array& gp = g.grad_buffer(ids[k]);
            for (std::size_t i = 0; i < gp.rows(); ++i)
                for (std::size_t j = 0; j < gp.cols(); ++j) gp(i, j) += go(i, offsets[k] + j);
        }
    });
}

Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ArgumentError("concat_rows: no operands");
    Graph& g = *parts.front().graph;
    const std::size_t cols = parts.front().cols();
    std::size_t rows = 0;
    for (const Var& p : parts) {
        if (p.cols() != cols) shape_fail("concat_rows", parts.front().value(), p.value());
        rows += p.rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    std::vector<std::uint32_t> ids;
    std::vector<std::size_t> offsets;
    for (const Var& p : parts) {
        offsets.push_back(data.size());
        ids.push_back(p.id);
        const auto v = p.value().values();
        data.insert(data.end(), v.begin(), v.end());
    }
    return g.record(Array(rows, cols, std::move(data)), parts,
                    [ids, offsets](Graph& g, std::uint32_t self) {
                        const Array& go = g.grad_buffer(self);
                        for (std::size_t k = 0; k < ids.size(); ++k) {
                            if (!g.requires_grad(ids[k])) continue;
                            Array& gp = g.grad_buffer(ids[k]);
                            for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[offsets[k] + i];
                        }
                    });
}

Var repeat_rows(Var row, std::size_t times) {
    Graph& g = *row.graph;
    const Array& rv = row.value();
    if (rv.rows() != 1) throw ShapeError("repeat_rows: expected a single row, got " + rv.shape_string());
    if (times == 0) throw ArgumentError("repeat_rows: times must be positive");
    Array out(times, rv.cols());
    for (std::size_t i = 0; i < times; ++i)
        for (std::size_t j = 0; j < rv.cols(); ++j) out(i, j) = rv[j];
    const std::uint32_t ir = row.id;
    return g.record(std::move(out), {row}, [ir](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ir)) return;
        const Array& go = g.grad_buffer(self);
        Array& gr = g.grad_buffer(ir);
        for (std::size_t i = 0; i < go.rows(); ++i)
            for (std::size_t j = 0; j < go.cols(); ++j) gr[j] += go(i, j);
    });
}

namespace {

template <typename F, typename D>
Var unary(Var a, F f, D dfdx_from_out) {
    Graph& g = *a.graph;
    Array out = a.value();
    for (double& v : out.values()) v = f(v);
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia, dfdx_from_out](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        const Array& y = g.value_of(self);
        const Array& x = g.value_of(ia);
        Array& ga = g.grad_buffer(ia);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * dfdx_from_out(x[i], y[i]);
    });
}

} // namespace

Var relu(Var a) {
    return unary(
        a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var tanh(Var a) {
    return unary(
        a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

namespace {
double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}
} // namespace

Var sigmoid(Var a) {
    return unary(a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var softmax(Var a, int axis) {
    if (axis != 0 && axis != 1) throw ArgumentError("softmax: axis must be 0 or 1");
    Graph& g = *a.graph;
    const Array& av = a.value();
    Array out(av.rows(), av.cols());
    const std::size_t groups = axis == 0 ? av.cols() : av.rows();
    const std::size_t len = axis == 0 ? av.rows() : av.cols();
    auto at = [&](Array& m, std::size_t grp, std::size_t k) -> double& {
        return axis == 0 ? m(k, grp) : m(grp, k);
    };
    for (std::size_t grp = 0; grp < groups; ++grp) {
        double mx = -INFINITY;
        for (std::size_t k = 0; k < len; ++k) mx = std::max(mx, axis == 0 ? av(k, grp) : av(grp, k));
        double z = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double e = std::exp((axis == 0 ? av(k, grp) : av(grp, k)) - mx);
            at(out, grp, k) = e;
            z += e;
        }
        for (std::size_t k = 0; k < len; ++k) at(out, grp, k) /= z;
    }
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia, axis, groups, len](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        const Array& y = g.value_of(self);
        Array& ga = g.grad_buffer(ia);
        for (std::size_t grp = 0; grp < groups; ++grp) {
            double s = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t idx = axis == 0 ? k * y.cols() + grp : grp * y.cols() + k;
                s += go[idx] * y[idx];
            }
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t idx = axis == 0 ? k * y.cols() + grp : grp * y.cols() + k;
                ga[idx] += y[idx] * (go[idx] - s);
            }
        }
    });
}

Var conv1d_window3(Var x, Var w, Var bias) {
    Graph& g = graph_of(x, w);
    graph_of(x, bias);
    const Array& xv = x.value();
    const Array& wv = w.value();
    const Array& bv = bias.value();
    const std::size_t n = xv.rows(), din = xv.cols(), dout = wv.cols();
    if (wv.rows() != 3 * din) shape_fail("conv1d_window3", xv, wv);
    if (bv.rows() != 1 || bv.cols() != dout) shape_fail("conv1d_window3(bias)", wv, bv);
    if (n == 0) throw ShapeError("conv1d_window3: empty sequence");

    Array out(n, dout);
    for (std::size_t i = 0; i < n; ++i) {
        double* orow = out.values().data() + i * dout;
        for (std::size_t j = 0; j < dout; ++j) orow[j] = bv[j];
        for (std::size_t k = 0; k < 3; ++k) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) + static_cast<std::ptrdiff_t>(k) - 1;
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
            for (std::size_t c = 0; c < din; ++c) {
                const double xv_c = xv(static_cast<std::size_t>(src), c);
                if (xv_c == 0.0) continue;
                const double* wrow = wv.values().data() + (k * din + c) * dout;
                for (std::size_t j = 0; j < dout; ++j) orow[j] += xv_c * wrow[j];
            }
        }
    }
    const std::uint32_t ix = x.id, iw = w.id, ib = bias.id;
    return g.record(std::move(out), {x, w, bias}, [ix, iw, ib, n, din, dout](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        const Array& xv = g.value_of(ix);
        const Array& wv = g.value_of(iw);
        const bool gx = g.requires_grad(ix), gw = g.requires_grad(iw);
        for (std::size_t i = 0; i < n; ++i) {
            const double* grow = go.values().data() + i * dout;
            for (std::size_t k = 0; k < 3; ++k) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) + static_cast<std::ptrdiff_t>(k) - 1;
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
                const auto s = static_cast<std::size_t>(src);
                for (std::size_t c = 0; c < din; ++c) {
                    const std::size_t wr = (k * din + c) * dout;
                    if (gx) {
                        const double* wrow = wv.values().data() + wr;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < dout; ++j) acc += grow[j] * wrow[j];
                        g.grad_buffer(ix)(s, c) += acc;
                    }
                    if (gw) {
                        const double xs = xv(s, c);
                        if (xs == 0.0) continue;
                        double* gwrow = g.grad_buffer(iw).values().data() + wr;
                        for (std::size_t j = 0; j < dout; ++j) gwrow[j] += xs * grow[j];
                    }
                }
            }
        }
        if (g.requires_grad(ib)) {
            Array& gb = g.grad_buffer(ib);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < dout; ++j) gb[j] += go(i, j);
        }
    });
}

namespace {
constexpr double kNormFloor = 1e-12;

std::vector<double> row_norms(const Array& a) {
    std::vector<double> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double v : a.row_span(i)) s += v * v;
        out[i] = std::sqrt(s);
    }
    return out;
}
} // namespace

Var cosine_matrix(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Array& av = a.value();
    const Array& bv = b.value();
    if (av.cols() != bv.cols()) shape_fail("cosine_matrix", av, bv);
    const std::size_t n = av.rows(), m = bv.rows(), d = av.cols();
    const auto na = row_norms(av);
    const auto nb = row_norms(bv);
    Array out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        if (na[i] < kNormFloor) continue;
        const double* ar = av.values().data() + i * d;
        for (std::size_t j = 0; j < m; ++j) {
            if (nb[j] < kNormFloor) continue;
            const double* br = bv.values().data() + j * d;
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += ar[c] * br[c];
            out(i, j) = s / (na[i] * nb[j]);
        }
    }
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(std::move(out), {a, b}, [ia, ib, na, nb, n, m, d](Graph& g, std::uint32_t self) {
        const Array& go = g.grad_buffer(self);
        const Array& s = g.value_of(self);
        const Array& av = g.value_of(ia);
        const Array& bv = g.value_of(ib);
        const bool ga = g.requires_grad(ia), gb = g.requires_grad(ib);
        for (std::size_t i = 0; i < n; ++i) {
            if (na[i] < kNormFloor) continue;
            const double* ar = av.values().data() + i * d;
            for (std::size_t j = 0; j < m; ++j) {
                if (nb[j] < kNormFloor) continue;
                const double gij = go(i, j);
                if (gij == 0.0) continue;
                const double* br = bv.values().data() + j * d;
                const double inv = 1.0 / (na[i] * nb[j]);
                const double sij = s(i, j);
                if (ga) {
                    double* gar = g.grad_buffer(ia).values().data() + i * d;
                    const double ca = sij / (na[i] * na[i]);
                    for (std::size_t c = 0; c < d; ++c) gar[c] += gij * (br[c] * inv - ca * ar[c]);
                }
                if (gb) {
                    double* gbr = g.grad_buffer(ib).values().data() + j * d;
                    const double cb = sij / (nb[j] * nb[j]);
                    for (std::size_t c = 0; c < d; ++c) gbr[c] += gij * (ar[c] * inv - cb * br[c]);
                }
            }
        }
    });
}

Var row_max(Var a) {
    Graph& g = *a.graph;
    const Array& av = a.value();
    if (av.cols() == 0) throw ShapeError("row_max: empty rows " + av.shape_string());
    Array out(av.rows(), 1);
    std::vector<std::size_t> arg(av.rows());
    for (std::size_t i = 0; i < av.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < av.cols(); ++j)
            if (av(i, j) > av(i, best)) best = j;
        arg[i] = best;
        out(i, 0) = av(i, best);
    }
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia, arg](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        Array& ga = g.grad_buffer(ia);
        for (std::size_t i = 0; i < arg.size(); ++i) ga(i, arg[i]) += go(i, 0);
    });
}

Var row_mean(Var a) {
    Graph& g = *a.graph;
    const Array& av = a.value();
    if (av.cols() == 0) throw ShapeError("row_mean: empty rows " + av.shape_string());
    Array out(av.rows(), 1);
    for (std::size_t i = 0; i < av.rows(); ++i) {
        double s = 0.0;
        for (double v : av.row_span(i)) s += v;
        out(i, 0) = s / static_cast<double>(av.cols());
    }
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        Array& ga = g.grad_buffer(ia);
        const double inv = 1.0 / static_cast<double>(ga.cols());
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += go(i, 0) * inv;
    });
}

Var row_topk_mean(Var a, std::size_t k) {
    Graph& g = *a.graph;
    const Array& av = a.value();
    if (k == 0) throw ArgumentError("row_topk_mean: k must be positive");
    if (k > av.cols())
        throw ShapeError("row_topk_mean: k=" + std::to_string(k) + " exceeds row length of " +
                         av.shape_string());
    const std::size_t m = av.cols();
    Array out(av.rows(), 1);
    std::vector<std::size_t> picked(av.rows() * k);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < av.rows(); ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t x, std::size_t y) {
                              return av(i, x) > av(i, y) || (av(i, x) == av(i, y) && x < y);
                          });
        double s = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            picked[i * k + t] = order[t];
            s += av(i, order[t]);
        }
        out(i, 0) = s / static_cast<double>(k);
    }
    const std::uint32_t ia = a.id;
    return g.record(std::move(out), {a}, [ia, picked, k](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const Array& go = g.grad_buffer(self);
        Array& ga = g.grad_buffer(ia);
        const double inv = 1.0 / static_cast<double>(k);
        for (std::size_t i = 0; i < ga.rows(); ++i)
            for (std::size_t t = 0; t < k; ++t) ga(i, picked[i * k + t]) += go(i, 0) * inv;
    });
}

Var dot(Var a, Var b) {
    Graph& g = graph_of(a, b);
    const Array& av = a.value();
    const Array& bv = b.value();
    if (!av.same_shape(bv)) shape_fail("dot", av, bv);
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    const std::uint32_t ia = a.id, ib = b.id;
    return g.record(Array::scalar(s), {a, b}, [ia, ib](Graph& g, std::uint32_t self) {
        const double go = g.grad_buffer(self)[0];
        if (g.requires_grad(ia)) {
            const Array& bv = g.value_of(ib);
            Array& ga = g.grad_buffer(ia);
            for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go * bv[i];
        }
        if (g.requires_grad(ib)) {
            const Array& av = g.value_of(ia);
            Array& gb = g.grad_buffer(ib);
            for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += go * av[i];
        }
    });
}

Var sum(Var a) {
    Graph& g = *a.graph;
    double s = 0.0;
    for (double v : a.value().values()) s += v;
    const std::uint32_t ia = a.id;
    return g.record(Array::scalar(s), {a}, [ia](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(ia)) return;
        const double go = g.grad_buffer(self)[0];
        for (double& v : g.grad_buffer(ia).values()) v += go;
    });
}

Var hinge(Var x, double margin) {
    Graph& g = *x.graph;
    if (!x.value().is_scalar()) throw ShapeError("hinge: expected (1x1), got " + x.value().shape_string());
    const double slack = margin - x.item();
    const bool active = slack > 0.0;
    const std::uint32_t ix = x.id;
    return g.record(Array::scalar(active ? slack : 0.0), {x}, [ix, active](Graph& g, std::uint32_t self) {
        if (!active || !g.requires_grad(ix)) return;
        g.grad_buffer(ix)[0] -= g.grad_buffer(self)[0];
    });
}

Var bce_with_logits(Var logits, const Array& labels, double eps) {
    Graph& g = *logits.graph;
    const Array& z = logits.value();
    if (!z.same_shape(labels)) shape_fail("bce_with_logits", z, labels);
    // Per-entry d loss / d logit; zero where the clamp is active.
    std::vector<double> dz(z.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double y = labels[i];
        if (y != 0.0 && y != 1.0) throw ArgumentError("bce_with_logits: labels must be 0 or 1");
        const double p = stable_sigmoid(z[i]);
        double pc = p;
        bool clamped = false;
        if (pc < eps) { pc = eps; clamped = true; }
        if (pc > 1.0 - eps) { pc = 1.0 - eps; clamped = true; }
        loss -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
        dz[i] = clamped ? 0.0 : p - y;
    }
    const std::uint32_t iz = logits.id;
    return g.record(Array::scalar(loss), {logits}, [iz, dz](Graph& g, std::uint32_t self) {
        if (!g.requires_grad(iz)) return;
        const double go = g.grad_buffer(self)[0];
        Array& gz = g.grad_buffer(iz);
        for (std::size_t i = 0; i < gz.size(); ++i) gz[i] += go * dz[i];
    });
}

} // namespace jrank::ad
