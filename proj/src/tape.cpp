#include "rrlm/tape.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrlm {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<RowMat<T>> as_matrix(TensorT<T>& t, int rows, int cols) {
    return Eigen::Map<RowMat<T>>(t.data.data(), rows, cols);
}

template <typename T>
Eigen::Map<const RowMat<T>> as_matrix(const TensorT<T>& t, int rows, int cols) {
    return Eigen::Map<const RowMat<T>>(t.data.data(), rows, cols);
}

// Rows/cols when a tensor is reduced along its last axis.
inline void last_axis_view(const std::vector<int>& shape, int& rows, int& cols) {
    if (shape.empty()) throw std::invalid_argument("operation needs at least one axis");
    cols = shape.back();
    rows = 1;
    for (size_t i = 0; i + 1 < shape.size(); ++i) rows *= shape[i];
}

constexpr double kGeluCoeff = 0.044715;

}  // namespace

template <typename T>
int TapeT<T>::push(Node node) {
    if (!node.out.all_finite()) {
        throw std::runtime_error("non-finite values in op output (tape node " +
                                 std::to_string(nodes_.size()) + ")");
    }
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

template <typename T>
void TapeT<T>::check_ref(Ref r) const {
    if (r.node < 0 || r.node >= static_cast<int>(nodes_.size())) {
        throw std::invalid_argument("invalid tape reference");
    }
}

template <typename T>
const TensorT<T>& TapeT<T>::out_of(Ref r) const {
    check_ref(r);
    return nodes_[r.node].out;
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::input(Tensor value) {
    Node n;
    n.op = Op::Input;
    n.out = std::move(value);
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::param(const std::string& name, const Tensor& value) {
    if (params_.count(name)) {
        throw std::invalid_argument("duplicate parameter name: " + name);
    }
    Node n;
    n.op = Op::Param;
    n.out = value;
    n.out.requires_grad = true;
    n.pname = name;
    int id = push(std::move(n));
    params_[name] = id;
    return Ref{id};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::matmul(Ref a, Ref b) {
    const Tensor& x = out_of(a);
    const Tensor& y = out_of(b);
    if (x.shape.size() != 2 || y.shape.size() != 2 || x.shape[1] != y.shape[0]) {
        throw std::invalid_argument("matmul shape mismatch: " + shape_to_string(x.shape) +
                                    " x " + shape_to_string(y.shape));
    }
    Node n;
    n.op = Op::MatMul;
    n.in = {a.node, b.node};
    n.out = Tensor({x.shape[0], y.shape[1]});
    as_matrix(n.out, x.shape[0], y.shape[1]).noalias() =
        as_matrix(x, x.shape[0], x.shape[1]) * as_matrix(y, y.shape[0], y.shape[1]);
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::transpose(Ref a) {
    const Tensor& x = out_of(a);
    if (x.shape.size() != 2) throw std::invalid_argument("transpose expects a 2-d tensor");
    Node n;
    n.op = Op::Transpose;
    n.in = {a.node};
    n.out = Tensor({x.shape[1], x.shape[0]});
    as_matrix(n.out, x.shape[1], x.shape[0]) =
        as_matrix(x, x.shape[0], x.shape[1]).transpose();
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::add(Ref a, Ref b) {
    const Tensor& x = out_of(a);
    const Tensor& y = out_of(b);
    if (!x.same_shape(y)) {
        throw std::invalid_argument("add shape mismatch: " + shape_to_string(x.shape) + " vs " +
                                    shape_to_string(y.shape));
    }
    Node n;
    n.op = Op::Add;
    n.in = {a.node, b.node};
    n.out = x;
    for (size_t i = 0; i < y.size(); ++i) n.out.data[i] += y.data[i];
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::add_row_bias(Ref m, Ref bias) {
    const Tensor& x = out_of(m);
    const Tensor& v = out_of(bias);
    if (x.shape.size() != 2 || v.shape.size() != 1 || v.shape[0] != x.shape[1]) {
        throw std::invalid_argument("add_row_bias shape mismatch");
    }
    Node n;
    n.op = Op::AddRow;
    n.in = {m.node, bias.node};
    n.out = x;
    for (int r = 0; r < x.shape[0]; ++r) {
        for (int c = 0; c < x.shape[1]; ++c) n.out.at(r, c) += v.data[c];
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::add_col_bias(Ref m, Ref bias) {
    const Tensor& x = out_of(m);
    const Tensor& v = out_of(bias);
    if (x.shape.size() != 2 || v.shape.size() != 1 || v.shape[0] != x.shape[0]) {
        throw std::invalid_argument("add_col_bias shape mismatch");
    }
    Node n;
    n.op = Op::AddCol;
    n.in = {m.node, bias.node};
    n.out = x;
    for (int r = 0; r < x.shape[0]; ++r) {
        for (int c = 0; c < x.shape[1]; ++c) n.out.at(r, c) += v.data[r];
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::mul(Ref a, Ref b) {
    const Tensor& x = out_of(a);
    const Tensor& y = out_of(b);
    if (!x.same_shape(y)) throw std::invalid_argument("mul shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.in = {a.node, b.node};
    n.out = x;
    for (size_t i = 0; i < y.size(); ++i) n.out.data[i] *= y.data[i];
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::scale(Ref a, T factor) {
    const Tensor& x = out_of(a);
    Node n;
    n.op = Op::Scale;
    n.in = {a.node};
    n.scalar = factor;
    n.out = x;
    for (T& v : n.out.data) v *= factor;
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::softmax(Ref a) {
    const Tensor& x = out_of(a);
    int rows, cols;
    last_axis_view(x.shape, rows, cols);
    Node n;
    n.op = Op::Softmax;
    n.in = {a.node};
    n.out = x;
    for (int r = 0; r < rows; ++r) {
        T* row = n.out.data.data() + static_cast<size_t>(r) * cols;
        T max = row[0];
        for (int c = 1; c < cols; ++c) max = std::max(max, row[c]);
        T total = T(0);
        for (int c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - max);
            total += row[c];
        }
        for (int c = 0; c < cols; ++c) row[c] /= total;
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::layer_norm(Ref a, T eps) {
    if (eps <= T(0)) throw std::invalid_argument("layer_norm epsilon must be positive");
    const Tensor& x = out_of(a);
    int rows, cols;
    last_axis_view(x.shape, rows, cols);
    Node n;
    n.op = Op::LayerNorm;
    n.in = {a.node};
    n.out = x;
    n.saved.resize(static_cast<size_t>(rows) * 2);
    for (int r = 0; r < rows; ++r) {
        T* row = n.out.data.data() + static_cast<size_t>(r) * cols;
        T mean = T(0);
        for (int c = 0; c < cols; ++c) mean += row[c];
        mean /= static_cast<T>(cols);
        T var = T(0);
        for (int c = 0; c < cols; ++c) {
            const T d = row[c] - mean;
            var += d * d;
        }
        var /= static_cast<T>(cols);
        const T inv_std = T(1) / std::sqrt(var + eps);
        for (int c = 0; c < cols; ++c) row[c] = (row[c] - mean) * inv_std;
        n.saved[static_cast<size_t>(r) * 2] = mean;
        n.saved[static_cast<size_t>(r) * 2 + 1] = inv_std;
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::gelu(Ref a) {
    const Tensor& x = out_of(a);
    Node n;
    n.op = Op::Gelu;
    n.in = {a.node};
    n.out = x;
    const T c = std::sqrt(T(2) / T(3.14159265358979323846));
    for (T& v : n.out.data) {
        const T u = c * (v + T(kGeluCoeff) * v * v * v);
        v = T(0.5) * v * (T(1) + std::tanh(u));
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::embedding(const std::vector<int>& ids, Ref table) {
    const Tensor& tab = out_of(table);
    if (tab.shape.size() != 2) throw std::invalid_argument("embedding table must be 2-d");
    if (ids.empty()) throw std::invalid_argument("embedding lookup needs at least one id");
    const int vocab = tab.shape[0];
    const int dim = tab.shape[1];
    Node n;
    n.op = Op::Embedding;
    n.in = {table.node};
    n.ids = ids;
    n.out = Tensor({static_cast<int>(ids.size()), dim});
    for (size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= vocab) {
            throw std::invalid_argument("embedding id out of range: " + std::to_string(ids[i]));
        }
        std::copy_n(tab.data.data() + static_cast<size_t>(ids[i]) * dim, dim,
                    n.out.data.data() + i * dim);
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::dropout(Ref a, T rate, DropoutStream* stream) {
    if (rate < T(0) || rate >= T(1)) throw std::invalid_argument("dropout rate must be in [0, 1)");
    if (stream == nullptr || !stream->enabled || rate == T(0)) {
        return a;  // evaluation mode: identity, no node
    }
    const Tensor& x = out_of(a);
    const uint64_t op_index = stream->take_op();
    const T keep_scale = T(1) / (T(1) - rate);
    Node n;
    n.op = Op::Dropout;
    n.in = {a.node};
    n.out = x;
    n.saved.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const bool keep =
            DropoutStream::keep(stream->base, op_index, i, static_cast<double>(rate));
        n.saved[i] = keep ? keep_scale : T(0);
        n.out.data[i] *= n.saved[i];
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::concat_cols(const std::vector<Ref>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols needs at least one input");
    const int rows = out_of(parts[0]).shape[0];
    int total_cols = 0;
    for (Ref p : parts) {
        const Tensor& t = out_of(p);
        if (t.shape.size() != 2 || t.shape[0] != rows) {
            throw std::invalid_argument("concat_cols inputs must share the row count");
        }
        total_cols += t.shape[1];
    }
    Node n;
    n.op = Op::ConcatCols;
    n.out = Tensor({rows, total_cols});
    int offset = 0;
    for (Ref p : parts) {
        const Tensor& t = out_of(p);
        n.in.push_back(p.node);
        for (int r = 0; r < rows; ++r) {
            std::copy_n(t.data.data() + static_cast<size_t>(r) * t.shape[1], t.shape[1],
                        n.out.data.data() + static_cast<size_t>(r) * total_cols + offset);
        }
        offset += t.shape[1];
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::slice_cols(Ref a, int start, int len) {
    const Tensor& x = out_of(a);
    if (x.shape.size() != 2 || start < 0 || len <= 0 || start + len > x.shape[1]) {
        throw std::invalid_argument("slice_cols out of range");
    }
    Node n;
    n.op = Op::SliceCols;
    n.in = {a.node};
    n.i0 = start;
    n.i1 = len;
    n.out = Tensor({x.shape[0], len});
    for (int r = 0; r < x.shape[0]; ++r) {
        std::copy_n(x.data.data() + static_cast<size_t>(r) * x.shape[1] + start, len,
                    n.out.data.data() + static_cast<size_t>(r) * len);
    }
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::sum(Ref a) {
    const Tensor& x = out_of(a);
    Node n;
    n.op = Op::Sum;
    n.in = {a.node};
    n.out = Tensor({1});
    T total = T(0);
    for (T v : x.data) total += v;
    n.out.data[0] = total;
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::mean_all(Ref a) {
    const Tensor& x = out_of(a);
    Node n;
    n.op = Op::MeanAll;
    n.in = {a.node};
    n.out = Tensor({1});
    T total = T(0);
    for (T v : x.data) total += v;
    n.out.data[0] = total / static_cast<T>(x.size());
    return Ref{push(std::move(n))};
}

template <typename T>
typename TapeT<T>::Ref TapeT<T>::cross_entropy(Ref logits, const std::vector<int>& labels,
                                               int ignore_index) {
    const Tensor& x = out_of(logits);
    if (x.shape.size() != 2) throw std::invalid_argument("cross_entropy expects 2-d logits");
    const int rows = x.shape[0];
    const int cols = x.shape[1];
    if (static_cast<int>(labels.size()) != rows) {
        throw std::invalid_argument("cross_entropy labels must match logit rows");
    }
    Node n;
    n.op = Op::CrossEntropy;
    n.in = {logits.node};
    n.ids = labels;
    n.saved.resize(x.size());  // softmax probabilities for backward
    int counted = 0;
    T loss = T(0);
    for (int r = 0; r < rows; ++r) {
        const T* row = x.data.data() + static_cast<size_t>(r) * cols;
        T* prow = n.saved.data() + static_cast<size_t>(r) * cols;
        T max = row[0];
        for (int c = 1; c < cols; ++c) max = std::max(max, row[c]);
        T total = T(0);
        for (int c = 0; c < cols; ++c) {
            prow[c] = std::exp(row[c] - max);
            total += prow[c];
        }
        for (int c = 0; c < cols; ++c) prow[c] /= total;
        const int label = labels[r];
        if (label == ignore_index) continue;
        if (label < 0 || label >= cols) {
            throw std::invalid_argument("cross_entropy label out of range");
        }
        loss += std::log(total) + max - row[label];
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("cross_entropy: no labeled positions");
    n.i0 = counted;
    n.i1 = ignore_index;
    n.out = Tensor({1});
    n.out.data[0] = loss / static_cast<T>(counted);
    return Ref{push(std::move(n))};
}

template <typename T>
const TensorT<T>& TapeT<T>::value(Ref r) const {
    return out_of(r);
}

template <typename T>
const TensorT<T>& TapeT<T>::grad(Ref r) const {
    check_ref(r);
    if (nodes_[r.node].grad.data.empty()) {
        throw std::logic_error("gradient not computed; run backward first");
    }
    return nodes_[r.node].grad;
}

template <typename T>
void TapeT<T>::backward(Ref loss) {
    check_ref(loss);
    if (out_of(loss).size() != 1) {
        throw std::invalid_argument("backward requires a scalar loss");
    }
    if (backward_done_ && nodes_.size() == nodes_at_last_backward_) {
        throw std::logic_error("backward called twice without re-running forward");
    }
    for (Node& n : nodes_) {
        n.grad = Tensor(n.out.shape);
    }
    nodes_[loss.node].grad.data[0] = T(1);
    std::vector<char> touched(nodes_.size(), 0);
    touched[loss.node] = 1;
    for (int i = loss.node; i >= 0; --i) {
        if (touched[i]) backward_node(i, touched);
    }
    backward_done_ = true;
    nodes_at_last_backward_ = nodes_.size();
}

template <typename T>
void TapeT<T>::backward_node(int index, std::vector<char>& touched) {
    Node& n = nodes_[index];
    const Tensor& g = n.grad;
    for (int in : n.in) touched[in] = 1;
    switch (n.op) {
        case Op::Input:
        case Op::Param:
            break;
        case Op::MatMul: {
            const Tensor& a = nodes_[n.in[0]].out;
            const Tensor& b = nodes_[n.in[1]].out;
            Tensor& ga = nodes_[n.in[0]].grad;
            Tensor& gb = nodes_[n.in[1]].grad;
            auto gm = as_matrix(g, a.shape[0], b.shape[1]);
            as_matrix(ga, a.shape[0], a.shape[1]).noalias() +=
                gm * as_matrix(b, b.shape[0], b.shape[1]).transpose();
            as_matrix(gb, b.shape[0], b.shape[1]).noalias() +=
                as_matrix(a, a.shape[0], a.shape[1]).transpose() * gm;
            break;
        }
        case Op::Transpose: {
            Tensor& ga = nodes_[n.in[0]].grad;
            const int rows = n.out.shape[0];
            const int cols = n.out.shape[1];
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) ga.at(c, r) += g.at(r, c);
            }
            break;
        }
        case Op::Add: {
            for (int k = 0; k < 2; ++k) {
                Tensor& gi = nodes_[n.in[k]].grad;
                for (size_t i = 0; i < g.size(); ++i) gi.data[i] += g.data[i];
            }
            break;
        }
        case Op::AddRow: {
            Tensor& gm = nodes_[n.in[0]].grad;
            Tensor& gv = nodes_[n.in[1]].grad;
            const int rows = n.out.shape[0];
            const int cols = n.out.shape[1];
            for (size_t i = 0; i < g.size(); ++i) gm.data[i] += g.data[i];
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) gv.data[c] += g.at(r, c);
            }
            break;
        }
        case Op::AddCol: {
            Tensor& gm = nodes_[n.in[0]].grad;
            Tensor& gv = nodes_[n.in[1]].grad;
            const int rows = n.out.shape[0];
            const int cols = n.out.shape[1];
            for (size_t i = 0; i < g.size(); ++i) gm.data[i] += g.data[i];
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) gv.data[r] += g.at(r, c);
            }
            break;
        }
        case Op::Mul: {
            const Tensor& a = nodes_[n.in[0]].out;
            const Tensor& b = nodes_[n.in[1]].out;
            Tensor& ga = nodes_[n.in[0]].grad;
            Tensor& gb = nodes_[n.in[1]].grad;
            for (size_t i = 0; i < g.size(); ++i) {
                ga.data[i] += g.data[i] * b.data[i];
                gb.data[i] += g.data[i] * a.data[i];
            }
            break;
        }
        case Op::Scale: {
            Tensor& ga = nodes_[n.in[0]].grad;
            for (size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * n.scalar;
            break;
        }
        case Op::Softmax: {
            Tensor& ga = nodes_[n.in[0]].grad;
            int rows, cols;
            last_axis_view(n.out.shape, rows, cols);
            for (int r = 0; r < rows; ++r) {
                const T* y = n.out.data.data() + static_cast<size_t>(r) * cols;
                const T* gy = g.data.data() + static_cast<size_t>(r) * cols;
                T* gx = ga.data.data() + static_cast<size_t>(r) * cols;
                T dot = T(0);
                for (int c = 0; c < cols; ++c) dot += gy[c] * y[c];
                for (int c = 0; c < cols; ++c) gx[c] += (gy[c] - dot) * y[c];
            }
            break;
        }
        case Op::LayerNorm: {
            Tensor& ga = nodes_[n.in[0]].grad;
            int rows, cols;
            last_axis_view(n.out.shape, rows, cols);
            for (int r = 0; r < rows; ++r) {
                const T* y = n.out.data.data() + static_cast<size_t>(r) * cols;
                const T* gy = g.data.data() + static_cast<size_t>(r) * cols;
                T* gx = ga.data.data() + static_cast<size_t>(r) * cols;
                const T inv_std = n.saved[static_cast<size_t>(r) * 2 + 1];
                T mean_gy = T(0);
                T mean_gy_y = T(0);
                for (int c = 0; c < cols; ++c) {
                    mean_gy += gy[c];
                    mean_gy_y += gy[c] * y[c];
                }
                mean_gy /= static_cast<T>(cols);
                mean_gy_y /= static_cast<T>(cols);
                for (int c = 0; c < cols; ++c) {
                    gx[c] += inv_std * (gy[c] - mean_gy - y[c] * mean_gy_y);
                }
            }
            break;
        }
        case Op::Gelu: {
            const Tensor& x = nodes_[n.in[0]].out;
            Tensor& ga = nodes_[n.in[0]].grad;
            const T c = std::sqrt(T(2) / T(3.14159265358979323846));
            for (size_t i = 0; i < g.size(); ++i) {
                const T v = x.data[i];
                const T u = c * (v + T(kGeluCoeff) * v * v * v);
                const T th = std::tanh(u);
                const T du = c * (T(1) + T(3) * T(kGeluCoeff) * v * v);
                const T d = T(0.5) * (T(1) + th) + T(0.5) * v * (T(1) - th * th) * du;
                ga.data[i] += g.data[i] * d;
            }
            break;
        }
        case Op::Embedding: {
            Tensor& gt = nodes_[n.in[0]].grad;
            const int dim = n.out.shape[1];
            for (size_t i = 0; i < n.ids.size(); ++i) {
                const T* src = g.data.data() + i * dim;
                T* dst = gt.data.data() + static_cast<size_t>(n.ids[i]) * dim;
                for (int d = 0; d < dim; ++d) dst[d] += src[d];
            }
            break;
        }
        case Op::Dropout: {
            Tensor& ga = nodes_[n.in[0]].grad;
            for (size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * n.saved[i];
            break;
        }
        case Op::ConcatCols: {
            const int rows = n.out.shape[0];
            const int total_cols = n.out.shape[1];
            int offset = 0;
            for (int in : n.in) {
                Tensor& gi = nodes_[in].grad;
                const int cols = nodes_[in].out.shape[1];
                for (int r = 0; r < rows; ++r) {
                    const T* src = g.data.data() + static_cast<size_t>(r) * total_cols + offset;
                    T* dst = gi.data.data() + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) dst[c] += src[c];
                }
                offset += cols;
            }
            break;
        }
        case Op::SliceCols: {
            Tensor& ga = nodes_[n.in[0]].grad;
            const int rows = n.out.shape[0];
            const int src_cols = nodes_[n.in[0]].out.shape[1];
            for (int r = 0; r < rows; ++r) {
                const T* src = g.data.data() + static_cast<size_t>(r) * n.i1;
                T* dst = ga.data.data() + static_cast<size_t>(r) * src_cols + n.i0;
                for (int c = 0; c < n.i1; ++c) dst[c] += src[c];
            }
            break;
        }
        case Op::Sum: {
            Tensor& ga = nodes_[n.in[0]].grad;
            for (T& v : ga.data) v += g.data[0];
            break;
        }
        case Op::MeanAll: {
            Tensor& ga = nodes_[n.in[0]].grad;
            const T w = g.data[0] / static_cast<T>(ga.size());
            for (T& v : ga.data) v += w;
            break;
        }
        case Op::CrossEntropy: {
            Tensor& gl = nodes_[n.in[0]].grad;
            const int rows = gl.shape[0];
            const int cols = gl.shape[1];
            const T w = g.data[0] / static_cast<T>(n.i0);
            for (int r = 0; r < rows; ++r) {
                const int label = n.ids[r];
                if (label < 0 || label >= cols) continue;  // ignored position
                const T* prow = n.saved.data() + static_cast<size_t>(r) * cols;
                T* grow = gl.data.data() + static_cast<size_t>(r) * cols;
                for (int c = 0; c < cols; ++c) grow[c] += w * prow[c];
                grow[label] -= w;
            }
            break;
        }
    }
}

template <typename T>
std::map<std::string, TensorT<T>> TapeT<T>::gradients() const {
    if (!backward_done_) throw std::logic_error("gradients requested before backward");
    std::map<std::string, Tensor> out;
    for (const auto& [name, node] : params_) {
        out.emplace(name, nodes_[node].grad);
    }
    return out;
}

template class TapeT<float>;
template class TapeT<double>;

}  // namespace rrlm
