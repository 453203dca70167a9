#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rrlm/rng.hpp"
#include "rrlm/tensor.hpp"

namespace rrlm {

// Reverse-mode autodiff over a growing op tape. Creation order is the
// topological order: every node's inputs precede it, and backward() is a
// single reverse sweep. One tape is confined to one worker; distinct tapes
// over shared read-only parameters may run concurrently.
template <typename T>
class TapeT {
public:
    using Tensor = TensorT<T>;

    struct Ref {
        int node = -1;
        bool valid() const { return node >= 0; }
    };

    // -------- leaves --------
    Ref input(Tensor value);
    Ref param(const std::string& name, const Tensor& value);

    // -------- primitives --------
    Ref matmul(Ref a, Ref b);
    Ref transpose(Ref a);
    Ref add(Ref a, Ref b);
    Ref add_row_bias(Ref m, Ref bias);  // bias added to every row
    Ref add_col_bias(Ref m, Ref bias);  // bias[i] added across row i
    Ref mul(Ref a, Ref b);
    Ref scale(Ref a, T factor);
    Ref softmax(Ref a);              // along the last axis
    Ref layer_norm(Ref a, T eps);    // along the last axis, no gain/bias
    Ref gelu(Ref a);                 // tanh approximation
    Ref embedding(const std::vector<int>& ids, Ref table);
    Ref dropout(Ref a, T rate, DropoutStream* stream);
    Ref concat_cols(const std::vector<Ref>& parts);
    Ref slice_cols(Ref a, int start, int len);
    Ref sum(Ref a);
    Ref mean_all(Ref a);
    // Mean CE over positions whose label != ignore_index.
    Ref cross_entropy(Ref logits, const std::vector<int>& labels, int ignore_index = -1);

    // -------- results --------
    const Tensor& value(Ref r) const;
    void backward(Ref loss);
    const Tensor& grad(Ref r) const;
    // Gradient per registered parameter; zero tensors for parameters with
    // no path to the loss.
    std::map<std::string, Tensor> gradients() const;

    size_t node_count() const { return nodes_.size(); }

private:
    enum class Op : uint8_t {
        Input,
        Param,
        MatMul,
        Transpose,
        Add,
        AddRow,
        AddCol,
        Mul,
        Scale,
        Softmax,
        LayerNorm,
        Gelu,
        Embedding,
        Dropout,
        ConcatCols,
        SliceCols,
        Sum,
        MeanAll,
        CrossEntropy,
    };

    struct Node {
        Op op;
        std::vector<int> in;
        Tensor out;
        Tensor grad;
        std::vector<int> ids;    // embedding ids / CE labels
        std::vector<T> saved;    // op-specific forward state
        T scalar = T(0);
        int i0 = 0;
        int i1 = 0;
        std::string pname;
    };

    int push(Node node);
    const Tensor& out_of(Ref r) const;
    void check_ref(Ref r) const;
    void backward_node(int index, std::vector<char>& touched);

    std::vector<Node> nodes_;
    std::map<std::string, int> params_;
    size_t nodes_at_last_backward_ = 0;
    bool backward_done_ = false;
};

using Tape = TapeT<float>;
using Tape64 = TapeT<double>;

}  // namespace rrlm
