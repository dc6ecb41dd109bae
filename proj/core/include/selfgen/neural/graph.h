#ifndef SELFGEN_NEURAL_GRAPH_H_
#define SELFGEN_NEURAL_GRAPH_H_

#include <cstddef>
#include <vector>

#include "selfgen/neural/param_store.h"
#include "selfgen/neural/rng.h"
#include "selfgen/neural/tensor.h"

namespace selfgen {

// Handle to a node of a Graph.
struct Var {
  int id = -1;
};

// Tape for reverse-mode differentiation. Nodes are appended in evaluation
// order, which is a topological order, so Backward walks the tape in reverse.
// Parameter leaves read the parameter in place and accumulate straight into
// Parameter::grad. A graph is single-use: build, Backward once, discard.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Tensor value);
  Var Param(Parameter& p);
  // Row `r` of a rank-2 parameter (embedding lookup).
  Var Row(Parameter& p, std::size_t r);

  Var MatVec(Var w, Var x);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double s);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var Relu(Var a);
  Var Concat(const std::vector<Var>& parts);
  Var Slice(Var a, std::size_t offset, std::size_t length);
  Var Dot(Var a, Var b);                      // scalar
  Var Sum(const std::vector<Var>& parts);     // elementwise, same shape
  Var Softmax(Var a);
  Var WeightedSum(Var weights, const std::vector<Var>& vectors);
  Var MaxPool(const std::vector<Var>& parts);  // elementwise max
  Var Mask(Var a, Tensor mask);                // elementwise by a constant
  // -log softmax(logits)[target], max-subtracted. Throws on a bad target.
  Var CrossEntropy(Var logits, std::size_t target);
  // Inverted dropout; identity when !training or rate == 0.
  Var Dropout(Var a, double rate, bool training, RngStream& rng);

  const Tensor& value(Var v) const;
  double scalar(Var v) const { return value(v)[0]; }
  std::size_t num_nodes() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and accumulates parameter gradients.
  void Backward(Var loss);

 private:
  enum class Op {
    kConstant, kParam, kRow, kMatVec, kAdd, kSub, kMul, kScale, kSigmoid,
    kTanh, kRelu, kConcat, kSlice, kDot, kSum, kSoftmax, kWeightedSum,
    kMaxPool, kMask, kCrossEntropy,
  };

  struct Node {
    Node(Op o, Tensor v, Tensor g, std::vector<int> in)
        : op(o), value(std::move(v)), grad(std::move(g)), inputs(std::move(in)) {}

    Op op;
    Tensor value;
    Tensor grad;
    std::vector<int> inputs;
    Parameter* param = nullptr;
    std::size_t index = 0;     // row / offset / target
    double scalar = 0.0;       // scale factor
    Tensor aux;                // softmax probs, mask, argmax indices
  };

  Var Push(Node node, const char* what);
  const Tensor& Val(int id) const;
  Tensor& GradOf(int id);
  void BackwardNode(Node& n);

  std::vector<Node> nodes_;
};

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_GRAPH_H_
