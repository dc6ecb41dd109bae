#include "selfgen/neural/graph.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

double SigmoidScalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void RequireSameSize(const Tensor& a, const Tensor& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": size mismatch " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace

Var Graph::Push(Node node, const char* what) {
  node.value.CheckFinite(what);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Graph::Val(int id) const {
  const Node& n = nodes_[id];
  return n.op == Op::kParam ? n.param->value : n.value;
}

const Tensor& Graph::value(Var v) const { return Val(v.id); }

Tensor& Graph::GradOf(int id) {
  Node& n = nodes_[id];
  return n.op == Op::kParam ? n.param->grad : n.grad;
}

Var Graph::Constant(Tensor value) {
  Node n{Op::kConstant, std::move(value), {}, {}};
  return Push(std::move(n), "constant");
}

Var Graph::Param(Parameter& p) {
  Node n{Op::kParam, {}, {}, {}};
  n.param = &p;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::Row(Parameter& p, std::size_t r) {
  if (p.value.rank() != 2 || r >= p.value.rows()) {
    throw DimensionError("row " + std::to_string(r) + " out of range for '" +
                         p.name + "'");
  }
  auto src = p.value.row(r);
  Node n{Op::kRow, Tensor::FromVector({src.begin(), src.end()}), {}, {}};
  n.param = &p;
  n.index = r;
  return Push(std::move(n), "embedding row");
}

Var Graph::MatVec(Var w, Var x) {
  const Tensor& W = Val(w.id);
  const Tensor& X = Val(x.id);
  if (W.rank() != 2 || W.cols() != X.size()) {
    throw DimensionError("matvec: " + ShapeString(W.shape()) + " times vector of " +
                         std::to_string(X.size()));
  }
  Tensor out(W.rows());
  const std::size_t cols = W.cols();
  const double* wd = W.storage().data();
  const double* xd = X.storage().data();
  for (std::size_t r = 0; r < W.rows(); ++r) {
    const double* row = wd + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * xd[c];
    out[r] = s;
  }
  Node n{Op::kMatVec, std::move(out), {}, {w.id, x.id}};
  return Push(std::move(n), "matvec");
}

Var Graph::Add(Var a, Var b) {
  const Tensor& A = Val(a.id);
  const Tensor& B = Val(b.id);
  RequireSameSize(A, B, "add");
  Tensor out = A.rank() == 1 ? A : Tensor::FromVector(A.storage());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  return Push(Node{Op::kAdd, std::move(out), {}, {a.id, b.id}}, "add");
}

Var Graph::Sub(Var a, Var b) {
  const Tensor& A = Val(a.id);
  const Tensor& B = Val(b.id);
  RequireSameSize(A, B, "sub");
  Tensor out = Tensor::FromVector(A.storage());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  return Push(Node{Op::kSub, std::move(out), {}, {a.id, b.id}}, "sub");
}

Var Graph::Mul(Var a, Var b) {
  const Tensor& A = Val(a.id);
  const Tensor& B = Val(b.id);
  RequireSameSize(A, B, "mul");
  Tensor out = Tensor::FromVector(A.storage());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  return Push(Node{Op::kMul, std::move(out), {}, {a.id, b.id}}, "mul");
}

Var Graph::Scale(Var a, double s) {
  Tensor out = Tensor::FromVector(Val(a.id).storage());
  for (double& v : out.values()) v *= s;
  Node n{Op::kScale, std::move(out), {}, {a.id}};
  n.scalar = s;
  return Push(std::move(n), "scale");
}

Var Graph::Sigmoid(Var a) {
  Tensor out = Tensor::FromVector(Val(a.id).storage());
  for (double& v : out.values()) v = SigmoidScalar(v);
  return Push(Node{Op::kSigmoid, std::move(out), {}, {a.id}}, "sigmoid");
}

Var Graph::Tanh(Var a) {
  Tensor out = Tensor::FromVector(Val(a.id).storage());
  for (double& v : out.values()) v = std::tanh(v);
  return Push(Node{Op::kTanh, std::move(out), {}, {a.id}}, "tanh");
}

Var Graph::Relu(Var a) {
  Tensor out = Tensor::FromVector(Val(a.id).storage());
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return Push(Node{Op::kRelu, std::move(out), {}, {a.id}}, "relu");
}

Var Graph::Concat(const std::vector<Var>& parts) {
  std::vector<double> out;
  std::vector<int> ids;
  for (Var p : parts) {
    const Tensor& t = Val(p.id);
    out.insert(out.end(), t.storage().begin(), t.storage().end());
    ids.push_back(p.id);
  }
  return Push(Node{Op::kConcat, Tensor::FromVector(std::move(out)), {}, std::move(ids)},
              "concat");
}

Var Graph::Slice(Var a, std::size_t offset, std::size_t length) {
  const Tensor& A = Val(a.id);
  if (offset + length > A.size()) throw DimensionError("slice out of range");
  std::vector<double> out(A.storage().begin() + offset,
                          A.storage().begin() + offset + length);
  Node n{Op::kSlice, Tensor::FromVector(std::move(out)), {}, {a.id}};
  n.index = offset;
  return Push(std::move(n), "slice");
}

Var Graph::Dot(Var a, Var b) {
  const Tensor& A = Val(a.id);
  const Tensor& B = Val(b.id);
  RequireSameSize(A, B, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) s += A[i] * B[i];
  return Push(Node{Op::kDot, Tensor::FromVector({s}), {}, {a.id, b.id}}, "dot");
}

Var Graph::Sum(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("sum of nothing");
  Tensor out = Tensor::FromVector(Val(parts[0].id).storage());
  std::vector<int> ids{parts[0].id};
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const Tensor& t = Val(parts[k].id);
    RequireSameSize(out, t, "sum");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t[i];
    ids.push_back(parts[k].id);
  }
  return Push(Node{Op::kSum, std::move(out), {}, std::move(ids)}, "sum");
}

Var Graph::Softmax(Var a) {
  const Tensor& A = Val(a.id);
  if (A.size() == 0) throw DimensionError("softmax of empty vector");
  const double mx = *std::max_element(A.storage().begin(), A.storage().end());
  Tensor out(A.size());
  double z = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    out[i] = std::exp(A[i] - mx);
    z += out[i];
  }
  for (double& v : out.values()) v /= z;
  return Push(Node{Op::kSoftmax, std::move(out), {}, {a.id}}, "softmax");
}

Var Graph::WeightedSum(Var weights, const std::vector<Var>& vectors) {
  const Tensor& w = Val(weights.id);
  if (w.size() != vectors.size() || vectors.empty()) {
    throw DimensionError("weighted sum: weight count mismatch");
  }
  Tensor out(Val(vectors[0].id).size());
  std::vector<int> ids{weights.id};
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const Tensor& v = Val(vectors[j].id);
    RequireSameSize(out, v, "weighted sum");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[j] * v[i];
    ids.push_back(vectors[j].id);
  }
  return Push(Node{Op::kWeightedSum, std::move(out), {}, std::move(ids)},
              "weighted sum");
}

Var Graph::MaxPool(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("max pool over empty sequence");
  const std::size_t d = Val(parts[0].id).size();
  Tensor out = Tensor::FromVector(Val(parts[0].id).storage());
  Tensor arg(d, 0.0);
  std::vector<int> ids{parts[0].id};
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const Tensor& t = Val(parts[k].id);
    RequireSameSize(out, t, "max pool");
    for (std::size_t i = 0; i < d; ++i) {
      if (t[i] > out[i]) {
        out[i] = t[i];
        arg[i] = static_cast<double>(k);
      }
    }
    ids.push_back(parts[k].id);
  }
  Node n{Op::kMaxPool, std::move(out), {}, std::move(ids)};
  n.aux = std::move(arg);
  return Push(std::move(n), "max pool");
}

Var Graph::Mask(Var a, Tensor mask) {
  const Tensor& A = Val(a.id);
  RequireSameSize(A, mask, "mask");
  Tensor out = Tensor::FromVector(A.storage());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  Node n{Op::kMask, std::move(out), {}, {a.id}};
  n.aux = std::move(mask);
  return Push(std::move(n), "mask");
}

Var Graph::Dropout(Var a, double rate, bool training, RngStream& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (!training || rate == 0.0) return a;
  const double keep = 1.0 / (1.0 - rate);
  Tensor mask(Val(a.id).size());
  for (double& m : mask.values()) m = rng.Uniform() < rate ? 0.0 : keep;
  return Mask(a, std::move(mask));
}

Var Graph::CrossEntropy(Var logits, std::size_t target) {
  const Tensor& L = Val(logits.id);
  if (target >= L.size()) {
    throw DimensionError("cross entropy target " + std::to_string(target) +
                         " out of range for " + std::to_string(L.size()) + " logits");
  }
  const double mx = *std::max_element(L.storage().begin(), L.storage().end());
  Tensor probs(L.size());
  double z = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    probs[i] = std::exp(L[i] - mx);
    z += probs[i];
  }
  for (double& p : probs.values()) p /= z;
  const double loss = -(L[target] - mx - std::log(z));
  Node n{Op::kCrossEntropy, Tensor::FromVector({loss}), {}, {logits.id}};
  n.index = target;
  n.aux = std::move(probs);
  return Push(std::move(n), "cross entropy");
}

void Graph::Backward(Var loss) {
  for (Node& n : nodes_) {
    if (n.op != Op::kParam) n.grad = Tensor(n.value.size());
  }
  nodes_[loss.id].grad.Fill(0.0);
  nodes_[loss.id].grad[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) BackwardNode(nodes_[id]);
}

void Graph::BackwardNode(Node& n) {
  const Tensor& g = n.grad;
  switch (n.op) {
    case Op::kConstant:
    case Op::kParam:
      return;
    case Op::kRow: {
      auto dst = n.param->grad.row(n.index);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
      return;
    }
    case Op::kMatVec: {
      const Tensor& W = Val(n.inputs[0]);
      const Tensor& X = Val(n.inputs[1]);
      Tensor& gw = GradOf(n.inputs[0]);
      Tensor& gx = GradOf(n.inputs[1]);
      const std::size_t cols = W.cols();
      const bool w_needs = nodes_[n.inputs[0]].op != Op::kConstant;
      for (std::size_t r = 0; r < W.rows(); ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        const double* wrow = W.storage().data() + r * cols;
        double* gwrow = gw.storage().data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
          if (w_needs) gwrow[c] += gr * X[c];
          gx[c] += gr * wrow[c];
        }
      }
      return;
    }
    case Op::kAdd: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      Tensor& gb = GradOf(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      return;
    }
    case Op::kSub: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      Tensor& gb = GradOf(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      return;
    }
    case Op::kMul: {
      const Tensor& A = Val(n.inputs[0]);
      const Tensor& B = Val(n.inputs[1]);
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
      Tensor& gb = GradOf(n.inputs[1]);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
      return;
    }
    case Op::kScale: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.scalar;
      return;
    }
    case Op::kSigmoid: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = n.value[i];
        ga[i] += g[i] * s * (1.0 - s);
      }
      return;
    }
    case Op::kTanh: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = n.value[i];
        ga[i] += g[i] * (1.0 - t * t);
      }
      return;
    }
    case Op::kRelu: {
      Tensor& ga = GradOf(n.inputs[0]);
      const Tensor& A = Val(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (A[i] > 0.0) ga[i] += g[i];
      }
      return;
    }
    case Op::kConcat: {
      std::size_t off = 0;
      for (int in : n.inputs) {
        Tensor& gi = GradOf(in);
        for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += g[off + i];
        off += gi.size();
      }
      return;
    }
    case Op::kSlice: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[n.index + i] += g[i];
      return;
    }
    case Op::kDot: {
      const Tensor& A = Val(n.inputs[0]);
      const Tensor& B = Val(n.inputs[1]);
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < A.size(); ++i) ga[i] += g[0] * B[i];
      Tensor& gb = GradOf(n.inputs[1]);
      for (std::size_t i = 0; i < B.size(); ++i) gb[i] += g[0] * A[i];
      return;
    }
    case Op::kSum: {
      for (int in : n.inputs) {
        Tensor& gi = GradOf(in);
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
      }
      return;
    }
    case Op::kSoftmax: {
      double gp = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) gp += g[i] * n.value[i];
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.value[i] * (g[i] - gp);
      return;
    }
    case Op::kWeightedSum: {
      const Tensor& w = Val(n.inputs[0]);
      Tensor& gw = GradOf(n.inputs[0]);
      for (std::size_t j = 1; j < n.inputs.size(); ++j) {
        const Tensor& v = Val(n.inputs[j]);
        Tensor& gv = GradOf(n.inputs[j]);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          s += g[i] * v[i];
          gv[i] += g[i] * w[j - 1];
        }
        gw[j - 1] += s;
      }
      return;
    }
    case Op::kMaxPool: {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = static_cast<std::size_t>(n.aux[i]);
        GradOf(n.inputs[k])[i] += g[i];
      }
      return;
    }
    case Op::kMask: {
      Tensor& ga = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.aux[i];
      return;
    }
    case Op::kCrossEntropy: {
      Tensor& gl = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < gl.size(); ++i) {
        gl[i] += g[0] * (n.aux[i] - (i == n.index ? 1.0 : 0.0));
      }
      return;
    }
  }
}

}  // namespace selfgen
