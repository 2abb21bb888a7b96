// Copyright 2026 The seanet-cpp Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// Every value in the network is a 2-D matrix. Sequences are stored
// frame-major: one row per time step (or chunk position), one column per
// feature. A Var is a shared handle to a graph node; operations create new
// nodes that remember their parents and a closure that pushes the output
// gradient back into them. Nodes built while no input requires a gradient
// (or inside a NoGradGuard) carry no closure, so inference builds no graph.

#ifndef SEANET_CORE_TENSOR_HPP_
#define SEANET_CORE_TENSOR_HPP_

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace seanet {

using Index = Eigen::Index;

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

namespace detail {
inline bool& grad_enabled_flag() {
  thread_local bool enabled = true;
  return enabled;
}
}  // namespace detail

/// Disables graph construction on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::grad_enabled_flag()) {
    detail::grad_enabled_flag() = false;
  }
  ~NoGradGuard() { detail::grad_enabled_flag() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

inline bool grad_enabled() { return detail::grad_enabled_flag(); }

template <typename T>
struct Node {
  Matrix<T> value;
  Matrix<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads `grad` of the owning node and accumulates into parents.
  std::function<void(Node&)> backward;

  template <typename Derived>
  void accumulate(const Eigen::MatrixBase<Derived>& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
  bool has_grad() const { return grad.size() != 0; }
  void ensure_grad() {
    if (grad.size() == 0) grad = Matrix<T>::Zero(value.rows(), value.cols());
  }
};

template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(Matrix<T> value, bool requires_grad = false)
      : node_(std::make_shared<Node<T>>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
  }
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Var scalar(T v) {
    Matrix<T> m(1, 1);
    m(0, 0) = v;
    return Var(std::move(m));
  }

  bool defined() const { return node_ != nullptr; }
  const Matrix<T>& value() const { return node_->value; }
  Matrix<T>& mutable_value() { return node_->value; }
  const Matrix<T>& grad() const { return node_->grad; }
  Matrix<T>& mutable_grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool r) { node_->requires_grad = r; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  T item() const {
    if (node_->value.size() != 1) throw std::logic_error("item() on non-scalar Var");
    return node_->value(0, 0);
  }
  void zero_grad() { node_->grad.resize(0, 0); }

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Creates the output node of an operation. `backward` receives the output
/// node; it is attached only if some parent needs a gradient.
template <typename T>
Var<T> make_op(Matrix<T> value, std::vector<Var<T>> parents,
               std::function<void(Node<T>&)> backward) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.shared());
    node->backward = std::move(backward);
  }
  return Var<T>(std::move(node));
}

/// Back-propagates from a scalar (or seeded) root. Leaf gradients accumulate.
template <typename T>
void backward(const Var<T>& root, const Matrix<T>* seed = nullptr) {
  if (!root.requires_grad()) return;
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  // Iterative post-order DFS.
  std::vector<std::pair<Node<T>*, size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  Node<T>* r = root.node();
  if (seed != nullptr) {
    r->accumulate(*seed);
  } else {
    if (r->value.size() != 1) throw std::logic_error("backward() needs a seed for non-scalar roots");
    r->accumulate(Matrix<T>::Ones(1, 1));
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
    if (n->backward) {
      // Interior gradients are not needed after propagation.
      n->grad.resize(0, 0);
    }
  }
}

/// Helper for closures: accumulate into parent `i` when it wants a gradient.
template <typename T, typename Derived>
inline void push_grad(Node<T>& out, size_t i, const Eigen::MatrixBase<Derived>& g) {
  Node<T>* p = out.parents[i].get();
  if (p->requires_grad) p->accumulate(g);
}

template <typename T>
inline bool wants_grad(const Node<T>& out, size_t i) {
  return out.parents[i]->requires_grad;
}

}  // namespace seanet

#endif  // SEANET_CORE_TENSOR_HPP_
