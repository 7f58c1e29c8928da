#include "sigmastrip/measure.hpp"

#include <cmath>
#include <stdexcept>

#include "sigmastrip/codec.hpp"

namespace sigmastrip {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Eigen::MatrixXd weight_matrix(const StripGraph& strip, const Eigen::VectorXd& t) {
  const int n = strip.n_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    const double w = ed.beta * std::exp(t[ed.tail] + t[ed.head]);
    a(ed.tail, ed.head) -= w;
    a(ed.head, ed.tail) -= w;
    a(ed.tail, ed.tail) += w;
    a(ed.head, ed.head) += w;
  }
  return a;
}

Eigen::MatrixXd pinned_weight_matrix(const StripGraph& strip, const Eigen::VectorXd& t) {
  Eigen::MatrixXd a = weight_matrix(strip, t);
  const int p = strip.pin_vertex();
  a(p, p) += strip.weights().epsilon * std::exp(t[p]);
  return a;
}

double coupling_energy(const StripGraph& strip, const Eigen::VectorXd& t) {
  double f = 0;
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    f += ed.beta * (std::cosh(t[ed.head] - t[ed.tail]) - 1.0);
  }
  return f;
}

double s_quadratic_form(const StripGraph& strip, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& s) {
  double q = 0;
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    const double ds = s[ed.head] - s[ed.tail];
    q += ed.beta * ds * ds * std::exp(t[ed.tail] + t[ed.head]);
  }
  return q;
}

double pin_energy(const StripGraph& strip, double t0, double s0) {
  const double eps = strip.weights().epsilon;
  return eps * (std::cosh(t0) - 1.0 + 0.5 * s0 * s0 * std::exp(t0));
}

double log_det_pinned(const StripGraph& strip, const Eigen::VectorXd& t) {
  Eigen::LLT<Eigen::MatrixXd> llt(pinned_weight_matrix(strip, t));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_det_pinned: matrix is not positive definite");
  double ld = 0;
  for (int i = 0; i < strip.n_vertices(); ++i) ld += std::log(llt.matrixL()(i, i));
  return 2.0 * ld;
}

double log_density(const StripGraph& strip, const FieldConfig& f) {
  const int n = strip.n_vertices();
  const int p = strip.pin_vertex();
  double lp = -f.t.sum() - n * std::log(kTwoPi);
  lp -= coupling_energy(strip, f.t);
  lp -= 0.5 * s_quadratic_form(strip, f.t, f.s);
  lp += log_det_pinned(strip, f.t);
  lp -= pin_energy(strip, f.t[p], f.s[p]);
  return lp;
}

double tree_hamiltonian(const StripGraph& strip, const FieldConfig& f, const SpanningTree& tree) {
  const int p = strip.pin_vertex();
  const double eps = strip.weights().epsilon;
  double h = coupling_energy(strip, f.t) + 0.5 * s_quadratic_form(strip, f.t, f.s);
  h += f.t.sum();
  h += pin_energy(strip, f.t[p], f.s[p]);
  h -= f.t[p] + std::log(eps);
  for (int e : tree.edges) {
    const auto& ed = strip.edge(e);
    h -= f.t[ed.tail] + f.t[ed.head] + std::log(ed.beta);
  }
  return h;
}

double log_density_by_tree_sum(const StripGraph& strip, const FieldConfig& f, int max_vertices) {
  const auto trees = enumerate_spanning_trees(strip, max_vertices);
  double hmin = std::numeric_limits<double>::infinity();
  std::vector<double> hs;
  hs.reserve(trees.size());
  for (const auto& tree : trees) {
    hs.push_back(tree_hamiltonian(strip, f, tree));
    hmin = std::min(hmin, hs.back());
  }
  double acc = 0;
  for (double h : hs) acc += std::exp(hmin - h);
  return -hmin + std::log(acc) - strip.n_vertices() * std::log(kTwoPi);
}

std::pair<double, double> matrix_tree_check(const StripGraph& strip, const Eigen::VectorXd& t,
                                            int max_vertices) {
  if (strip.n_vertices() > max_vertices)
    throw std::invalid_argument("matrix_tree_check: strip exceeds the enumeration guard");
  const double det = pinned_weight_matrix(strip, t).partialPivLu().determinant();
  double sum = 0;
  for (const auto& tree : enumerate_spanning_trees(strip, max_vertices)) {
    double w = 1.0;
    for (int e : tree.edges) {
      const auto& ed = strip.edge(e);
      w *= ed.beta * std::exp(t[ed.tail] + t[ed.head]);
    }
    sum += w;
  }
  sum *= strip.weights().epsilon * std::exp(t[strip.pin_vertex()]);
  return {det, sum};
}

double pin_hamiltonian(const StripGraph& strip, double t0, double s0) {
  return pin_energy(strip, t0, s0) - std::log(strip.weights().epsilon / kTwoPi);
}

double log_gradient_jacobian(const StripGraph& strip, const Eigen::VectorXd& t) {
  double sum = 0;
  for (int e : strip.backbone_edges()) {
    const auto& ed = strip.edge(e);
    sum += t[ed.tail] + t[ed.head];
  }
  return -0.5 * sum;
}

GradientConfig to_gradient(const StripGraph& strip, const FieldConfig& f) {
  const TreeView& view = strip.backbone_view();
  const auto& bb = strip.backbone_edges();
  GradientConfig g;
  g.t0 = f.t[strip.pin_vertex()];
  g.s0 = f.s[strip.pin_vertex()];
  g.grad_t.resize(bb.size());
  g.grad_y.resize(bb.size());
  for (size_t i = 0; i < bb.size(); ++i) {
    const int tail = view.tail(bb[i]);
    const int head = view.head(bb[i]);
    g.grad_t[i] = f.t[head] - f.t[tail];
    g.grad_y[i] = (f.s[head] - f.s[tail]) * std::exp(0.5 * (f.t[tail] + f.t[head]));
  }
  return g;
}

FieldConfig from_gradient(const StripGraph& strip, const GradientConfig& g) {
  const TreeView& view = strip.backbone_view();
  const int n = strip.n_vertices();
  FieldConfig f;
  f.t.resize(n);
  f.s.resize(n);

  // Accumulate t from the root, then shift so the pin value matches.
  std::vector<int> order;
  order.reserve(n);
  order.push_back(strip.root());
  f.t[strip.root()] = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    const int v = order[k];
    for (auto [e, w] : strip.adjacency(v)) {
      if (!view.in_tree(e) || view.parent(w) != v) continue;
      f.t[w] = f.t[v] + g.grad_t[strip.backbone_index(e)];
      order.push_back(w);
    }
  }
  f.t.array() += g.t0 - f.t[strip.pin_vertex()];

  f.s[strip.root()] = 0;
  for (int v : order) {
    for (auto [e, w] : strip.adjacency(v)) {
      if (!view.in_tree(e) || view.parent(w) != v) continue;
      f.s[w] = f.s[v] + g.grad_y[strip.backbone_index(e)] * std::exp(-0.5 * (f.t[v] + f.t[w]));
    }
  }
  f.s.array() += g.s0 - f.s[strip.pin_vertex()];
  return f;
}

double t_difference(const StripGraph& strip, const GradientConfig& g, int i, int j) {
  const TreeView& view = strip.backbone_view();
  double d = 0;
  for (const auto& oe : view.path(i, j)) {
    const double sgn = (oe.tail == view.tail(oe.edge)) ? 1.0 : -1.0;
    d += sgn * g.grad_t[strip.backbone_index(oe.edge)];
  }
  return d;
}

double y_edge(const StripGraph& strip, const GradientConfig& g, int tail, int head) {
  const TreeView& view = strip.backbone_view();
  const auto path = view.path(tail, head);
  double y = 0;
  for (const auto& oe : path) {
    const double sgn = (oe.tail == view.tail(oe.edge)) ? 1.0 : -1.0;
    const int anchor = view.tail(oe.edge);  // endpoint of oe nearer the root
    double expo = 0;
    for (const auto& other : path) {
      if (other.edge == oe.edge) continue;
      const double w = view.on_root_path(anchor, other.edge) ? -1.0 : 1.0;
      expo += w * g.grad_t[strip.backbone_index(other.edge)];
    }
    y += sgn * g.grad_y[strip.backbone_index(oe.edge)] * std::exp(0.5 * expo);
  }
  return y;
}

double grad_hamiltonian(const StripGraph& strip, const GradientConfig& g,
                        const SpanningTree& tree) {
  TreeView tv(strip, tree, strip.root());
  double h = 0;
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    const double dt = t_difference(strip, g, ed.tail, ed.head);
    const double y = y_edge(strip, g, ed.tail, ed.head);
    h += ed.beta * (std::cosh(dt) - 1.0 + 0.5 * y * y);
    if (tv.in_tree(e)) {
      h += t_difference(strip, g, tv.tail(e), tv.head(e));
      h -= std::log(ed.beta / kTwoPi);
    }
  }
  h -= 0.5 * g.grad_t.sum();
  h += t_difference(strip, g, strip.pin_vertex(), strip.root());  // t_root - t_pin
  return h;
}

double interpolated_hamiltonian(const StripGraph& strip, const GradientConfig& g,
                                const SpanningTree& tree, int l) {
  if (l < strip.lo() || l > strip.hi())
    throw std::out_of_range("interpolated_hamiltonian: level outside the strip");
  TreeView tv(strip, tree, strip.root());
  std::vector<char> on_backbone(strip.n_edges(), 0);
  for (const auto& oe : tv.path(strip.root(), strip.top_root())) on_backbone[oe.edge] = 1;

  double h = 0;
  for (int e = 0; e < strip.n_edges(); ++e) {
    const auto& ed = strip.edge(e);
    const double dt = t_difference(strip, g, ed.tail, ed.head);
    const double y = y_edge(strip, g, ed.tail, ed.head);
    h += ed.beta * (std::cosh(dt) - 1.0 + 0.5 * y * y);
    if (tv.in_tree(e)) {
      h -= std::log(ed.beta / kTwoPi);
      if (!on_backbone[e]) h += t_difference(strip, g, tv.tail(e), tv.head(e));
    }
    const int bi = strip.backbone_index(e);
    if (bi >= 0 && !strip.is_pin_line_edge(e)) h -= 0.5 * g.grad_t[bi];
  }
  for (int n = strip.lo(); n <= -1; ++n) h -= 0.5 * g.grad_t[strip.backbone_index_pin(n)];
  for (int n = l; n <= strip.hi() - 1; ++n) h += 0.5 * g.grad_t[strip.backbone_index_pin(n)];
  return h;
}

}  // namespace sigmastrip
