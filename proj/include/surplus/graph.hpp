#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surplus {

/// Thrown for malformed edge-list documents and weight-constraint violations.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed edge: information flows `from` -> `to`. `a` is the updating
/// weight applied by the receiver, `b` the sending weight applied by the
/// sender for this edge. Node ids are 0-based in memory, 1-based in files.
struct Edge {
  int from = 0;
  int to = 0;
  double a = 0.0;
  double b = 0.0;
};

/// Built-in weight assignments for edges that carry no explicit weights.
enum class WeightScheme {
  kNeighborCount,  // a = 1/(in_degree+1) per receiver, b = 1/(out_degree+1) per sender
  kEdgeCount,      // a = 1/(2m), b = 1/m with m the edge count
  kDegreeRegular,  // a = 1/(2dn), b = 1/(dn) with d the max in-degree
};

/// Immutable weighted digraph. The constructor validates the structural
/// invariants once: no self-loops, no duplicate edges, all weights in (0,1),
/// per-node updating-weight sums < 1 and sending-weight sums < 1.
class Digraph {
 public:
  Digraph(int node_count, std::vector<Edge> edges);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Edges sorted lexicographically by (from, to).
  const std::vector<Edge>& edges() const { return edges_; }

  /// Indices into edges() of the edges arriving at / leaving node i.
  const std::vector<int>& in_edges(int i) const { return in_edges_[i]; }
  const std::vector<int>& out_edges(int i) const { return out_edges_[i]; }

  int in_degree(int i) const { return static_cast<int>(in_edges_[i].size()); }
  int out_degree(int i) const { return static_cast<int>(out_edges_[i].size()); }

  bool has_edge(int from, int to) const { return edge_index(from, to) >= 0; }
  /// Index of edge (from, to) in edges(), or -1.
  int edge_index(int from, int to) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<std::vector<int>> out_edges_;
};

/// All matrices the two algorithms consume, derived from one digraph.
///   A: updating-weight adjacency (A(i,j) = a_ij for edge (j,i))
///   D: diagonal of row sums of A
///   L: Laplacian D - A; I - L is row stochastic
///   B: sending weights, transposed convention (B(h,i) = b_ih for edge (i,h))
///   D_tilde: diagonal of per-sender weight sums
///   S: surplus routing (I - D_tilde) + B; column stochastic
struct WeightSystem {
  int n = 0;
  Eigen::MatrixXd A, B, D, D_tilde, L, S;
};

/// Parse an edge-list document. Format: first non-comment line is the node
/// count; each following non-comment line is "j i", "j i a" or "j i a b"
/// (1-based ids, edge j->i, a the receiver's updating weight, b the sender's
/// sending weight). '#' starts a comment. Missing weights are filled from
/// `defaults`.
Digraph parse_digraph(const std::string& text,
                      WeightScheme defaults = WeightScheme::kNeighborCount);

/// Deterministic inverse of parse_digraph: emits "j i a b" lines with edges
/// sorted lexicographically and full-precision weights.
std::string serialize_digraph(const Digraph& g);

/// Same topology with every weight recomputed from the scheme.
Digraph with_weights(const Digraph& g, WeightScheme scheme);

/// Digraph from bare arcs (0-based (from, to) pairs) with scheme weights.
Digraph make_digraph(int node_count, const std::vector<std::pair<int, int>>& arcs,
                     WeightScheme scheme = WeightScheme::kNeighborCount);

/// Component id per node (0-based, ids ordered by first discovery).
std::vector<int> strongly_connected_components(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

/// True iff every node's weighted in-flow equals its weighted out-flow
/// (row sums of A equal column sums) within `tol`.
bool is_balanced(const Digraph& g, double tol = 1e-10);

/// Max in-neighbor count over all nodes.
int degree(const Digraph& g);

WeightSystem build_weight_system(const Digraph& g);

/// Ring topology 1->2->...->n->1 with kDegreeRegular weights (a = 1/(2n),
/// b = 1/n), the weighting that collapses S to I - 2L.
Digraph cyclic_digraph(int n);

/// True iff the digraph is exactly the n-cycle above (any weights).
bool is_cyclic_topology(const Digraph& g);

/// True iff (j,i) in E implies (i,j) in E.
bool is_symmetric(const Digraph& g);

/// True iff the directed pattern of nonzero off-diagonal entries is strongly
/// connected (irreducibility of the matrix).
bool pattern_strongly_connected(const Eigen::MatrixXd& m);

}  // namespace surplus
