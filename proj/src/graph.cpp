#include "surplus/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace surplus {

namespace {

bool weight_in_open_unit(double w) { return w > 0.0 && w < 1.0; }

std::string edge_label(const Edge& e) {
  return "(" + std::to_string(e.from + 1) + "," + std::to_string(e.to + 1) + ")";
}

}  // namespace

Digraph::Digraph(int node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)) {
  if (n_ < 2) throw parse_error("node count must be at least 2");
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  in_edges_.assign(n_, {});
  out_edges_.assign(n_, {});
  for (int idx = 0; idx < static_cast<int>(edges_.size()); ++idx) {
    const Edge& e = edges_[idx];
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
      throw parse_error("edge " + edge_label(e) + " references an unknown node");
    if (e.from == e.to) throw parse_error("self-loop at node " + std::to_string(e.to + 1));
    if (idx > 0 && edges_[idx - 1].from == e.from && edges_[idx - 1].to == e.to)
      throw parse_error("duplicate edge " + edge_label(e));
    if (!weight_in_open_unit(e.a) || !weight_in_open_unit(e.b))
      throw parse_error("weight outside (0,1) on edge " + edge_label(e));
    in_edges_[e.to].push_back(idx);
    out_edges_[e.from].push_back(idx);
  }
  for (int i = 0; i < n_; ++i) {
    double a_sum = 0.0, b_sum = 0.0;
    for (int idx : in_edges_[i]) a_sum += edges_[idx].a;
    for (int idx : out_edges_[i]) b_sum += edges_[idx].b;
    if (a_sum >= 1.0)
      throw parse_error("updating weights of node " + std::to_string(i + 1) +
                        " sum to " + std::to_string(a_sum) + " (must stay below 1)");
    if (b_sum >= 1.0)
      throw parse_error("sending weights of node " + std::to_string(i + 1) +
                        " sum to " + std::to_string(b_sum) + " (must stay below 1)");
  }
}

int Digraph::edge_index(int from, int to) const {
  if (from < 0 || from >= n_) return -1;
  for (int idx : out_edges_[from])
    if (edges_[idx].to == to) return idx;
  return -1;
}

namespace {

struct RawEdge {
  int from, to;
  std::optional<double> a, b;
};

void fill_default_weights(int n, std::vector<RawEdge>& raw, WeightScheme scheme) {
  std::vector<int> in_deg(n, 0), out_deg(n, 0);
  for (const RawEdge& e : raw) {
    ++in_deg[e.to];
    ++out_deg[e.from];
  }
  const int m = static_cast<int>(raw.size());
  const int d = *std::max_element(in_deg.begin(), in_deg.end());
  for (RawEdge& e : raw) {
    double def_a = 0.0, def_b = 0.0;
    switch (scheme) {
      case WeightScheme::kNeighborCount:
        def_a = 1.0 / (in_deg[e.to] + 1);
        def_b = 1.0 / (out_deg[e.from] + 1);
        break;
      case WeightScheme::kEdgeCount:
        def_a = 1.0 / (2.0 * m);
        def_b = 1.0 / m;
        break;
      case WeightScheme::kDegreeRegular:
        def_a = 1.0 / (2.0 * d * n);
        def_b = 1.0 / (static_cast<double>(d) * n);
        break;
    }
    if (!e.a) e.a = def_a;
    if (!e.b) e.b = def_b;
  }
}

}  // namespace

namespace {

int parse_int_token(const std::string& token, int line_no) {
  char* end = nullptr;
  const long value = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0')
    throw parse_error("line " + std::to_string(line_no) + ": expected an integer, got '" +
                      token + "'");
  return static_cast<int>(value);
}

double parse_double_token(const std::string& token, int line_no) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw parse_error("line " + std::to_string(line_no) + ": expected a number, got '" +
                      token + "'");
  return value;
}

}  // namespace

Digraph parse_digraph(const std::string& text, WeightScheme defaults) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<RawEdge> raw;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) tokens.push_back(token);
    if (tokens.empty()) continue;  // blank or comment-only line

    if (n < 0) {
      if (tokens.size() != 1)
        throw parse_error("line " + std::to_string(line_no) + ": expected the node count alone");
      n = parse_int_token(tokens[0], line_no);
      if (n < 2) throw parse_error("node count must be at least 2");
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 4)
      throw parse_error("line " + std::to_string(line_no) + ": malformed edge line");
    const int j = parse_int_token(tokens[0], line_no);
    const int i = parse_int_token(tokens[1], line_no);
    if (j < 1 || j > n || i < 1 || i > n)
      throw parse_error("line " + std::to_string(line_no) + ": node id out of range");
    RawEdge e{j - 1, i - 1, std::nullopt, std::nullopt};
    if (tokens.size() >= 3) e.a = parse_double_token(tokens[2], line_no);
    if (tokens.size() == 4) e.b = parse_double_token(tokens[3], line_no);
    raw.push_back(e);
  }
  if (n < 0) throw parse_error("missing node count");
  if (raw.empty()) throw parse_error("edge list is empty");
  fill_default_weights(n, raw, defaults);
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const RawEdge& e : raw) edges.push_back({e.from, e.to, *e.a, *e.b});
  return Digraph(n, std::move(edges));
}

std::string serialize_digraph(const Digraph& g) {
  std::string out = std::to_string(g.node_count()) + "\n";
  char buf[128];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", e.from + 1, e.to + 1, e.a, e.b);
    out += buf;
  }
  return out;
}

Digraph with_weights(const Digraph& g, WeightScheme scheme) {
  std::vector<std::pair<int, int>> arcs;
  arcs.reserve(g.edges().size());
  for (const Edge& e : g.edges()) arcs.push_back({e.from, e.to});
  return make_digraph(g.node_count(), arcs, scheme);
}

Digraph make_digraph(int node_count, const std::vector<std::pair<int, int>>& arcs,
                     WeightScheme scheme) {
  if (arcs.empty()) throw parse_error("edge list is empty");
  std::vector<RawEdge> raw;
  raw.reserve(arcs.size());
  for (const auto& [from, to] : arcs) {
    if (from < 0 || from >= node_count || to < 0 || to >= node_count)
      throw parse_error("arc references an unknown node");
    raw.push_back({from, to, std::nullopt, std::nullopt});
  }
  fill_default_weights(node_count, raw, scheme);
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const RawEdge& e : raw) edges.push_back({e.from, e.to, *e.a, *e.b});
  return Digraph(node_count, std::move(edges));
}

namespace {

// Iterative Tarjan over an adjacency-list view.
std::vector<int> tarjan_components(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<int> comp(n, -1), low(n, 0), disc(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int timer = 0, comp_count = 0;

  struct Frame {
    int node;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    disc[root] = low[root] = timer++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.child < adj[f.node].size()) {
        const int next = adj[f.node][f.child++];
        if (disc[next] < 0) {
          disc[next] = low[next] = timer++;
          stack.push_back(next);
          on_stack[next] = true;
          call.push_back({next, 0});
        } else if (on_stack[next]) {
          low[f.node] = std::min(low[f.node], disc[next]);
        }
      } else {
        if (low[f.node] == disc[f.node]) {
          int v;
          do {
            v = stack.back();
            stack.pop_back();
            on_stack[v] = false;
            comp[v] = comp_count;
          } while (v != f.node);
          ++comp_count;
        }
        const int done = f.node;
        call.pop_back();
        if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[done]);
      }
    }
  }
  // Renumber components in order of first appearance by node id.
  std::vector<int> remap(comp_count, -1);
  int next_id = 0;
  for (int v = 0; v < n; ++v)
    if (remap[comp[v]] < 0) remap[comp[v]] = next_id++;
  for (int v = 0; v < n; ++v) comp[v] = remap[comp[v]];
  return comp;
}

}  // namespace

std::vector<int> strongly_connected_components(const Digraph& g) {
  std::vector<std::vector<int>> adj(g.node_count());
  for (const Edge& e : g.edges()) adj[e.from].push_back(e.to);
  return tarjan_components(g.node_count(), adj);
}

bool is_strongly_connected(const Digraph& g) {
  const std::vector<int> comp = strongly_connected_components(g);
  return *std::max_element(comp.begin(), comp.end()) == 0;
}

bool is_balanced(const Digraph& g, double tol) {
  const int n = g.node_count();
  std::vector<double> row(n, 0.0), col(n, 0.0);
  for (const Edge& e : g.edges()) {
    row[e.to] += e.a;   // A(i,j) = a_ij contributes to row i
    col[e.from] += e.a; // and to column j
  }
  for (int i = 0; i < n; ++i)
    if (std::abs(row[i] - col[i]) > tol) return false;
  return true;
}

int degree(const Digraph& g) {
  int d = 0;
  for (int i = 0; i < g.node_count(); ++i) d = std::max(d, g.in_degree(i));
  return d;
}

WeightSystem build_weight_system(const Digraph& g) {
  const int n = g.node_count();
  WeightSystem w;
  w.n = n;
  w.A = Eigen::MatrixXd::Zero(n, n);
  w.B = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    w.A(e.to, e.from) = e.a;  // receiver row, sender column
    w.B(e.to, e.from) = e.b;  // B(h,i) = b_ih: sender i routes surplus to h
  }
  w.D = w.A.rowwise().sum().asDiagonal();
  w.D_tilde = w.B.colwise().sum().asDiagonal();
  w.L = w.D - w.A;
  w.S = Eigen::MatrixXd::Identity(n, n) - w.D_tilde + w.B;

  // Defensive re-check of the stochasticity the weight constraints guarantee.
  const Eigen::MatrixXd row_stoch = Eigen::MatrixXd::Identity(n, n) - w.L;
  for (int i = 0; i < n; ++i) {
    if (std::abs(row_stoch.row(i).sum() - 1.0) > 1e-12)
      throw parse_error("row " + std::to_string(i + 1) + " of I-L does not sum to 1");
    if (std::abs(w.S.col(i).sum() - 1.0) > 1e-12)
      throw parse_error("column " + std::to_string(i + 1) + " of S does not sum to 1");
    if (row_stoch.row(i).minCoeff() < -1e-15 || w.S.col(i).minCoeff() < -1e-15)
      throw parse_error("negative entry in a stochastic factor");
  }
  return w;
}

Digraph cyclic_digraph(int n) {
  if (n < 2) throw std::invalid_argument("cyclic digraph needs n >= 2");
  std::vector<Edge> edges;
  edges.reserve(n);
  const double a = 1.0 / (2.0 * n);
  const double b = 1.0 / n;
  for (int j = 0; j < n; ++j) edges.push_back({j, (j + 1) % n, a, b});
  return Digraph(n, std::move(edges));
}

bool is_cyclic_topology(const Digraph& g) {
  const int n = g.node_count();
  if (g.edge_count() != n) return false;
  for (int j = 0; j < n; ++j)
    if (!g.has_edge(j, (j + 1) % n)) return false;
  return true;
}

bool is_symmetric(const Digraph& g) {
  for (const Edge& e : g.edges())
    if (!g.has_edge(e.to, e.from)) return false;
  return true;
}

bool pattern_strongly_connected(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<int>> adj(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (r != c && m(r, c) != 0.0) adj[c].push_back(r);  // entry (r,c): flow c -> r
  const std::vector<int> comp = tarjan_components(n, adj);
  return *std::max_element(comp.begin(), comp.end()) == 0;
}

}  // namespace surplus
