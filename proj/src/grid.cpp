#include "maxband/grid.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace maxband {

int GridNetwork::signal_count() const {
  int n = 0;
  for (const auto& a : arteries) n += a.signal_count();
  return n;
}

GridNetwork build_grid(int rows, int cols) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument(
        "build_grid: rows and cols must both be >= 2 (got " +
        std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
  GridNetwork net;
  net.rows = rows;
  net.cols = cols;
  net.node_count = rows * cols;
  net.signals_at_node.resize(net.node_count);

  auto node_id = [cols](int row, int col) { return row * cols + col; };

  // Row arteries, outbound west->east.
  for (int row = 0; row < rows; ++row) {
    Artery a;
    a.id = static_cast<int>(net.arteries.size());
    a.horizontal = true;
    for (int col = 0; col < cols; ++col) a.nodes.push_back(node_id(row, col));
    net.arteries.push_back(std::move(a));
  }
  // Column arteries, outbound north->south.
  for (int col = 0; col < cols; ++col) {
    Artery a;
    a.id = static_cast<int>(net.arteries.size());
    a.horizontal = false;
    for (int row = 0; row < rows; ++row) a.nodes.push_back(node_id(row, col));
    net.arteries.push_back(std::move(a));
  }

  for (const auto& a : net.arteries) {
    for (int i = 0; i < a.signal_count(); ++i) {
      net.signals_at_node[a.nodes[i]].push_back(SignalRef{a.id, i});
    }
    for (int i = 0; i + 1 < a.signal_count(); ++i) {
      net.edges.push_back(Edge{a.id, i, a.nodes[i], a.nodes[i + 1]});
    }
  }
  return net;
}

GridNetwork single_artery(int signal_count) {
  if (signal_count < 2) {
    throw std::invalid_argument("single_artery: need at least 2 signals");
  }
  GridNetwork net;
  net.rows = 1;
  net.cols = signal_count;
  net.node_count = signal_count;
  net.signals_at_node.resize(net.node_count);
  Artery a;
  a.id = 0;
  a.horizontal = true;
  for (int i = 0; i < signal_count; ++i) a.nodes.push_back(i);
  net.arteries.push_back(std::move(a));
  for (int i = 0; i + 1 < signal_count; ++i) {
    net.edges.push_back(Edge{0, i, i, i + 1});
    net.signals_at_node[i].push_back(SignalRef{0, i});
  }
  net.signals_at_node[signal_count - 1].push_back(
      SignalRef{0, signal_count - 1});
  return net;
}

namespace {

// Signal index of artery a at node, or -1.
int signal_on_artery(const GridNetwork& net, int node, int artery) {
  for (const auto& s : net.signals_at_node[node]) {
    if (s.artery == artery) return s.index;
  }
  return -1;
}

// The artery owning edge {u,v}.
int artery_of_edge(const GridNetwork& net,
                   const std::map<std::pair<int, int>, int>& edge_index, int u,
                   int v) {
  auto it = edge_index.find({std::min(u, v), std::max(u, v)});
  if (it == edge_index.end())
    throw std::logic_error("artery_of_edge: not an edge");
  return net.edges[it->second].artery;
}

// Twice the signed shoelace area in (x=col, y=row) coordinates. With row
// growing southward, a clockwise walk (as drawn, north up) has positive area.
long long shoelace2(const GridNetwork& net, const std::vector<int>& walk) {
  long long area2 = 0;
  const int n = static_cast<int>(walk.size());
  for (int i = 0; i < n; ++i) {
    const int a = walk[i];
    const int b = walk[(i + 1) % n];
    const long long xa = a % net.cols, ya = a / net.cols;
    const long long xb = b % net.cols, yb = b / net.cols;
    area2 += xa * yb - xb * ya;
  }
  return area2;
}

Cycle decompose_walk(const GridNetwork& net,
                     const std::map<std::pair<int, int>, int>& edge_index,
                     std::vector<int> walk) {
  const int n = static_cast<int>(walk.size());

  if (shoelace2(net, walk) < 0) std::reverse(walk.begin(), walk.end());

  // Rotate so the walk starts at a turn (edge before != edge after), picking
  // the smallest such node id for a deterministic representation.
  auto edge_artery = [&](int i, int j) {
    return artery_of_edge(net, edge_index, walk[(i + n) % n], walk[(j + n) % n]);
  };
  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (edge_artery(i - 1, i) != edge_artery(i, i + 1)) {
      if (start == -1 || walk[i] < walk[start]) start = i;
    }
  }
  if (start == -1) throw std::logic_error("cycle without turns");
  std::rotate(walk.begin(), walk.begin() + start, walk.end());

  Cycle cyc;
  cyc.nodes = walk;

  // Group consecutive edges by artery into maximal runs.
  struct Run {
    int artery;
    int from_node, to_node;  // in walk order
  };
  std::vector<Run> runs;
  for (int i = 0; i < n; ++i) {
    const int u = walk[i];
    const int v = walk[(i + 1) % n];
    const int art = artery_of_edge(net, edge_index, u, v);
    if (!runs.empty() && runs.back().artery == art) {
      runs.back().to_node = v;
    } else {
      runs.push_back(Run{art, u, v});
    }
  }

  for (const auto& r : runs) {
    const int si = signal_on_artery(net, r.from_node, r.artery);
    const int sj = signal_on_artery(net, r.to_node, r.artery);
    CycleSegment seg;
    seg.artery = r.artery;
    if (si < sj) {
      seg.first = si;
      seg.last = sj;
      seg.dir = Dir::Forward;
    } else {
      seg.first = sj;
      seg.last = si;
      seg.dir = Dir::Backward;
    }
    cyc.segments.push_back(seg);
  }

  const int nruns = static_cast<int>(runs.size());
  for (int k = 0; k < nruns; ++k) {
    const Run& cur = runs[k];
    const Run& nxt = runs[(k + 1) % nruns];
    CycleJunction j;
    j.node = cur.to_node;
    j.from_artery = cur.artery;
    j.from_signal = signal_on_artery(net, cur.to_node, cur.artery);
    j.to_artery = nxt.artery;
    j.to_signal = signal_on_artery(net, cur.to_node, nxt.artery);
    cyc.junctions.push_back(j);
  }
  return cyc;
}

}  // namespace

CycleBasis fundamental_cycle_basis(const GridNetwork& net) {
  std::map<std::pair<int, int>, int> edge_index;
  for (int e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edges[e];
    edge_index[{std::min(ed.u, ed.v), std::max(ed.u, ed.v)}] = e;
  }

  // Adjacency in fixed order: east, south, west, north.
  std::vector<std::vector<int>> adj(net.node_count);
  for (int node = 0; node < net.node_count; ++node) {
    const int row = node / net.cols, col = node % net.cols;
    if (col + 1 < net.cols) adj[node].push_back(node + 1);
    if (row + 1 < net.rows) adj[node].push_back(node + net.cols);
    if (col > 0) adj[node].push_back(node - 1);
    if (row > 0) adj[node].push_back(node - net.cols);
  }

  std::vector<int> parent(net.node_count, -2);
  std::queue<int> bfs;
  bfs.push(0);
  parent[0] = -1;
  std::vector<std::pair<int, int>> tree_edges;
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop();
    for (int v : adj[u]) {
      if (parent[v] == -2) {
        parent[v] = u;
        tree_edges.emplace_back(std::min(u, v), std::max(u, v));
        bfs.push(v);
      }
    }
  }

  std::vector<bool> in_tree(net.edge_count(), false);
  for (const auto& te : tree_edges) in_tree[edge_index.at(te)] = true;

  std::vector<int> depth(net.node_count, 0);
  for (int v = 0; v < net.node_count; ++v) {
    int d = 0;
    for (int u = v; parent[u] != -1; u = parent[u]) ++d;
    depth[v] = d;
  }

  CycleBasis basis;
  for (int e = 0; e < net.edge_count(); ++e) {
    if (in_tree[e]) continue;
    int u = net.edges[e].u, v = net.edges[e].v;
    // Tree path u..lca followed by reversed lca..v, then the non-tree edge
    // closes the walk.
    std::vector<int> up, down;
    int x = u, y = v;
    while (depth[x] > depth[y]) {
      up.push_back(x);
      x = parent[x];
    }
    while (depth[y] > depth[x]) {
      down.push_back(y);
      y = parent[y];
    }
    while (x != y) {
      up.push_back(x);
      down.push_back(y);
      x = parent[x];
      y = parent[y];
    }
    std::vector<int> walk = std::move(up);
    walk.push_back(x);  // lca
    walk.insert(walk.end(), down.rbegin(), down.rend());
    basis.cycles.push_back(decompose_walk(net, edge_index, std::move(walk)));
  }
  return basis;
}

std::string basis_to_json(const GridNetwork& net, const CycleBasis& basis) {
  nlohmann::ordered_json out;
  out["rows"] = net.rows;
  out["cols"] = net.cols;
  out["cycle_count"] = basis.cycles.size();
  auto& cycles = out["cycles"] = nlohmann::ordered_json::array();
  for (const auto& cyc : basis.cycles) {
    nlohmann::ordered_json jc;
    jc["nodes"] = cyc.nodes;
    auto& segs = jc["segments"] = nlohmann::ordered_json::array();
    for (const auto& s : cyc.segments) {
      segs.push_back({{"artery", s.artery},
                      {"first", s.first},
                      {"last", s.last},
                      {"dir", s.dir == Dir::Forward ? "forward" : "backward"}});
    }
    auto& juncs = jc["junctions"] = nlohmann::ordered_json::array();
    for (const auto& j : cyc.junctions) {
      juncs.push_back({{"from_artery", j.from_artery},
                       {"from_signal", j.from_signal},
                       {"node", j.node},
                       {"to_artery", j.to_artery},
                       {"to_signal", j.to_signal}});
    }
    cycles.push_back(std::move(jc));
  }
  return out.dump(2);
}

}  // namespace maxband
