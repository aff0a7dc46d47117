#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "maxband/grid.hpp"
#include "maxband/rng.hpp"

using namespace maxband;

namespace {

// Independent walk check: every cycle must be a closed simple walk over grid
// edges, and its stored segment/junction decomposition must reproduce it.
void check_cycle_walk(const GridNetwork& net, const Cycle& cyc) {
  const auto& walk = cyc.nodes;
  REQUIRE(walk.size() >= 4);
  std::set<int> seen(walk.begin(), walk.end());
  CHECK(seen.size() == walk.size());  // simple
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const int a = walk[i];
    const int b = walk[(i + 1) % walk.size()];
    const int dr = std::abs(a / net.cols - b / net.cols);
    const int dc = std::abs(a % net.cols - b % net.cols);
    CHECK(dr + dc == 1);  // grid adjacency
  }

  // Replaying the runs reproduces the walk.
  std::vector<int> replay;
  for (const auto& seg : cyc.segments) {
    const Artery& art = net.arteries[seg.artery];
    if (seg.dir == Dir::Forward) {
      for (int i = seg.first; i < seg.last; ++i) replay.push_back(art.nodes[i]);
    } else {
      for (int i = seg.last; i > seg.first; --i) replay.push_back(art.nodes[i]);
    }
  }
  REQUIRE(replay.size() == walk.size());
  CHECK(replay == walk);

  REQUIRE(cyc.junctions.size() == cyc.segments.size());
  for (std::size_t k = 0; k < cyc.junctions.size(); ++k) {
    const CycleJunction& j = cyc.junctions[k];
    CHECK(j.from_artery != j.to_artery);
    CHECK(net.arteries[j.from_artery].nodes[j.from_signal] == j.node);
    CHECK(net.arteries[j.to_artery].nodes[j.to_signal] == j.node);
    // The junction joins consecutive segments at the shared node.
    const CycleSegment& cur = cyc.segments[k];
    const int end_sig = cur.dir == Dir::Forward ? cur.last : cur.first;
    CHECK(net.arteries[cur.artery].nodes[end_sig] == j.node);
    const CycleSegment& nxt = cyc.segments[(k + 1) % cyc.segments.size()];
    const int start_sig = nxt.dir == Dir::Forward ? nxt.first : nxt.last;
    CHECK(net.arteries[nxt.artery].nodes[start_sig] == j.node);
  }
}

std::set<std::pair<int, int>> cycle_edge_set(const Cycle& cyc) {
  std::set<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < cyc.nodes.size(); ++i) {
    const int a = cyc.nodes[i];
    const int b = cyc.nodes[(i + 1) % cyc.nodes.size()];
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  return edges;
}

}  // namespace

TEST_CASE("grid dimensions and artery structure") {
  const GridNetwork g34 = build_grid(3, 4);
  CHECK(g34.node_count == 12);
  CHECK(g34.edge_count() == 17);
  CHECK(g34.artery_count() == 7);

  const GridNetwork g22 = build_grid(2, 2);
  CHECK(g22.node_count == 4);
  CHECK(g22.edge_count() == 4);

  const GridNetwork g10 = build_grid(10, 10);
  CHECK(g10.edge_count() == 180);
  CHECK(fundamental_cycle_basis(g10).cycles.size() == 81);

  // Arteries partition the edges and every node hosts both crossings.
  int seg_sum = 0;
  for (const auto& a : g34.arteries) seg_sum += a.segment_count();
  CHECK(seg_sum == g34.edge_count());
  for (const auto& at_node : g34.signals_at_node) {
    CHECK(at_node.size() == 2);
    CHECK(g34.arteries[at_node[0].artery].horizontal !=
          g34.arteries[at_node[1].artery].horizontal);
  }

  CHECK_THROWS_AS(build_grid(1, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(5, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0, 0), std::invalid_argument);
}

TEST_CASE("basis cardinality and shape") {
  CHECK(fundamental_cycle_basis(build_grid(3, 3)).cycles.size() == 4);

  const GridNetwork g22 = build_grid(2, 2);
  const CycleBasis b22 = fundamental_cycle_basis(g22);
  REQUIRE(b22.cycles.size() == 1);
  CHECK(b22.cycles[0].junctions.size() == 4);
  CHECK(b22.cycles[0].nodes.size() == 4);
  check_cycle_walk(g22, b22.cycles[0]);

  const GridNetwork g55 = build_grid(5, 5);
  const CycleBasis b55 = fundamental_cycle_basis(g55);
  REQUIRE(b55.cycles.size() == 16);
  for (const auto& cyc : b55.cycles) check_cycle_walk(g55, cyc);
}

TEST_CASE("clockwise convention and direction split") {
  // The unit cycle of a 2x2 grid: top row east (forward), right column south
  // (forward), bottom row west (backward), left column north (backward).
  const GridNetwork g = build_grid(2, 2);
  const CycleBasis basis = fundamental_cycle_basis(g);
  const Cycle& cyc = basis.cycles[0];
  int forward = 0, backward = 0;
  for (const auto& seg : cyc.segments)
    (seg.dir == Dir::Forward ? forward : backward) += 1;
  CHECK(forward == 2);
  CHECK(backward == 2);

  // Shoelace in (col, row) must be positive for a clockwise walk drawn with
  // north up.
  long long area2 = 0;
  for (std::size_t i = 0; i < cyc.nodes.size(); ++i) {
    const int a = cyc.nodes[i];
    const int b = cyc.nodes[(i + 1) % cyc.nodes.size()];
    area2 += static_cast<long long>(a % g.cols) * (b / g.cols) -
             static_cast<long long>(b % g.cols) * (a / g.cols);
  }
  CHECK(area2 > 0);
}

TEST_CASE("cycle space closure under symmetric difference") {
  SplitMix64 rng(20240901);
  for (const auto [r, c] : {std::pair{2, 3}, {4, 4}, {3, 7}, {6, 5}}) {
    const GridNetwork g = build_grid(r, c);
    const CycleBasis basis = fundamental_cycle_basis(g);
    REQUIRE(static_cast<int>(basis.cycles.size()) == (r - 1) * (c - 1));
    for (const auto& cyc : basis.cycles) check_cycle_walk(g, cyc);

    std::vector<std::set<std::pair<int, int>>> edge_sets;
    for (const auto& cyc : basis.cycles) edge_sets.push_back(cycle_edge_set(cyc));

    for (int trial = 0; trial < 10; ++trial) {
      std::set<std::pair<int, int>> acc;
      for (const auto& es : edge_sets) {
        if (rng.below(2) == 0) continue;
        for (const auto& e : es) {
          if (!acc.erase(e)) acc.insert(e);
        }
      }
      std::map<int, int> degree;
      for (const auto& [u, v] : acc) {
        degree[u]++;
        degree[v]++;
      }
      for (const auto& [node, d] : degree) CHECK(d % 2 == 0);
    }
  }
}

TEST_CASE("single artery path network") {
  const GridNetwork p = single_artery(4);
  CHECK(p.artery_count() == 1);
  CHECK(p.edge_count() == 3);
  CHECK_FALSE(p.is_grid());
  CHECK(fundamental_cycle_basis(p).cycles.empty());
  CHECK_THROWS_AS(single_artery(1), std::invalid_argument);
}

TEST_CASE("basis json dump") {
  const GridNetwork g = build_grid(2, 2);
  const std::string dump = basis_to_json(g, fundamental_cycle_basis(g));
  CHECK(dump.find("\"cycle_count\": 1") != std::string::npos);
  CHECK(dump.find("\"junctions\"") != std::string::npos);
  CHECK(dump.find("forward") != std::string::npos);
}
