#pragma once

#include <string>
#include <vector>

namespace maxband {

// Direction of a traversal relative to the artery's outbound orientation
// (rows run west->east, columns north->south).
enum class Dir { Forward, Backward };

struct Artery {
  int id = -1;
  bool horizontal = true;
  // Node hosting signal i, in outbound order. Signal indices are 0-based.
  std::vector<int> nodes;

  int signal_count() const { return static_cast<int>(nodes.size()); }
  int segment_count() const { return static_cast<int>(nodes.size()) - 1; }
};

// One undirected street segment. Each grid edge belongs to exactly one
// artery, between that artery's signals seg and seg+1.
struct Edge {
  int artery = -1;
  int seg = -1;
  int u = -1;  // node at signal seg
  int v = -1;  // node at signal seg+1
};

struct SignalRef {
  int artery = -1;
  int index = -1;
};

struct GridNetwork {
  int rows = 0;
  int cols = 0;
  int node_count = 0;
  std::vector<Artery> arteries;  // rows first, then columns
  std::vector<Edge> edges;       // artery-major, segment order within artery
  std::vector<std::vector<SignalRef>> signals_at_node;

  int artery_count() const { return static_cast<int>(arteries.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int signal_count() const;
  bool is_grid() const { return rows >= 2 && cols >= 2; }
};

// A maximal straight run of a cycle along one artery. The span is stored in
// outbound order (first < last); dir tells whether the clockwise walk agrees
// with outbound.
struct CycleSegment {
  int artery = -1;
  int first = -1;
  int last = -1;
  Dir dir = Dir::Forward;
};

// Junction 5-tuple (b, j, i, c, k): the walk arrives on artery b at its
// signal j, which sits at node i, and departs on artery c at its signal k.
struct CycleJunction {
  int from_artery = -1;
  int from_signal = -1;
  int node = -1;
  int to_artery = -1;
  int to_signal = -1;
};

struct Cycle {
  // Clockwise order; junctions[k] joins segments[k] and segments[k+1 mod n].
  std::vector<CycleSegment> segments;
  std::vector<CycleJunction> junctions;
  std::vector<int> nodes;  // closed walk, nodes[0] repeated implicitly
};

struct CycleBasis {
  std::vector<Cycle> cycles;
};

// Grid of rows x cols junctions, both >= 2. Node ids are row-major. Arteries
// are the r rows (west->east) followed by the c columns (north->south).
GridNetwork build_grid(int rows, int cols);

// Degenerate path network: one artery with the given number of signals and
// no cycles. Used for arterial-only models; not a valid grid.
GridNetwork single_artery(int signal_count);

// Strictly fundamental cycle basis from a BFS spanning tree rooted at node 0:
// one cycle per non-tree edge, each oriented clockwise and decomposed into
// artery runs and junction 5-tuples. Size (rows-1)*(cols-1) on a grid.
CycleBasis fundamental_cycle_basis(const GridNetwork& net);

// Serialized JSON dump of the basis (cycle -> ordered segment/junction
// lists). Debug aid behind the CLI's --dump-basis flag.
std::string basis_to_json(const GridNetwork& net, const CycleBasis& basis);

}  // namespace maxband
