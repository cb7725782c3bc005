#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigmanet/rng.hpp"
#include "sigmanet/types.hpp"

namespace sigmanet {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

// Weighted digraph. Invariants: 0 <= src,dst < n, src != dst, at most one edge
// per ordered pair, every weight nonzero. validate() enforces them.
struct DirectedGraph {
    int n = 0;
    std::vector<Edge> edges;
};

void validate(const DirectedGraph& g);

struct NodeLabels {
    std::vector<int> labels;  // class index per node, in [0, num_classes)
};

int num_classes(const NodeLabels& labels);

struct EdgeListOptions {
    bool merge_parallel = false;        // sum weights of repeated (src,dst) rows
    std::optional<int> n_hint;          // grow node count with isolated tail nodes
};

struct LoadedGraph {
    DirectedGraph graph;
    std::vector<std::string> id_map;    // dense id -> original id
};

// CSV rows "src,dst,weight" with an optional header (detected when the third
// field of the first row is not a number). Node ids are arbitrary strings,
// compacted to dense ids: numeric order when every id is a nonnegative
// integer, lexicographic otherwise.
LoadedGraph from_edge_list(const std::string& path, const EdgeListOptions& opts = {});

void save_edge_list(const std::string& path, const DirectedGraph& g);
void save_id_map(const std::string& path, const std::vector<std::string>& id_map);

struct Dataset {
    DirectedGraph graph;
    std::vector<std::string> id_map;
    NodeLabels labels;
};

// Edge list plus node-label CSV "node_id,class_index". Label rows naming nodes
// absent from the edge list extend the graph with isolated nodes.
Dataset load_dataset(const std::string& edges_path,
                     const std::optional<std::string>& labels_path,
                     const EdgeListOptions& opts = {});

void save_labels(const std::string& path, const NodeLabels& labels,
                 const std::vector<std::string>& id_map);

Matrix adjacency(const DirectedGraph& g);

// (A + A^T) / 2; result is bit-exactly symmetric.
Matrix symmetrize(const Matrix& a);

// Diag(|A_s| e) for a symmetric input.
Matrix abs_degree(const Matrix& a_sym);

// Collapses every antiparallel pair to its net flow: the surviving edge keeps
// the direction whose net weight is positive; zero net flow removes the pair.
// Other edges pass through unchanged. Idempotent.
DirectedGraph flow_preprocess(const DirectedGraph& g);

struct EdgeSplit {
    std::vector<int> train;  // indices into g.edges; includes a spanning tree
    std::vector<int> val;
    std::vector<int> test;
};

// Randomized-BFS spanning tree over the undirected support is forced into
// train; the remaining edges are shuffled and dealt to test, then val.
// round(frac * |E|) sizes. Throws on a disconnected graph, fractions outside
// (0,1), or when the free-edge pool cannot cover the request.
EdgeSplit spanning_tree_split(const DirectedGraph& g, double test_frac,
                              double val_frac, std::uint64_t seed);

// Spanning tree alone (edge indices, |tree| == n-1). Used by split builders
// that manage their own partitioning of the non-tree edges.
std::vector<int> spanning_tree(const DirectedGraph& g, Rng& rng);

// Subgraph with the same node set and the listed edges.
DirectedGraph edge_subgraph(const DirectedGraph& g, const std::vector<int>& edge_ids);

DirectedGraph from_adjacency(const Matrix& a);

struct RandomDigraphOptions {
    bool binary = false;       // weight 1 instead of uniform [-10,10]\{0}
    bool allow_digons = true;
    double w_lo = -10.0;
    double w_hi = 10.0;
};

// Each ordered pair (i,j), i != j, carries an edge with probability p.
// With allow_digons = false, only pairs i < j are sampled and a random
// orientation is chosen.
DirectedGraph random_digraph(int n, double p, Rng& rng,
                             const RandomDigraphOptions& opts = {});

// Random spanning tree plus extra random edges; connected undirected support.
DirectedGraph random_connected_digraph(int n, double extra_p, Rng& rng,
                                       const RandomDigraphOptions& opts = {});

}  // namespace sigmanet
