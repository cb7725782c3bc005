#pragma once

#include <cstdint>

#include "sigmanet/graph.hpp"
#include "sigmanet/types.hpp"

namespace sigmanet {

// Directed stochastic block model over C equal-size communities.
// alpha(i,j): probability an unordered pair spanning communities i,j carries
// an edge (symmetric). beta(i,j): probability that the edge on a canonically
// ordered pair (u,v) points u -> v, where u is the endpoint in the lower
// community (lower node id on ties); beta(i,j) + beta(j,i) == 1.
// Weights are uniform integers in [weight_lo, weight_hi].
struct DsbmConfig {
    int n = 0;
    int communities = 0;
    Matrix alpha;
    Matrix beta;
    long weight_lo = 2;
    long weight_hi = 1000;
};

void validate(const DsbmConfig& cfg);

// Convenience constructor from the scalar parameterization: alpha_intra on the
// diagonal, alpha_inter elsewhere; beta(i,j) = beta_low_to_high for i < j.
DsbmConfig make_dsbm_config(int n, int communities, double alpha_intra,
                            double alpha_inter, double beta_low_to_high,
                            long weight_lo = 2, long weight_hi = 1000);

struct DsbmSample {
    DirectedGraph graph;
    NodeLabels labels;  // community index per node
};

// No self-loops, no antiparallel pairs; deterministic for a fixed seed.
DsbmSample generate_dsbm(const DsbmConfig& cfg, std::uint64_t seed);

// Flips the sign of round(frac * |E|) edge weights chosen uniformly at random.
DirectedGraph flip_edge_signs(const DirectedGraph& g, double frac, std::uint64_t seed);

// Marks round(frac * n) nodes at random and negates the weight of every edge
// whose target is marked. Gives a signed graph whose edge signs are carried by
// node-level structure, so held-out signs stay predictable from the rest of
// the graph.
DirectedGraph flip_signs_into_marked_nodes(const DirectedGraph& g, double frac,
                                           std::uint64_t seed);

}  // namespace sigmanet
