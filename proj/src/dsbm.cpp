#include "sigmanet/dsbm.hpp"

#include <cmath>

#include "sigmanet/rng.hpp"

namespace sigmanet {

void validate(const DsbmConfig& cfg) {
    if (cfg.n <= 0 || cfg.communities <= 0)
        throw ValidationError("dsbm: n and communities must be positive");
    if (cfg.n % cfg.communities != 0)
        throw ValidationError("dsbm: n must be divisible by the community count");
    const int c = cfg.communities;
    if (cfg.alpha.rows() != c || cfg.alpha.cols() != c ||
        cfg.beta.rows() != c || cfg.beta.cols() != c)
        throw ValidationError("dsbm: alpha/beta must be C x C");
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            if (cfg.alpha(i, j) < 0.0 || cfg.alpha(i, j) > 1.0)
                throw ValidationError("dsbm: alpha entries must lie in [0,1]");
            if (cfg.alpha(i, j) != cfg.alpha(j, i))
                throw ValidationError("dsbm: alpha must be symmetric");
            if (cfg.beta(i, j) < 0.0 || cfg.beta(i, j) > 1.0)
                throw ValidationError("dsbm: beta entries must lie in [0,1]");
            if (cfg.beta(i, j) + cfg.beta(j, i) != 1.0)
                throw ValidationError("dsbm: beta(i,j) + beta(j,i) must equal 1");
        }
    if (cfg.weight_lo < 2 || cfg.weight_lo > cfg.weight_hi)
        throw ValidationError("dsbm: need 2 <= weight_lo <= weight_hi");
}

DsbmConfig make_dsbm_config(int n, int communities, double alpha_intra,
                            double alpha_inter, double beta_low_to_high,
                            long weight_lo, long weight_hi) {
    DsbmConfig cfg;
    cfg.n = n;
    cfg.communities = communities;
    cfg.alpha = Matrix::Constant(communities, communities, alpha_inter);
    cfg.alpha.diagonal().setConstant(alpha_intra);
    cfg.beta = Matrix::Constant(communities, communities, beta_low_to_high);
    for (int i = 0; i < communities; ++i)
        for (int j = 0; j < i; ++j) cfg.beta(i, j) = 1.0 - beta_low_to_high;
    cfg.beta.diagonal().setConstant(0.5);
    cfg.weight_lo = weight_lo;
    cfg.weight_hi = weight_hi;
    validate(cfg);
    return cfg;
}

DsbmSample generate_dsbm(const DsbmConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    const int block = cfg.n / cfg.communities;
    DsbmSample out;
    out.graph.n = cfg.n;
    out.labels.labels.resize(cfg.n);
    for (int u = 0; u < cfg.n; ++u) out.labels.labels[u] = u / block;

    Rng rng(seed);
    for (int u = 0; u < cfg.n; ++u) {
        const int cu = out.labels.labels[u];
        for (int v = u + 1; v < cfg.n; ++v) {
            const int cv = out.labels.labels[v];
            if (!rng.bernoulli(cfg.alpha(cu, cv))) continue;
            // Canonical order: lower community first; node id breaks ties
            // (already guaranteed by u < v within a community).
            int a = u, b = v, ca = cu, cb = cv;
            if (cv < cu) {
                std::swap(a, b);
                std::swap(ca, cb);
            }
            const bool forward = rng.bernoulli(cfg.beta(ca, cb));
            const double w =
                static_cast<double>(rng.uniform_int(cfg.weight_lo, cfg.weight_hi));
            if (forward)
                out.graph.edges.push_back({a, b, w});
            else
                out.graph.edges.push_back({b, a, w});
        }
    }
    return out;
}

DirectedGraph flip_edge_signs(const DirectedGraph& g, double frac, std::uint64_t seed) {
    if (frac < 0.0 || frac > 1.0)
        throw ValidationError("flip_edge_signs: fraction out of range");
    DirectedGraph out = g;
    std::vector<int> ids(g.edges.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(ids);
    const auto k = static_cast<std::size_t>(
        std::lround(frac * static_cast<double>(g.edges.size())));
    for (std::size_t i = 0; i < k; ++i) out.edges[ids[i]].weight *= -1.0;
    return out;
}

DirectedGraph flip_signs_into_marked_nodes(const DirectedGraph& g, double frac,
                                           std::uint64_t seed) {
    if (frac < 0.0 || frac > 1.0)
        throw ValidationError("flip_signs_into_marked_nodes: fraction out of range");
    std::vector<int> nodes(g.n);
    for (int i = 0; i < g.n; ++i) nodes[i] = i;
    Rng rng(seed);
    rng.shuffle(nodes);
    const auto k = static_cast<std::size_t>(
        std::lround(frac * static_cast<double>(g.n)));
    std::vector<char> marked(g.n, 0);
    for (std::size_t i = 0; i < k; ++i) marked[nodes[i]] = 1;
    DirectedGraph out = g;
    for (Edge& e : out.edges)
        if (marked[e.dst]) e.weight *= -1.0;
    return out;
}

}  // namespace sigmanet
