#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "sigmanet/dsbm.hpp"
#include "sigmanet/rng.hpp"

using namespace sigmanet;

namespace {

int community_of(const DsbmSample& s, int node) { return s.labels.labels[node]; }

// 3-sigma binomial band check: observed count k over m trials vs probability p
bool within_3sigma(long k, long m, double p) {
    if (m == 0) return true;
    const double mean = m * p;
    const double sd = std::sqrt(m * p * (1.0 - p));
    return std::abs(k - mean) <= 3.0 * sd + 1e-9;
}

}  // namespace

TEST_CASE("config validation catches bad parameterizations") {
    CHECK_NOTHROW(validate(make_dsbm_config(20, 4, 0.1, 0.1, 0.2)));
    // n not divisible by community count
    CHECK_THROWS_AS(make_dsbm_config(21, 4, 0.1, 0.1, 0.2), ValidationError);
    CHECK_THROWS_AS(make_dsbm_config(20, 0, 0.1, 0.1, 0.2), ValidationError);
    CHECK_THROWS_AS(make_dsbm_config(20, 4, 1.5, 0.1, 0.2), ValidationError);
    CHECK_THROWS_AS(make_dsbm_config(20, 4, 0.1, -0.1, 0.2), ValidationError);
    CHECK_THROWS_AS(make_dsbm_config(20, 4, 0.1, 0.1, 1.2), ValidationError);
    CHECK_THROWS_AS(make_dsbm_config(20, 4, 0.1, 0.1, 0.2, 1, 1000),
                    ValidationError);  // weights must start at 2
    CHECK_THROWS_AS(make_dsbm_config(20, 4, 0.1, 0.1, 0.2, 10, 5),
                    ValidationError);

    DsbmConfig cfg = make_dsbm_config(20, 2, 0.1, 0.1, 0.2);
    cfg.alpha(0, 1) = 0.3;  // breaks symmetry
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = make_dsbm_config(20, 2, 0.1, 0.1, 0.2);
    cfg.beta(0, 1) = 0.3;  // beta(0,1) + beta(1,0) != 1
    CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("scalar config fills the matrices as documented") {
    const DsbmConfig cfg = make_dsbm_config(30, 3, 0.4, 0.1, 0.2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(cfg.alpha(i, j) == (i == j ? 0.4 : 0.1));
            if (i < j) CHECK(cfg.beta(i, j) == 0.2);
            if (i > j) CHECK(cfg.beta(i, j) == 0.8);
            if (i == j) CHECK(cfg.beta(i, j) == 0.5);
        }
}

TEST_CASE("samples respect the structural invariants") {
    const DsbmConfig cfg = make_dsbm_config(60, 3, 0.3, 0.15, 0.2, 2, 50);
    const DsbmSample s = generate_dsbm(cfg, 99);
    validate(s.graph);
    CHECK(s.graph.n == 60);
    REQUIRE(s.labels.labels.size() == 60);

    // equal-size contiguous communities
    std::vector<int> counts(3, 0);
    for (int c : s.labels.labels) {
        REQUIRE(c >= 0);
        REQUIRE(c < 3);
        ++counts[c];
    }
    CHECK(counts == std::vector<int>{20, 20, 20});

    std::set<std::pair<int, int>> pairs;
    for (const Edge& e : s.graph.edges) {
        CHECK(e.src != e.dst);
        CHECK(!pairs.count({e.dst, e.src}));  // no antiparallel pair
        pairs.insert({e.src, e.dst});
        CHECK(e.weight >= 2.0);
        CHECK(e.weight <= 50.0);
        CHECK(e.weight == std::floor(e.weight));  // integer weights
    }
}

TEST_CASE("samples are deterministic per seed") {
    const DsbmConfig cfg = make_dsbm_config(40, 4, 0.2, 0.1, 0.3);
    const DsbmSample a = generate_dsbm(cfg, 5);
    const DsbmSample b = generate_dsbm(cfg, 5);
    REQUIRE(a.graph.edges.size() == b.graph.edges.size());
    for (std::size_t i = 0; i < a.graph.edges.size(); ++i) {
        CHECK(a.graph.edges[i].src == b.graph.edges[i].src);
        CHECK(a.graph.edges[i].dst == b.graph.edges[i].dst);
        CHECK(a.graph.edges[i].weight == b.graph.edges[i].weight);
    }
    CHECK(a.labels.labels == b.labels.labels);

    const DsbmSample c = generate_dsbm(cfg, 6);
    CHECK(a.graph.edges.size() != c.graph.edges.size());
}

TEST_CASE("edge frequencies match alpha within 3 sigma at n = 2500") {
    const int n = 2500, communities = 5;
    const double a_ii = 0.1, a_ij = 0.02, beta = 0.2;
    const DsbmConfig cfg = make_dsbm_config(n, communities, a_ii, a_ij, beta);
    const DsbmSample s = generate_dsbm(cfg, 777);

    long intra_pairs = 0, inter_pairs = 0;
    {
        const long per = n / communities;           // 500
        intra_pairs = communities * per * (per - 1) / 2;
        inter_pairs = static_cast<long>(n) * (n - 1) / 2 - intra_pairs;
    }
    long intra_edges = 0, inter_edges = 0;
    for (const Edge& e : s.graph.edges) {
        if (community_of(s, e.src) == community_of(s, e.dst))
            ++intra_edges;
        else
            ++inter_edges;
    }
    CHECK(within_3sigma(intra_edges, intra_pairs, a_ii));
    CHECK(within_3sigma(inter_edges, inter_pairs, a_ij));
}

TEST_CASE("direction frequency: low-to-high community edges occur with rate beta") {
    const int n = 2500, communities = 5;
    const double beta = 0.2;
    const DsbmConfig cfg = make_dsbm_config(n, communities, 0.1, 0.02, beta);
    const DsbmSample s = generate_dsbm(cfg, 778);

    long inter = 0, low_to_high = 0;
    for (const Edge& e : s.graph.edges) {
        const int cs = community_of(s, e.src), cd = community_of(s, e.dst);
        if (cs == cd) continue;
        ++inter;
        if (cs < cd) ++low_to_high;
    }
    REQUIRE(inter > 1000);  // enough mass for the band to be meaningful
    CHECK(within_3sigma(low_to_high, inter, beta));

    // intra-community edges are direction-balanced (beta_ii = 0.5); canonical
    // order inside a community is the lower node id
    long intra = 0, low_id_first = 0;
    for (const Edge& e : s.graph.edges) {
        if (community_of(s, e.src) != community_of(s, e.dst)) continue;
        ++intra;
        if (e.src < e.dst) ++low_id_first;
    }
    REQUIRE(intra > 1000);
    CHECK(within_3sigma(low_id_first, intra, 0.5));
}

TEST_CASE("weights cover their range uniformly-ish") {
    const DsbmConfig cfg = make_dsbm_config(200, 2, 0.5, 0.5, 0.5, 2, 5);
    const DsbmSample s = generate_dsbm(cfg, 12);
    std::vector<long> counts(6, 0);
    for (const Edge& e : s.graph.edges) ++counts[static_cast<int>(e.weight)];
    CHECK(counts[0] == 0);
    CHECK(counts[1] == 0);
    const long total = static_cast<long>(s.graph.edges.size());
    for (int w = 2; w <= 5; ++w) CHECK(within_3sigma(counts[w], total, 0.25));
}

TEST_CASE("flip_edge_signs: exact count, only signs change") {
    const DsbmConfig cfg = make_dsbm_config(100, 2, 0.2, 0.2, 0.5);
    const DsbmSample s = generate_dsbm(cfg, 31);
    const double frac = 0.15;
    const DirectedGraph f = flip_edge_signs(s.graph, frac, 8);
    REQUIRE(f.edges.size() == s.graph.edges.size());

    long flipped = 0;
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
        CHECK(f.edges[i].src == s.graph.edges[i].src);
        CHECK(f.edges[i].dst == s.graph.edges[i].dst);
        if (f.edges[i].weight == -s.graph.edges[i].weight)
            ++flipped;
        else
            CHECK(f.edges[i].weight == s.graph.edges[i].weight);
    }
    CHECK(flipped == std::lround(frac * static_cast<double>(s.graph.edges.size())));

    // deterministic
    const DirectedGraph f2 = flip_edge_signs(s.graph, frac, 8);
    for (std::size_t i = 0; i < f.edges.size(); ++i)
        CHECK(f.edges[i].weight == f2.edges[i].weight);

    CHECK_THROWS_AS(flip_edge_signs(s.graph, -0.1, 8), ValidationError);
    CHECK_THROWS_AS(flip_edge_signs(s.graph, 1.1, 8), ValidationError);
}

TEST_CASE("flip_signs_into_marked_nodes: negation is per-target-node") {
    const DsbmConfig cfg = make_dsbm_config(100, 2, 0.2, 0.2, 0.5);
    const DsbmSample s = generate_dsbm(cfg, 32);
    const double frac = 0.15;
    const DirectedGraph f = flip_signs_into_marked_nodes(s.graph, frac, 9);
    REQUIRE(f.edges.size() == s.graph.edges.size());

    // recover the marked set from the flips, then check global consistency:
    // an edge is negated exactly when its target is marked
    std::set<int> marked;
    for (std::size_t i = 0; i < f.edges.size(); ++i)
        if (f.edges[i].weight == -s.graph.edges[i].weight &&
            f.edges[i].weight != s.graph.edges[i].weight)
            marked.insert(f.edges[i].dst);
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
        const bool negated = f.edges[i].weight == -s.graph.edges[i].weight &&
                             f.edges[i].weight != s.graph.edges[i].weight;
        CHECK(negated == (marked.count(f.edges[i].dst) > 0));
    }
    // marked nodes with no incoming edge are invisible, so the recovered set
    // can only be smaller than the drawn one
    CHECK(marked.size() <= static_cast<std::size_t>(std::lround(frac * 100)));
    CHECK(!marked.empty());

    // the negative-edge share lands near frac for uniform-ish in-degrees
    long neg = 0;
    for (const Edge& e : f.edges)
        if (e.weight < 0) ++neg;
    const double share = static_cast<double>(neg) / f.edges.size();
    CHECK(share > 0.05);
    CHECK(share < 0.30);
}
