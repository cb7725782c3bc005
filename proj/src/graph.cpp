#include "sigmanet/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sigmanet {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool is_nonneg_integer(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

std::string fmt_line(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

}  // namespace

void validate(const DirectedGraph& g) {
    if (g.n < 0) throw ValidationError("graph: negative node count");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g.edges) {
        if (e.src < 0 || e.src >= g.n || e.dst < 0 || e.dst >= g.n)
            throw ValidationError("graph: edge endpoint out of range");
        if (e.src == e.dst) throw ValidationError("graph: self-loop");
        if (e.weight == 0.0) throw ValidationError("graph: zero edge weight");
        if (!std::isfinite(e.weight)) throw ValidationError("graph: non-finite edge weight");
        if (!seen.insert({e.src, e.dst}).second)
            throw ValidationError("graph: duplicate edge");
    }
}

int num_classes(const NodeLabels& l) {
    int d = 0;
    for (int c : l.labels) d = std::max(d, c + 1);
    return d;
}

LoadedGraph from_edge_list(const std::string& path, const EdgeListOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge list: " + path);

    struct Row {
        std::string src, dst;
        double w;
        std::size_t line_no;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_candidate = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 3)
            throw ValidationError("edge list parse error (expected 3 fields) at " +
                                  fmt_line(path, line_no));
        double w;
        if (!parse_double(fields[2], w)) {
            if (first_data_candidate) {  // header row
                first_data_candidate = false;
                continue;
            }
            throw ValidationError("edge list parse error (bad weight) at " +
                                  fmt_line(path, line_no));
        }
        first_data_candidate = false;
        if (fields[0].empty() || fields[1].empty())
            throw ValidationError("edge list parse error (empty id) at " +
                                  fmt_line(path, line_no));
        if (fields[0] == fields[1])
            throw ValidationError("self-loop at " + fmt_line(path, line_no));
        if (w == 0.0)
            throw ValidationError("zero edge weight at " + fmt_line(path, line_no));
        rows.push_back({fields[0], fields[1], w, line_no});
    }

    // Dense id map: numeric order when every id is a nonnegative integer.
    std::set<std::string> distinct;
    for (const Row& r : rows) {
        distinct.insert(r.src);
        distinct.insert(r.dst);
    }
    std::vector<std::string> ids(distinct.begin(), distinct.end());
    const bool all_numeric =
        std::all_of(ids.begin(), ids.end(), is_nonneg_integer);
    if (all_numeric) {
        std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
    }
    std::unordered_map<std::string, int> to_dense;
    for (std::size_t i = 0; i < ids.size(); ++i) to_dense[ids[i]] = static_cast<int>(i);

    LoadedGraph out;
    out.id_map = ids;
    out.graph.n = static_cast<int>(ids.size());
    if (opts.n_hint) {
        if (*opts.n_hint < out.graph.n)
            throw ValidationError("n_hint smaller than the number of distinct node ids");
        out.graph.n = *opts.n_hint;
    }

    std::map<std::pair<int, int>, double> acc;          // merged weights
    std::map<std::pair<int, int>, std::size_t> first;   // first line per pair
    std::vector<std::pair<int, int>> order;
    for (const Row& r : rows) {
        std::pair<int, int> key{to_dense[r.src], to_dense[r.dst]};
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc[key] = r.w;
            first[key] = r.line_no;
            order.push_back(key);
        } else {
            if (!opts.merge_parallel)
                throw ValidationError("duplicate edge at " + fmt_line(path, r.line_no));
            it->second += r.w;
        }
    }
    for (const auto& key : order) {
        double w = acc[key];
        if (w == 0.0) continue;  // parallel rows cancelled out
        out.graph.edges.push_back({key.first, key.second, w});
    }
    validate(out.graph);
    return out;
}

void save_edge_list(const std::string& path, const DirectedGraph& g) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write edge list: " + path);
    out << "src,dst,weight\n";
    char buf[64];
    for (const Edge& e : g.edges) {
        std::snprintf(buf, sizeof buf, "%.17g", e.weight);
        out << e.src << "," << e.dst << "," << buf << "\n";
    }
}

void save_id_map(const std::string& path, const std::vector<std::string>& id_map) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write id map: " + path);
    out << "original_id,dense_id\n";
    for (std::size_t i = 0; i < id_map.size(); ++i)
        out << id_map[i] << "," << i << "\n";
}

Dataset load_dataset(const std::string& edges_path,
                     const std::optional<std::string>& labels_path,
                     const EdgeListOptions& opts) {
    LoadedGraph lg = from_edge_list(edges_path, opts);
    Dataset ds;
    ds.graph = std::move(lg.graph);
    ds.id_map = std::move(lg.id_map);
    if (!labels_path) return ds;

    std::ifstream in(*labels_path);
    if (!in) throw ValidationError("cannot open labels: " + *labels_path);
    std::unordered_map<std::string, int> to_dense;
    for (std::size_t i = 0; i < ds.id_map.size(); ++i)
        to_dense[ds.id_map[i]] = static_cast<int>(i);

    std::vector<std::pair<std::string, int>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_candidate = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2)
            throw ValidationError("label parse error (expected 2 fields) at " +
                                  fmt_line(*labels_path, line_no));
        double c;
        if (!parse_double(fields[1], c)) {
            if (first_data_candidate) {
                first_data_candidate = false;
                continue;
            }
            throw ValidationError("label parse error (bad class) at " +
                                  fmt_line(*labels_path, line_no));
        }
        first_data_candidate = false;
        if (c != std::floor(c) || c < 0)
            throw ValidationError("label parse error (class must be a nonnegative "
                                  "integer) at " + fmt_line(*labels_path, line_no));
        rows.push_back({fields[0], static_cast<int>(c)});
    }

    // Nodes that appear only in the label file become isolated graph nodes.
    std::vector<std::string> extra;
    for (const auto& [id, c] : rows)
        if (!to_dense.count(id)) extra.push_back(id);
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    for (const std::string& id : extra) {
        to_dense[id] = static_cast<int>(ds.id_map.size());
        ds.id_map.push_back(id);
    }
    if (static_cast<int>(ds.id_map.size()) > ds.graph.n)
        ds.graph.n = static_cast<int>(ds.id_map.size());

    ds.labels.labels.assign(ds.graph.n, -1);
    for (const auto& [id, c] : rows) {
        int dense = to_dense[id];
        if (ds.labels.labels[dense] != -1 && ds.labels.labels[dense] != c)
            throw ValidationError("conflicting labels for node id " + id);
        ds.labels.labels[dense] = c;
    }
    for (int i = 0; i < ds.graph.n; ++i)
        if (ds.labels.labels[i] < 0)
            throw ValidationError("node without a label: dense id " + std::to_string(i));
    return ds;
}

void save_labels(const std::string& path, const NodeLabels& labels,
                 const std::vector<std::string>& id_map) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write labels: " + path);
    out << "node_id,class_index\n";
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (i < id_map.size())
            out << id_map[i];
        else
            out << i;
        out << "," << labels.labels[i] << "\n";
    }
}

Matrix adjacency(const DirectedGraph& g) {
    Matrix a = Matrix::Zero(g.n, g.n);
    for (const Edge& e : g.edges) a(e.src, e.dst) = e.weight;
    return a;
}

Matrix symmetrize(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("symmetrize: non-square input");
    const Eigen::Index n = a.rows();
    Matrix s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i, i) = a(i, i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

Matrix abs_degree(const Matrix& a_sym) {
    if (a_sym.rows() != a_sym.cols())
        throw ValidationError("abs_degree: non-square input");
    for (Eigen::Index i = 0; i < a_sym.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a_sym.cols(); ++j)
            if (a_sym(i, j) != a_sym(j, i))
                throw ValidationError("abs_degree: asymmetric input");
    Matrix d = Matrix::Zero(a_sym.rows(), a_sym.cols());
    for (Eigen::Index i = 0; i < a_sym.rows(); ++i)
        d(i, i) = a_sym.row(i).cwiseAbs().sum();
    return d;
}

DirectedGraph flow_preprocess(const DirectedGraph& g) {
    std::map<std::pair<int, int>, double> w;
    for (const Edge& e : g.edges) w[{e.src, e.dst}] = e.weight;

    DirectedGraph out;
    out.n = g.n;
    std::set<std::pair<int, int>> done;  // unordered pairs already emitted
    for (const Edge& e : g.edges) {
        const int u = std::min(e.src, e.dst), v = std::max(e.src, e.dst);
        if (done.count({u, v})) continue;
        auto rev = w.find({e.dst, e.src});
        if (rev == w.end()) {
            out.edges.push_back(e);
            continue;
        }
        done.insert({u, v});
        const double net = e.weight - rev->second;
        if (net > 0.0)
            out.edges.push_back({e.src, e.dst, net});
        else if (net < 0.0)
            out.edges.push_back({e.dst, e.src, -net});
        // net == 0: both directions cancel and the pair disappears
    }
    return out;
}

std::vector<int> spanning_tree(const DirectedGraph& g, Rng& rng) {
    if (g.n == 0) return {};
    // Undirected support; a digon contributes two candidate edges for its pair.
    std::vector<std::vector<std::pair<int, int>>> adj(g.n);  // (neighbor, edge id)
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        adj[e.src].push_back({e.dst, static_cast<int>(i)});
        adj[e.dst].push_back({e.src, static_cast<int>(i)});
    }
    for (auto& nbrs : adj) rng.shuffle(nbrs);

    std::vector<int> tree;
    std::vector<char> visited(g.n, 0);
    std::vector<int> frontier;
    const int start = static_cast<int>(rng.index(static_cast<std::size_t>(g.n)));
    visited[start] = 1;
    frontier.push_back(start);
    std::size_t head = 0;
    while (head < frontier.size()) {
        const int u = frontier[head++];
        for (const auto& [v, eid] : adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            tree.push_back(eid);
            frontier.push_back(v);
        }
    }
    if (frontier.size() != static_cast<std::size_t>(g.n))
        throw ValidationError("spanning tree: graph is disconnected");
    return tree;
}

EdgeSplit spanning_tree_split(const DirectedGraph& g, double test_frac,
                              double val_frac, std::uint64_t seed) {
    if (test_frac < 0.0 || val_frac < 0.0 || test_frac + val_frac <= 0.0 ||
        test_frac + val_frac >= 1.0)
        throw ValidationError("spanning_tree_split: fractions out of range");
    Rng rng(seed);
    std::vector<int> tree = spanning_tree(g, rng);
    std::vector<char> in_tree(g.edges.size(), 0);
    for (int eid : tree) in_tree[eid] = 1;
    std::vector<int> free_edges;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (!in_tree[i]) free_edges.push_back(static_cast<int>(i));
    rng.shuffle(free_edges);

    const auto m = static_cast<double>(g.edges.size());
    const auto n_test = static_cast<std::size_t>(std::lround(test_frac * m));
    const auto n_val = static_cast<std::size_t>(std::lround(val_frac * m));
    if (n_test + n_val > free_edges.size())
        throw ValidationError("spanning_tree_split: infeasible split (free edges "
                              "cannot cover the requested test+val sizes)");

    EdgeSplit s;
    s.test.assign(free_edges.begin(), free_edges.begin() + n_test);
    s.val.assign(free_edges.begin() + n_test, free_edges.begin() + n_test + n_val);
    s.train = tree;
    s.train.insert(s.train.end(), free_edges.begin() + n_test + n_val, free_edges.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

DirectedGraph edge_subgraph(const DirectedGraph& g, const std::vector<int>& edge_ids) {
    DirectedGraph out;
    out.n = g.n;
    out.edges.reserve(edge_ids.size());
    for (int eid : edge_ids) out.edges.push_back(g.edges[eid]);
    return out;
}

DirectedGraph from_adjacency(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("from_adjacency: non-square input");
    DirectedGraph g;
    g.n = static_cast<int>(a.rows());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && a(i, j) != 0.0) g.edges.push_back({i, j, a(i, j)});
    return g;
}

namespace {

double draw_weight(Rng& rng, const RandomDigraphOptions& opts) {
    if (opts.binary) return 1.0;
    double w = 0.0;
    while (w == 0.0) w = rng.uniform_real(opts.w_lo, opts.w_hi);
    return w;
}

}  // namespace

DirectedGraph random_digraph(int n, double p, Rng& rng,
                             const RandomDigraphOptions& opts) {
    DirectedGraph g;
    g.n = n;
    if (opts.allow_digons) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng.bernoulli(p))
                    g.edges.push_back({i, j, draw_weight(rng, opts)});
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.bernoulli(p)) {
                    const bool fwd = rng.bernoulli(0.5);
                    g.edges.push_back({fwd ? i : j, fwd ? j : i, draw_weight(rng, opts)});
                }
    }
    return g;
}

DirectedGraph random_connected_digraph(int n, double extra_p, Rng& rng,
                                       const RandomDigraphOptions& opts) {
    DirectedGraph g;
    g.n = n;
    std::set<std::pair<int, int>> used_ordered;
    std::set<std::pair<int, int>> used_pairs;
    auto add = [&](int a, int b, double w) {
        g.edges.push_back({a, b, w});
        used_ordered.insert({a, b});
        used_pairs.insert({std::min(a, b), std::max(a, b)});
    };

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (int i = 1; i < n; ++i) {
        const int a = order[i];
        const int b = order[rng.index(static_cast<std::size_t>(i))];
        const bool fwd = rng.bernoulli(0.5);
        add(fwd ? a : b, fwd ? b : a, draw_weight(rng, opts));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (!rng.bernoulli(extra_p)) continue;
            if (!opts.allow_digons && used_pairs.count({i, j})) continue;
            const bool fwd = rng.bernoulli(0.5);
            const int a = fwd ? i : j, b = fwd ? j : i;
            if (used_ordered.count({a, b})) continue;
            add(a, b, draw_weight(rng, opts));
        }
    return g;
}

}  // namespace sigmanet
