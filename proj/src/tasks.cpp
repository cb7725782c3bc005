#include "sigmanet/tasks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "sigmanet/laplacian.hpp"
#include "sigmanet/rng.hpp"

namespace sigmanet {

const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::node: return "node";
        case TaskKind::link_exist: return "link-exist";
        case TaskKind::link_direction: return "link-direction";
        case TaskKind::link_sign: return "link-sign";
    }
    return "?";
}

TaskKind task_from_string(const std::string& s) {
    if (s == "node") return TaskKind::node;
    if (s == "link-exist") return TaskKind::link_exist;
    if (s == "link-direction") return TaskKind::link_direction;
    if (s == "link-sign") return TaskKind::link_sign;
    throw ValidationError("unknown task: " + s);
}

Matrix build_degree_features(const DirectedGraph& g, bool use_abs) {
    Matrix x = Matrix::Zero(g.n, 2);
    for (const Edge& e : g.edges) {
        const double w = use_abs ? std::abs(e.weight) : e.weight;
        x(e.dst, 0) += w;  // weighted in-degree
        x(e.src, 1) += w;  // weighted out-degree
    }
    return x;
}

namespace {

std::vector<std::array<int, 2>> edge_pairs(const DirectedGraph& g,
                                           const std::vector<int>& ids) {
    std::vector<std::array<int, 2>> out;
    out.reserve(ids.size());
    for (int eid : ids) out.push_back({g.edges[eid].src, g.edges[eid].dst});
    return out;
}

}  // namespace

std::vector<TaskSplit> make_sign_task(const DirectedGraph& g, int k,
                                      std::uint64_t seed, double val_frac) {
    validate(g);
    if (k < 2) throw ValidationError("make_sign_task: need at least 2 folds");
    if (val_frac < 0.0 || val_frac >= 1.0)
        throw ValidationError("make_sign_task: val fraction out of range");
    bool has_pos = false, has_neg = false;
    for (const Edge& e : g.edges) (e.weight > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw ValidationError("make_sign_task: graph must contain both positive "
                              "and negative edges");

    Rng rng(mix_seed(seed, 0));
    const std::vector<int> tree = spanning_tree(g, rng);
    std::vector<char> in_tree(g.edges.size(), 0);
    for (int eid : tree) in_tree[eid] = 1;
    std::vector<int> free_edges;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (!in_tree[i]) free_edges.push_back(static_cast<int>(i));
    if (free_edges.size() < static_cast<std::size_t>(k))
        throw ValidationError("make_sign_task: fewer non-tree edges than folds");
    rng.shuffle(free_edges);

    // Chunk f holds the test edges of fold f; sizes differ by at most one.
    std::vector<std::vector<int>> chunks(k);
    const std::size_t base = free_edges.size() / k, rem = free_edges.size() % k;
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t len = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
        chunks[f].assign(free_edges.begin() + pos, free_edges.begin() + pos + len);
        pos += len;
    }

    auto label_of = [&](int eid) { return g.edges[eid].weight > 0.0 ? 1 : 0; };
    std::vector<TaskSplit> folds;
    for (int f = 0; f < k; ++f) {
        std::vector<int> test_ids = chunks[f];
        std::vector<int> pool;  // non-tree candidates for train/val
        for (int other = 0; other < k; ++other)
            if (other != f)
                pool.insert(pool.end(), chunks[other].begin(), chunks[other].end());

        const std::size_t train_total = tree.size() + pool.size();
        auto n_val = static_cast<std::size_t>(
            std::lround(val_frac * static_cast<double>(train_total)));
        n_val = std::min(n_val, pool.size());
        Rng fold_rng(mix_seed(seed, 100 + static_cast<std::uint64_t>(f)));
        fold_rng.shuffle(pool);
        std::vector<int> val_ids(pool.begin(), pool.begin() + n_val);
        std::vector<int> train_ids(pool.begin() + n_val, pool.end());
        train_ids.insert(train_ids.end(), tree.begin(), tree.end());
        std::sort(train_ids.begin(), train_ids.end());
        std::sort(val_ids.begin(), val_ids.end());
        std::sort(test_ids.begin(), test_ids.end());

        TaskSplit ts;
        ts.kind = TaskKind::link_sign;
        ts.train_graph = edge_subgraph(g, train_ids);
        ts.train_queries = QuerySet::edges(edge_pairs(g, train_ids));
        ts.val_queries = QuerySet::edges(edge_pairs(g, val_ids));
        ts.test_queries = QuerySet::edges(edge_pairs(g, test_ids));
        for (int eid : train_ids) ts.train_labels.push_back(label_of(eid));
        for (int eid : val_ids) ts.val_labels.push_back(label_of(eid));
        for (int eid : test_ids) ts.test_labels.push_back(label_of(eid));
        folds.push_back(std::move(ts));
    }
    return folds;
}

std::vector<TaskSplit> make_link_task(const DirectedGraph& g, TaskKind kind, int k,
                                      std::uint64_t seed, double test_frac,
                                      double val_frac) {
    validate(g);
    if (kind != TaskKind::link_exist && kind != TaskKind::link_direction)
        throw ValidationError("make_link_task: task must be link-exist or "
                              "link-direction");
    if (k < 1) throw ValidationError("make_link_task: need at least 1 fold");

    std::set<std::pair<int, int>> present;
    std::set<std::pair<int, int>> pairs;
    for (const Edge& e : g.edges) {
        present.insert({e.src, e.dst});
        pairs.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
    }

    std::vector<TaskSplit> folds;
    for (int f = 0; f < k; ++f) {
        const std::uint64_t fold_seed = mix_seed(seed, kStreamSplit + f);
        EdgeSplit es = spanning_tree_split(g, test_frac, val_frac, fold_seed);
        TaskSplit ts;
        ts.kind = kind;
        ts.train_graph = edge_subgraph(g, es.train);

        if (kind == TaskKind::link_direction) {
            auto emit = [&](const std::vector<int>& ids, QuerySet& q,
                            std::vector<int>& labels) {
                std::vector<std::array<int, 2>> items;
                items.reserve(2 * ids.size());
                for (int eid : ids) {
                    const Edge& e = g.edges[eid];
                    items.push_back({e.src, e.dst});
                    labels.push_back(1);
                    items.push_back({e.dst, e.src});
                    labels.push_back(0);
                }
                q = QuerySet::edges(items);
            };
            emit(es.train, ts.train_queries, ts.train_labels);
            emit(es.val, ts.val_queries, ts.val_labels);
            emit(es.test, ts.test_queries, ts.test_labels);
        } else {
            const std::size_t need = g.edges.size();
            const std::size_t blocked = 2 * pairs.size();
            const auto total_ordered =
                static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n - 1);
            if (total_ordered < blocked + need)
                throw ValidationError("make_link_task: not enough non-adjacent "
                                      "ordered pairs to sample negatives");
            Rng neg_rng(mix_seed(fold_seed, kStreamNegatives));
            std::set<std::pair<int, int>> sampled;
            std::vector<std::array<int, 2>> negatives;
            std::size_t attempts = 0;
            const std::size_t cap = 1000 * need + 1000000;
            while (negatives.size() < need) {
                if (++attempts > cap)
                    throw ValidationError("make_link_task: negative sampling did "
                                          "not terminate");
                const int a = static_cast<int>(neg_rng.index(g.n));
                const int b = static_cast<int>(neg_rng.index(g.n));
                if (a == b) continue;
                if (present.count({a, b}) || present.count({b, a})) continue;
                if (!sampled.insert({a, b}).second) continue;
                negatives.push_back({a, b});
            }
            std::size_t used = 0;
            auto emit = [&](const std::vector<int>& ids, QuerySet& q,
                            std::vector<int>& labels) {
                std::vector<std::array<int, 2>> items;
                items.reserve(2 * ids.size());
                for (int eid : ids) {
                    const Edge& e = g.edges[eid];
                    items.push_back({e.src, e.dst});
                    labels.push_back(1);
                }
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    items.push_back(negatives[used++]);
                    labels.push_back(0);
                }
                q = QuerySet::edges(items);
            };
            emit(es.train, ts.train_queries, ts.train_labels);
            emit(es.val, ts.val_queries, ts.val_labels);
            emit(es.test, ts.test_queries, ts.test_labels);
        }
        folds.push_back(std::move(ts));
    }
    return folds;
}

TaskSplit make_node_task(const DirectedGraph& g, const NodeLabels& labels,
                         std::uint64_t seed) {
    validate(g);
    if (static_cast<int>(labels.labels.size()) != g.n)
        throw ValidationError("make_node_task: label count != node count");
    const int d = num_classes(labels);
    if (d < 2) throw ValidationError("make_node_task: need at least 2 classes");
    std::vector<std::vector<int>> by_class(d);
    for (int u = 0; u < g.n; ++u) {
        const int c = labels.labels[u];
        if (c < 0) throw ValidationError("make_node_task: negative class label");
        by_class[c].push_back(u);
    }
    for (int c = 0; c < d; ++c)
        if (by_class[c].size() < 5)
            throw ValidationError("make_node_task: class " + std::to_string(c) +
                                  " has fewer than 5 nodes");

    Rng rng(seed);
    std::vector<int> train_ids, val_ids, test_ids;
    for (int c = 0; c < d; ++c) {
        auto& ids = by_class[c];
        rng.shuffle(ids);
        const auto m = static_cast<double>(ids.size());
        const auto n_tr = static_cast<std::size_t>(std::lround(0.6 * m));
        const auto n_va = static_cast<std::size_t>(std::lround(0.2 * m));
        train_ids.insert(train_ids.end(), ids.begin(), ids.begin() + n_tr);
        val_ids.insert(val_ids.end(), ids.begin() + n_tr, ids.begin() + n_tr + n_va);
        test_ids.insert(test_ids.end(), ids.begin() + n_tr + n_va, ids.end());
    }
    std::sort(train_ids.begin(), train_ids.end());
    std::sort(val_ids.begin(), val_ids.end());
    std::sort(test_ids.begin(), test_ids.end());

    TaskSplit ts;
    ts.kind = TaskKind::node;
    ts.train_graph = g;  // full graph stays visible to the Laplacian
    ts.train_queries = QuerySet::nodes(train_ids);
    ts.val_queries = QuerySet::nodes(val_ids);
    ts.test_queries = QuerySet::nodes(test_ids);
    for (int u : train_ids) ts.train_labels.push_back(labels.labels[u]);
    for (int u : val_ids) ts.val_labels.push_back(labels.labels[u]);
    for (int u : test_ids) ts.test_labels.push_back(labels.labels[u]);
    return ts;
}

Metrics evaluate(const Matrix& probs, const std::vector<int>& labels) {
    const Eigen::Index m = probs.rows(), d = probs.cols();
    if (m == 0 || d < 2) throw ValidationError("evaluate: empty predictions");
    if (static_cast<Eigen::Index>(labels.size()) != m)
        throw ValidationError("evaluate: label count mismatch");
    for (int y : labels)
        if (y < 0 || y >= d) throw ValidationError("evaluate: label out of range");

    std::vector<int> preds(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        Eigen::Index best = 0;
        probs.row(r).maxCoeff(&best);
        preds[r] = static_cast<int>(best);
    }

    std::vector<long> tp(d, 0), fp(d, 0), fn(d, 0);
    long correct = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
        if (preds[r] == labels[r]) {
            ++correct;
            ++tp[preds[r]];
        } else {
            ++fp[preds[r]];
            ++fn[labels[r]];
        }
    }

    Metrics out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(m);

    auto f1_of = [&](int c) {
        const long denom = 2 * tp[c] + fp[c] + fn[c];
        return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp[c]) /
                                       static_cast<double>(denom);
    };
    double macro = 0.0;
    long tp_sum = 0, fp_sum = 0, fn_sum = 0;
    for (int c = 0; c < d; ++c) {
        macro += f1_of(c);
        tp_sum += tp[c];
        fp_sum += fp[c];
        fn_sum += fn[c];
    }
    out.macro_f1 = macro / static_cast<double>(d);
    const long micro_denom = 2 * tp_sum + fp_sum + fn_sum;
    out.micro_f1 = micro_denom == 0 ? 0.0
                                    : 2.0 * static_cast<double>(tp_sum) /
                                          static_cast<double>(micro_denom);

    if (d == 2) {
        out.binary_f1 = f1_of(1);
        long n_pos = 0;
        for (int y : labels) n_pos += (y == 1);
        const long n_neg = static_cast<long>(m) - n_pos;
        if (n_pos == 0 || n_neg == 0)
            throw ValidationError("evaluate: AUC undefined with one class absent");
        // Mann-Whitney statistic via average ranks of the class-1 probability.
        std::vector<Eigen::Index> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return probs(a, 1) < probs(b, 1);
        });
        std::vector<double> rank(m);
        Eigen::Index i = 0;
        while (i < m) {
            Eigen::Index j = i;
            while (j + 1 < m && probs(order[j + 1], 1) == probs(order[i], 1)) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (Eigen::Index t = i; t <= j; ++t) rank[order[t]] = avg;
            i = j + 1;
        }
        double pos_rank_sum = 0.0;
        for (Eigen::Index r = 0; r < m; ++r)
            if (labels[r] == 1) pos_rank_sum += rank[r];
        out.auc = (pos_rank_sum -
                   0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
                  (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    } else {
        out.binary_f1 = std::numeric_limits<double>::quiet_NaN();
        out.auc = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

MetricsReport aggregate(const std::vector<Metrics>& folds) {
    if (folds.empty()) throw ValidationError("aggregate: no folds");
    MetricsReport rep;
    rep.folds = folds;
    const double k = static_cast<double>(folds.size());
    for (const auto& [name, field] : kMetricFields) {
        (void)name;
        double mean = 0.0;
        for (const Metrics& f : folds) mean += f.*field;
        mean /= k;
        double var = 0.0;
        for (const Metrics& f : folds) {
            const double dev = f.*field - mean;
            var += dev * dev;
        }
        rep.mean.*field = mean;
        rep.stddev.*field = std::sqrt(var / k);
    }
    return rep;
}

ExperimentConfig resolve_defaults(const ExperimentConfig& in) {
    ExperimentConfig cfg = in;
    if (cfg.folds <= 0) cfg.folds = cfg.task == TaskKind::link_sign ? 5 : 10;
    if (cfg.test_frac < 0.0)
        cfg.test_frac = cfg.task == TaskKind::link_sign ? 0.0 : 0.15;
    if (cfg.val_frac < 0.0) cfg.val_frac = 0.05;
    if (cfg.flow == FlowPolicy::task_default)
        cfg.flow = cfg.task == TaskKind::link_sign ? FlowPolicy::off : FlowPolicy::on;
    if (cfg.parallel_folds < 1) cfg.parallel_folds = 1;
    return cfg;
}

namespace {

void validate_config(const ExperimentConfig& cfg) {
    if (!cfg.use_dsbm && cfg.edges_path.empty())
        throw ValidationError("experiment: no dataset (need an edge list or DSBM "
                              "parameters)");
    if (cfg.task == TaskKind::node && !cfg.use_dsbm && cfg.labels_path.empty())
        throw ValidationError("experiment: node task needs labels");
    if (cfg.f1 <= 0 || cfg.f2 <= 0)
        throw ValidationError("experiment: layer widths must be positive");
    if (cfg.max_epochs <= 0 || cfg.patience <= 0)
        throw ValidationError("experiment: epochs and patience must be positive");
    if (cfg.lr <= 0.0) throw ValidationError("experiment: lr must be positive");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
        throw ValidationError("experiment: dropout must be in [0, 1)");
    if (cfg.sign_flip_frac < 0.0 || cfg.sign_flip_frac > 1.0)
        throw ValidationError("experiment: sign flip fraction out of range");
}

FoldResult train_fold(const ExperimentConfig& cfg, const TaskSplit& split,
                      int fold_idx, int label_arity) {
    if (split.val_queries.size() == 0)
        throw ValidationError("fold " + std::to_string(fold_idx) +
                              ": empty validation set (graph too small for the "
                              "requested fractions)");
    if (split.test_queries.size() == 0)
        throw ValidationError("fold " + std::to_string(fold_idx) +
                              ": empty test set");

    const Matrix feats =
        build_degree_features(split.train_graph, cfg.task == TaskKind::link_sign);
    const Matrix a = adjacency(split.train_graph);
    const CMatrix prop = renormalized_propagation(
        a, cfg.op == OperatorKind::sign_magnetic, cfg.q);

    const bool edge_task = cfg.task != TaskKind::node;
    SigMaNetModel model =
        init_model(prop, 2, cfg.f1, cfg.f2, label_arity, edge_task, cfg.dropout,
                   mix_seed(cfg.seed, kStreamInit + fold_idx));
    TrainState state = make_train_state(model, cfg.lr, cfg.weight_decay);

    const std::uint64_t dropout_seed =
        mix_seed(cfg.seed, kStreamDropout + fold_idx);
    FoldResult res;
    res.dropout_p = model.dropout_p;
    res.concat_width = model.concat_width;
    res.best_val_loss = std::numeric_limits<double>::infinity();
    res.best_params = snapshot_params(model);
    Gradients grads;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const double train_loss = loss_and_gradients(
            model, feats, split.train_queries, split.train_labels, true,
            mix_seed(dropout_seed, epoch), &grads);
        if (!std::isfinite(train_loss))
            throw NumericalError("fold " + std::to_string(fold_idx) +
                                 ": non-finite training loss at epoch " +
                                 std::to_string(epoch));
        adam_step(state, model, grads);
        const double val_loss =
            loss_and_gradients(model, feats, split.val_queries, split.val_labels,
                               false, 0, nullptr);
        if (!std::isfinite(val_loss))
            throw NumericalError("fold " + std::to_string(fold_idx) +
                                 ": non-finite validation loss at epoch " +
                                 std::to_string(epoch));
        res.loss_curve.push_back({train_loss, val_loss});
        res.last_epoch = epoch;
        if (val_loss < res.best_val_loss) {
            res.best_val_loss = val_loss;
            res.best_epoch = epoch;
            res.best_params = snapshot_params(model);
        }
        if (epoch - res.best_epoch >= cfg.patience) break;
    }

    restore_params(model, res.best_params);
    const Matrix probs =
        model_forward(model, feats, split.test_queries, false, 0);
    res.metrics = evaluate(probs, split.test_labels);
    return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& raw) {
    const ExperimentConfig cfg = resolve_defaults(raw);
    validate_config(cfg);

    DirectedGraph g;
    NodeLabels labels;
    if (cfg.use_dsbm) {
        const DsbmConfig dc = make_dsbm_config(
            cfg.dsbm_n, cfg.dsbm_communities, cfg.dsbm_alpha_intra,
            cfg.dsbm_alpha_inter, cfg.dsbm_beta, cfg.dsbm_weight_lo,
            cfg.dsbm_weight_hi);
        DsbmSample sample = generate_dsbm(dc, mix_seed(cfg.seed, kStreamDsbm));
        g = std::move(sample.graph);
        labels = std::move(sample.labels);
    } else {
        EdgeListOptions opts;
        opts.merge_parallel = cfg.merge_parallel;
        std::optional<std::string> lp;
        if (!cfg.labels_path.empty()) lp = cfg.labels_path;
        Dataset ds = load_dataset(cfg.edges_path, lp, opts);
        g = std::move(ds.graph);
        labels = std::move(ds.labels);
    }
    switch (cfg.sign_flip_mode) {
        case SignFlipMode::none: break;
        case SignFlipMode::edge:
            g = flip_edge_signs(g, cfg.sign_flip_frac, mix_seed(cfg.seed, kStreamFlip));
            break;
        case SignFlipMode::target_node:
            g = flip_signs_into_marked_nodes(g, cfg.sign_flip_frac,
                                             mix_seed(cfg.seed, kStreamFlip));
            break;
    }
    if (cfg.flow == FlowPolicy::on) g = flow_preprocess(g);

    int label_arity = 2;
    std::vector<TaskSplit> splits;
    switch (cfg.task) {
        case TaskKind::node: {
            if (labels.labels.empty())
                throw ValidationError("experiment: node task needs labels");
            label_arity = num_classes(labels);
            for (int f = 0; f < cfg.folds; ++f)
                splits.push_back(make_node_task(
                    g, labels, mix_seed(cfg.seed, kStreamSplit + f)));
            break;
        }
        case TaskKind::link_sign:
            splits = make_sign_task(g, cfg.folds, cfg.seed, cfg.val_frac);
            break;
        case TaskKind::link_exist:
        case TaskKind::link_direction:
            splits = make_link_task(g, cfg.task, cfg.folds, cfg.seed,
                                    cfg.test_frac, cfg.val_frac);
            break;
    }

    ExperimentResult out;
    out.resolved = cfg;
    out.label_arity = label_arity;
    out.folds.resize(splits.size());

    const int workers =
        std::min<int>(cfg.parallel_folds, static_cast<int>(splits.size()));
    if (workers <= 1) {
        for (std::size_t f = 0; f < splits.size(); ++f)
            out.folds[f] = train_fold(cfg, splits[f], static_cast<int>(f),
                                      label_arity);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(splits.size());
        auto worker = [&] {
            for (;;) {
                const std::size_t f = next.fetch_add(1);
                if (f >= splits.size()) return;
                try {
                    out.folds[f] = train_fold(cfg, splits[f],
                                              static_cast<int>(f), label_arity);
                } catch (...) {
                    errors[f] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<Metrics> per_fold;
    per_fold.reserve(out.folds.size());
    for (const FoldResult& f : out.folds) per_fold.push_back(f.metrics);
    out.report = aggregate(per_fold);
    return out;
}

}  // namespace sigmanet
