#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sigmanet/dsbm.hpp"
#include "sigmanet/graph.hpp"
#include "sigmanet/nn.hpp"
#include "sigmanet/types.hpp"

namespace sigmanet {

enum class TaskKind { node, link_exist, link_direction, link_sign };

const char* to_string(TaskKind k);
TaskKind task_from_string(const std::string& s);

// One fold: query sets with labels plus the graph the Laplacian may see.
// For link tasks no val/test query edge appears among the training edges.
struct TaskSplit {
    TaskKind kind = TaskKind::node;
    QuerySet train_queries, val_queries, test_queries;
    std::vector<int> train_labels, val_labels, test_labels;
    DirectedGraph train_graph;
};

// n x 2 features: column 0 weighted in-degree, column 1 weighted out-degree.
// use_abs sums absolute weights (used by the sign task).
Matrix build_degree_features(const DirectedGraph& g, bool use_abs);

// k folds partitioning the non-tree edges into test sets; one shared spanning
// tree stays in training everywhere. A val_frac slice of each fold's training
// edges (never tree edges) is held out for early stopping. Labels: weight > 0.
std::vector<TaskSplit> make_sign_task(const DirectedGraph& g, int k,
                                      std::uint64_t seed, double val_frac = 0.05);

// k independent spanning-tree splits with test_frac/val_frac held out.
// link_exist: held-out edges are positives; an equal number of ordered pairs
// non-adjacent in both orientations is sampled per part as negatives.
// link_direction: each held-out edge (u,v) emits (u,v) label 1, (v,u) label 0.
std::vector<TaskSplit> make_link_task(const DirectedGraph& g, TaskKind kind, int k,
                                      std::uint64_t seed, double test_frac = 0.15,
                                      double val_frac = 0.05);

// Stratified 60/20/20 node split; every class needs at least 5 nodes. The
// full graph stays visible to the Laplacian.
TaskSplit make_node_task(const DirectedGraph& g, const NodeLabels& labels,
                         std::uint64_t seed);

// NaN marks metrics that are undefined for the given label arity (binary F1
// and AUC when there are more than two classes).
struct Metrics {
    double accuracy = 0.0;
    double micro_f1 = 0.0;
    double binary_f1 = 0.0;
    double macro_f1 = 0.0;
    double auc = 0.0;
};

inline constexpr std::array<std::pair<const char*, double Metrics::*>, 5>
    kMetricFields = {{{"accuracy", &Metrics::accuracy},
                      {"micro_f1", &Metrics::micro_f1},
                      {"binary_f1", &Metrics::binary_f1},
                      {"macro_f1", &Metrics::macro_f1},
                      {"auc", &Metrics::auc}}};

// Argmax predictions against integer labels. AUC ranks the class-1
// probability (binary only) and throws when one class is absent.
Metrics evaluate(const Matrix& probs, const std::vector<int>& labels);

struct MetricsReport {
    std::vector<Metrics> folds;
    Metrics mean;
    Metrics stddev;  // population std over folds
};

MetricsReport aggregate(const std::vector<Metrics>& folds);

enum class OperatorKind { sign_magnetic, magnetic };
enum class FlowPolicy { task_default, on, off };
enum class SignFlipMode { none, edge, target_node };

struct ExperimentConfig {
    TaskKind task = TaskKind::node;

    // Dataset: either CSV paths or a DSBM sample.
    std::string edges_path;
    std::string labels_path;
    bool merge_parallel = false;
    bool use_dsbm = false;
    int dsbm_n = 500;
    int dsbm_communities = 5;
    double dsbm_alpha_intra = 0.1;
    double dsbm_alpha_inter = 0.1;
    double dsbm_beta = 0.2;  // P(edge points low -> high community)
    long dsbm_weight_lo = 2;
    long dsbm_weight_hi = 1000;
    SignFlipMode sign_flip_mode = SignFlipMode::none;
    double sign_flip_frac = 0.15;

    int folds = 0;           // 0: task default (sign 5, others 10)
    double test_frac = -1.0; // <0: task default
    double val_frac = -1.0;

    int f1 = 16;
    int f2 = 16;
    double lr = 1e-3;
    double weight_decay = 5e-4;
    double dropout = 0.5;
    int max_epochs = 3000;
    int patience = 500;

    OperatorKind op = OperatorKind::sign_magnetic;
    double q = 0.25;
    FlowPolicy flow = FlowPolicy::task_default;  // resolves on except link_sign

    std::uint64_t seed = 1;
    int parallel_folds = 1;
};

// Fills task-dependent defaults (folds, fractions, flow policy) so two runs
// of the same resolved config are byte-identical.
ExperimentConfig resolve_defaults(const ExperimentConfig& cfg);

struct FoldResult {
    Metrics metrics;
    std::vector<std::pair<double, double>> loss_curve;  // (train, val) per epoch
    ParamSnapshot best_params;
    double best_val_loss = 0.0;
    int best_epoch = 0;
    int last_epoch = 0;
    double dropout_p = 0.5;
    int concat_width = 1;
};

struct ExperimentResult {
    ExperimentConfig resolved;
    std::vector<FoldResult> folds;
    MetricsReport report;
    int label_arity = 0;
};

// Full pipeline: dataset, optional flow preprocessing, per-fold training with
// Adam + early stopping, evaluation with the best-validation parameters.
// parallel_folds > 1 trains folds concurrently without changing any result.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace sigmanet
