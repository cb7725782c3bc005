#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sigmanet/types.hpp"

namespace sigmanet {

// Queries the model answers: node ids for node classification, ordered pairs
// for edge-level tasks.
struct QuerySet {
    bool edge_mode = false;
    std::vector<std::array<int, 2>> items;  // node mode uses {id, -1}

    static QuerySet nodes(const std::vector<int>& ids);
    static QuerySet edges(const std::vector<std::array<int, 2>>& pairs);
    std::size_t size() const { return items.size(); }
};

// Two spectral convolution layers sharing one fixed propagation matrix,
// followed by a real linear head on the unwound features. Complex parameters
// are trained as independent real/imaginary components.
struct SigMaNetModel {
    CMatrix propagation;  // n x n, Hermitian, fixed during training
    CMatrix theta1;       // c x f1
    CMatrix theta2;       // f1 x f2
    Matrix head_w;        // (2 * f2 * concat_width) x d
    double dropout_p = 0.5;
    int concat_width = 1;  // 1 for node queries, 2 for edge queries
};

// z if Re(z) >= 0, else 0; the boundary Re(z) == 0 is kept.
CMatrix complex_relu(const CMatrix& z);

// [Re(Z) | Im(Z)]: n x f complex to n x 2f real.
Matrix unwind(const CMatrix& z);

// One layer: complex_relu(P * X * theta).
CMatrix conv_forward(const CMatrix& p, const CMatrix& x, const CMatrix& theta);

// Glorot-uniform init applied per real component, seeded.
SigMaNetModel init_model(CMatrix propagation, int c, int f1, int f2, int d,
                         bool edge_task, double dropout_p, std::uint64_t seed);

// Per-query class probabilities (rows sum to 1). train_mode enables inverted
// dropout on the unwound node features right before the linear head; the mask
// is fully determined by rng_seed.
Matrix model_forward(const SigMaNetModel& m, const Matrix& x0, const QuerySet& queries,
                     bool train_mode, std::uint64_t rng_seed);

struct Gradients {
    CMatrix theta1;  // holds dL/dRe + i * dL/dIm
    CMatrix theta2;
    Matrix head_w;
};

// Mean cross-entropy over the queries; fills grads (reverse mode) when
// non-null. The same rng_seed reproduces the same dropout mask, so gradients
// are checkable against finite differences of this function.
double loss_and_gradients(const SigMaNetModel& m, const Matrix& x0,
                          const QuerySet& queries, const std::vector<int>& labels,
                          bool train_mode, std::uint64_t rng_seed,
                          Gradients* grads);

// Adam with decoupled weight decay; real and imaginary components of complex
// parameters keep independent moment estimates.
struct TrainState {
    double lr = 1e-3;
    double weight_decay = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long t = 0;
    Matrix m_t1_re, v_t1_re, m_t1_im, v_t1_im;
    Matrix m_t2_re, v_t2_re, m_t2_im, v_t2_im;
    Matrix m_head, v_head;
};

TrainState make_train_state(const SigMaNetModel& m, double lr, double weight_decay);
void adam_step(TrainState& state, SigMaNetModel& m, const Gradients& grads);

// Parameter snapshot used for best-validation restore.
struct ParamSnapshot {
    CMatrix theta1, theta2;
    Matrix head_w;
};
ParamSnapshot snapshot_params(const SigMaNetModel& m);
void restore_params(SigMaNetModel& m, const ParamSnapshot& s);

// Text checkpoint of all parameters + dims + seed; hexfloat values, so a
// save/load round trip is bit-exact. The propagation matrix is not stored
// (it is rebuilt from the graph).
struct CheckpointData {
    CMatrix theta1, theta2;
    Matrix head_w;
    double dropout_p = 0.5;
    int concat_width = 1;
    std::uint64_t seed = 0;
};

void save_checkpoint(const std::string& path, const SigMaNetModel& m,
                     std::uint64_t seed);
CheckpointData load_checkpoint(const std::string& path);

}  // namespace sigmanet
