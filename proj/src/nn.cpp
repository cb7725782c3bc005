#include "sigmanet/nn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sigmanet/rng.hpp"

namespace sigmanet {

QuerySet QuerySet::nodes(const std::vector<int>& ids) {
    QuerySet q;
    q.edge_mode = false;
    q.items.reserve(ids.size());
    for (int id : ids) q.items.push_back({id, -1});
    return q;
}

QuerySet QuerySet::edges(const std::vector<std::array<int, 2>>& pairs) {
    QuerySet q;
    q.edge_mode = true;
    q.items = pairs;
    return q;
}

CMatrix complex_relu(const CMatrix& z) {
    CMatrix out = z;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < z.cols(); ++j)
            if (z(i, j).real() < 0.0) out(i, j) = Complex(0.0, 0.0);
    return out;
}

Matrix unwind(const CMatrix& z) {
    Matrix out(z.rows(), 2 * z.cols());
    out.leftCols(z.cols()) = z.real();
    out.rightCols(z.cols()) = z.imag();
    return out;
}

CMatrix conv_forward(const CMatrix& p, const CMatrix& x, const CMatrix& theta) {
    if (p.rows() != p.cols() || p.cols() != x.rows() || x.cols() != theta.rows())
        throw ValidationError("conv_forward: dimension mismatch");
    return complex_relu((p * x) * theta);
}

namespace {

void glorot_fill(Matrix& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rng.uniform_real(-limit, limit);
}

void glorot_fill(CMatrix& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double re = rng.uniform_real(-limit, limit);
            const double im = rng.uniform_real(-limit, limit);
            m(i, j) = Complex(re, im);
        }
}

struct ForwardCache {
    CMatrix xc, m1, s1, z1, m2, s2, z2;
    Matrix uh, mask, probs;  // uh: unwound features after dropout, n x 2f2
    Matrix logp;             // row-wise log-softmax of the logits
};

Matrix real_gate(const CMatrix& s) {
    Matrix g(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            g(i, j) = s(i, j).real() >= 0.0 ? 1.0 : 0.0;
    return g;
}

void forward_pass(const SigMaNetModel& m, const Matrix& x0, const QuerySet& queries,
                  bool train_mode, std::uint64_t rng_seed, ForwardCache& c) {
    const Eigen::Index n = m.propagation.rows();
    if (m.propagation.cols() != n)
        throw ValidationError("model: propagation matrix must be square");
    if (x0.rows() != n) throw ValidationError("model: feature row count != n");
    if (x0.cols() != m.theta1.rows())
        throw ValidationError("model: feature width != theta1 input dim");
    if (m.theta1.cols() != m.theta2.rows())
        throw ValidationError("model: theta1/theta2 dimension mismatch");
    const int expected_width =
        2 * static_cast<int>(m.theta2.cols()) * m.concat_width;
    if (m.head_w.rows() != expected_width)
        throw ValidationError("model: head width mismatch");
    if (queries.edge_mode != (m.concat_width == 2))
        throw ValidationError("model: query kind does not match head layout");
    if (queries.items.empty()) throw ValidationError("model: empty query set");
    for (const auto& it : queries.items) {
        if (it[0] < 0 || it[0] >= n ||
            (queries.edge_mode && (it[1] < 0 || it[1] >= n)))
            throw ValidationError("model: query id out of range");
    }

    c.xc = x0.cast<Complex>();
    c.m1.noalias() = m.propagation * c.xc;
    c.s1.noalias() = c.m1 * m.theta1;
    c.z1 = complex_relu(c.s1);
    c.m2.noalias() = m.propagation * c.z1;
    c.s2.noalias() = c.m2 * m.theta2;
    c.z2 = complex_relu(c.s2);
    c.uh = unwind(c.z2);

    // One dropout layer on the node features right before the linear head.
    if (train_mode && m.dropout_p > 0.0) {
        const double keep = 1.0 - m.dropout_p;
        if (keep <= 0.0) throw ValidationError("model: dropout rate must be < 1");
        Rng rng(rng_seed);
        c.mask.resize(c.uh.rows(), c.uh.cols());
        for (Eigen::Index r = 0; r < c.mask.rows(); ++r)
            for (Eigen::Index col = 0; col < c.mask.cols(); ++col)
                c.mask(r, col) = rng.real01() < m.dropout_p ? 0.0 : 1.0 / keep;
        c.uh = c.uh.cwiseProduct(c.mask);
    } else {
        c.mask.resize(0, 0);
    }

    // The head is linear in the (concatenated) node features, so project the
    // node matrix once and gather per query instead of materializing a
    // queries x concat matrix.
    const Eigen::Index rows = static_cast<Eigen::Index>(queries.items.size());
    const Eigen::Index half = c.uh.cols();
    Matrix logits(rows, m.head_w.cols());
    if (queries.edge_mode) {
        const Matrix src_part = c.uh * m.head_w.topRows(half);
        const Matrix dst_part = c.uh * m.head_w.bottomRows(half);
        for (Eigen::Index r = 0; r < rows; ++r)
            logits.row(r) = src_part.row(queries.items[r][0]) +
                            dst_part.row(queries.items[r][1]);
    } else {
        const Matrix node_part = c.uh * m.head_w;
        for (Eigen::Index r = 0; r < rows; ++r)
            logits.row(r) = node_part.row(queries.items[r][0]);
    }
    c.logp.resize(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
        c.logp.row(r) = logits.row(r).array() - lse;
    }
    c.probs = c.logp.array().exp();
}

}  // namespace

SigMaNetModel init_model(CMatrix propagation, int c, int f1, int f2, int d,
                         bool edge_task, double dropout_p, std::uint64_t seed) {
    if (c <= 0 || f1 <= 0 || f2 <= 0 || d <= 0)
        throw ValidationError("init_model: dimensions must be positive");
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw ValidationError("init_model: dropout must be in [0, 1)");
    SigMaNetModel m;
    m.propagation = std::move(propagation);
    m.dropout_p = dropout_p;
    m.concat_width = edge_task ? 2 : 1;
    m.theta1.resize(c, f1);
    m.theta2.resize(f1, f2);
    m.head_w.resize(2 * f2 * m.concat_width, d);
    Rng rng(seed);
    glorot_fill(m.theta1, rng);
    glorot_fill(m.theta2, rng);
    glorot_fill(m.head_w, rng);
    return m;
}

Matrix model_forward(const SigMaNetModel& m, const Matrix& x0, const QuerySet& queries,
                     bool train_mode, std::uint64_t rng_seed) {
    ForwardCache c;
    forward_pass(m, x0, queries, train_mode, rng_seed, c);
    return c.probs;
}

double loss_and_gradients(const SigMaNetModel& m, const Matrix& x0,
                          const QuerySet& queries, const std::vector<int>& labels,
                          bool train_mode, std::uint64_t rng_seed, Gradients* grads) {
    if (labels.size() != queries.items.size())
        throw ValidationError("loss: label count != query count");
    ForwardCache c;
    forward_pass(m, x0, queries, train_mode, rng_seed, c);
    const Eigen::Index rows = c.probs.rows(), d = c.probs.cols();
    double loss = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const int y = labels[r];
        if (y < 0 || y >= d) throw ValidationError("loss: label out of range");
        loss -= c.logp(r, y);
    }
    loss /= static_cast<double>(rows);
    if (!grads) return loss;

    // dL/dlogits for mean cross-entropy after softmax.
    Matrix dlogits = c.probs;
    for (Eigen::Index r = 0; r < rows; ++r) dlogits(r, labels[r]) -= 1.0;
    dlogits /= static_cast<double>(rows);

    // Scatter the logit gradients back to node space, then push through the
    // factorized head exactly as the forward pass computed it.
    const Eigen::Index half = c.uh.cols();
    Matrix du;
    if (queries.edge_mode) {
        Matrix src_acc = Matrix::Zero(c.uh.rows(), d);
        Matrix dst_acc = Matrix::Zero(c.uh.rows(), d);
        for (Eigen::Index r = 0; r < rows; ++r) {
            src_acc.row(queries.items[r][0]) += dlogits.row(r);
            dst_acc.row(queries.items[r][1]) += dlogits.row(r);
        }
        grads->head_w.resize(m.head_w.rows(), m.head_w.cols());
        grads->head_w.topRows(half).noalias() = c.uh.transpose() * src_acc;
        grads->head_w.bottomRows(half).noalias() = c.uh.transpose() * dst_acc;
        du.noalias() = src_acc * m.head_w.topRows(half).transpose() +
                       dst_acc * m.head_w.bottomRows(half).transpose();
    } else {
        Matrix node_acc = Matrix::Zero(c.uh.rows(), d);
        for (Eigen::Index r = 0; r < rows; ++r)
            node_acc.row(queries.items[r][0]) += dlogits.row(r);
        grads->head_w.noalias() = c.uh.transpose() * node_acc;
        du.noalias() = node_acc * m.head_w.transpose();
    }
    if (c.mask.size() > 0) du = du.cwiseProduct(c.mask);

    // Complex gradient carriers: dL/dRe + i * dL/dIm. For the linear complex
    // maps S = B * Theta this propagates as G_Theta = B^H G_S, G_B = G_S Theta^H.
    const Eigen::Index f2 = c.z2.cols();
    CMatrix g_z2(c.z2.rows(), f2);
    g_z2.real() = du.leftCols(f2);
    g_z2.imag() = du.rightCols(f2);

    const CMatrix g_s2 = g_z2.cwiseProduct(real_gate(c.s2).cast<Complex>());
    grads->theta2.noalias() = c.m2.adjoint() * g_s2;
    CMatrix g_m2 = g_s2 * m.theta2.adjoint();
    CMatrix g_z1 = m.propagation.adjoint() * g_m2;
    const CMatrix g_s1 = g_z1.cwiseProduct(real_gate(c.s1).cast<Complex>());
    grads->theta1.noalias() = c.m1.adjoint() * g_s1;
    return loss;
}

TrainState make_train_state(const SigMaNetModel& m, double lr, double weight_decay) {
    TrainState s;
    s.lr = lr;
    s.weight_decay = weight_decay;
    auto zeros = [](Eigen::Index r, Eigen::Index c) { return Matrix::Zero(r, c); };
    s.m_t1_re = zeros(m.theta1.rows(), m.theta1.cols());
    s.v_t1_re = s.m_t1_re;
    s.m_t1_im = s.m_t1_re;
    s.v_t1_im = s.m_t1_re;
    s.m_t2_re = zeros(m.theta2.rows(), m.theta2.cols());
    s.v_t2_re = s.m_t2_re;
    s.m_t2_im = s.m_t2_re;
    s.v_t2_im = s.m_t2_re;
    s.m_head = zeros(m.head_w.rows(), m.head_w.cols());
    s.v_head = s.m_head;
    return s;
}

namespace {

void adam_update(Matrix& p, const Matrix& g, Matrix& m, Matrix& v,
                 const TrainState& s, double bc1, double bc2) {
    m = s.beta1 * m + (1.0 - s.beta1) * g;
    v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
    const Matrix mhat = m / bc1;
    const Matrix vhat = v / bc2;
    // Decoupled weight decay: the decay term bypasses the moment estimates.
    p = p - s.lr * (mhat.array() / (vhat.array().sqrt() + s.eps)).matrix()
          - (s.lr * s.weight_decay) * p;
}

}  // namespace

void adam_step(TrainState& s, SigMaNetModel& m, const Gradients& g) {
    if (g.theta1.rows() != m.theta1.rows() || g.theta1.cols() != m.theta1.cols() ||
        g.theta2.rows() != m.theta2.rows() || g.theta2.cols() != m.theta2.cols() ||
        g.head_w.rows() != m.head_w.rows() || g.head_w.cols() != m.head_w.cols())
        throw ValidationError("adam_step: gradient shape mismatch");
    s.t += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));

    Matrix t1_re = m.theta1.real(), t1_im = m.theta1.imag();
    adam_update(t1_re, g.theta1.real(), s.m_t1_re, s.v_t1_re, s, bc1, bc2);
    adam_update(t1_im, g.theta1.imag(), s.m_t1_im, s.v_t1_im, s, bc1, bc2);
    m.theta1.real() = t1_re;
    m.theta1.imag() = t1_im;

    Matrix t2_re = m.theta2.real(), t2_im = m.theta2.imag();
    adam_update(t2_re, g.theta2.real(), s.m_t2_re, s.v_t2_re, s, bc1, bc2);
    adam_update(t2_im, g.theta2.imag(), s.m_t2_im, s.v_t2_im, s, bc1, bc2);
    m.theta2.real() = t2_re;
    m.theta2.imag() = t2_im;

    adam_update(m.head_w, g.head_w, s.m_head, s.v_head, s, bc1, bc2);
}

ParamSnapshot snapshot_params(const SigMaNetModel& m) {
    return {m.theta1, m.theta2, m.head_w};
}

void restore_params(SigMaNetModel& m, const ParamSnapshot& s) {
    m.theta1 = s.theta1;
    m.theta2 = s.theta2;
    m.head_w = s.head_w;
}

namespace {

constexpr const char* kCheckpointMagic = "sigmanet-checkpoint";
constexpr int kCheckpointVersion = 1;

void write_hex(std::ofstream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    out << buf;
}

void write_cmatrix(std::ofstream& out, const char* name, const CMatrix& m) {
    out << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            write_hex(out, m(i, j).real());
            out << " ";
            write_hex(out, m(i, j).imag());
            out << "\n";
        }
}

void write_matrix(std::ofstream& out, const char* name, const Matrix& m) {
    out << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            write_hex(out, m(i, j));
            out << "\n";
        }
}

double parse_hex(std::istream& in, const std::string& path) {
    std::string tok;
    if (!(in >> tok)) throw ValidationError("checkpoint: truncated file: " + path);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
        throw ValidationError("checkpoint: bad value in " + path);
    return v;
}

void read_header(std::istream& in, const std::string& name, Eigen::Index& r,
                 Eigen::Index& c, const std::string& path) {
    std::string tok;
    if (!(in >> tok) || tok != name)
        throw ValidationError("checkpoint: expected section '" + name + "' in " + path);
    long long rr, cc;
    if (!(in >> rr >> cc) || rr <= 0 || cc <= 0)
        throw ValidationError("checkpoint: bad dims for '" + name + "' in " + path);
    r = rr;
    c = cc;
}

}  // namespace

void save_checkpoint(const std::string& path, const SigMaNetModel& m,
                     std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write checkpoint: " + path);
    out << kCheckpointMagic << " " << kCheckpointVersion << "\n";
    out << "seed " << seed << "\n";
    out << "dropout ";
    write_hex(out, m.dropout_p);
    out << "\n";
    out << "concat_width " << m.concat_width << "\n";
    write_cmatrix(out, "theta1", m.theta1);
    write_cmatrix(out, "theta2", m.theta2);
    write_matrix(out, "head_w", m.head_w);
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kCheckpointMagic)
        throw ValidationError("checkpoint: unrecognized format: " + path);
    if (version != kCheckpointVersion)
        throw ValidationError("checkpoint: unsupported version " +
                              std::to_string(version) + " in " + path);
    CheckpointData d;
    std::string tok;
    if (!(in >> tok) || tok != "seed" || !(in >> d.seed))
        throw ValidationError("checkpoint: bad seed line in " + path);
    if (!(in >> tok) || tok != "dropout")
        throw ValidationError("checkpoint: bad dropout line in " + path);
    d.dropout_p = parse_hex(in, path);
    if (!(in >> tok) || tok != "concat_width" || !(in >> d.concat_width))
        throw ValidationError("checkpoint: bad concat_width line in " + path);

    Eigen::Index r, c;
    read_header(in, "theta1", r, c, path);
    d.theta1.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double re = parse_hex(in, path);
            const double im = parse_hex(in, path);
            d.theta1(i, j) = Complex(re, im);
        }
    read_header(in, "theta2", r, c, path);
    d.theta2.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double re = parse_hex(in, path);
            const double im = parse_hex(in, path);
            d.theta2(i, j) = Complex(re, im);
        }
    read_header(in, "head_w", r, c, path);
    d.head_w.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) d.head_w(i, j) = parse_hex(in, path);
    return d;
}

}  // namespace sigmanet
