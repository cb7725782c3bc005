#include "sigmanet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <vector>

#include "sigmanet/laplacian.hpp"
#include "sigmanet/rng.hpp"
#include "sigmanet/spectral.hpp"

namespace sigmanet {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + dir);
}

}  // namespace

int cmd_laplacian(const LaplacianArgs& args, std::ostream& out) {
    EdgeListOptions opts;
    opts.merge_parallel = args.merge_parallel;
    LoadedGraph lg = from_edge_list(args.input, opts);
    const Matrix a = adjacency(lg.graph);

    CMatrix h, l;
    if (args.op == OperatorKind::sign_magnetic) {
        h = sign_magnetic_H(a);
        l = sign_magnetic_laplacian(a, args.normalized);
    } else {
        h = magnetic_H(a, args.q);
        l = magnetic_laplacian(a, args.q, args.normalized);
    }

    ensure_dir(args.out_dir);
    const std::string h_path = (fs::path(args.out_dir) / "H.txt").string();
    const std::string l_path = (fs::path(args.out_dir) / "L.txt").string();
    const std::string map_path = (fs::path(args.out_dir) / "id_map.csv").string();
    write_matrix_dump(h_path, h);
    write_matrix_dump(l_path, l);
    save_id_map(map_path, lg.id_map);
    out << "nodes " << lg.graph.n << ", edges " << lg.graph.edges.size() << "\n";
    out << "wrote " << h_path << "\n";
    out << "wrote " << l_path << "\n";
    out << "wrote " << map_path << "\n";
    return 0;
}

namespace {

struct Check {
    std::string name;
    double tol = 0.0;
    double worst = 0.0;

    void feed(double residual) { worst = std::max(worst, residual); }
    bool pass() const { return worst <= tol; }
};

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

double hermitian_asymmetry(const CMatrix& m) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    return worst;
}

void print_check(std::ostream& out, const Check& c) {
    out << (c.pass() ? "[PASS] " : "[FAIL] ") << c.name << ": worst residual "
        << fmt(c.worst) << " (tol " << fmt(c.tol) << ")\n";
}

void signflip_table(std::ostream& out) {
    out << "single directed edge (0 -> 1), entry (0,1) of each operator:\n";
    out << "  scale      quarter-phase re/im        sign-magnetic re/im\n";
    for (double scale : {0.8, 2.0, 5.0, 36.0}) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 1) = scale;
        const Complex hq = magnetic_H(a, 0.25)(0, 1);
        const Complex hs = sign_magnetic_H(a)(0, 1);
        char line[160];
        std::snprintf(line, sizeof line, "  %6.1f   %10.4f %10.4f   %10.4f %10.4f\n",
                      scale, hq.real(), hq.imag(), hs.real(), hs.imag());
        out << line;
    }
    out << "the sign-magnetic imaginary part stays positive at every scale;\n"
           "the quarter-phase operator drifts through -1, +2.5i, +18.\n";
}

}  // namespace

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
    if (args.demo_signflip) signflip_table(out);

    if (!args.matrix.empty()) {
        const CMatrix m = read_matrix_dump(args.matrix);
        const HermitianCheckReport rep = verify_hermitian_psd(m, 1e-10);
        Check herm{"matrix dump hermiticity", 1e-10, rep.max_asymmetry};
        Check psd{"matrix dump positive semidefiniteness", 1e-8,
                  std::max(0.0, -rep.min_eigenvalue)};
        print_check(out, herm);
        print_check(out, psd);
        return herm.pass() && psd.pass() ? 0 : 2;
    }

    std::vector<Matrix> weighted, binary, digonfree;
    if (!args.input.empty()) {
        LoadedGraph lg = from_edge_list(args.input);
        const Matrix a = adjacency(lg.graph);
        weighted.push_back(a);
        Matrix bin = a.unaryExpr([](double w) { return w != 0.0 ? 1.0 : 0.0; });
        binary.push_back(bin);
        bool digon = false;
        for (const Edge& e : lg.graph.edges)
            for (const Edge& f : lg.graph.edges)
                if (e.src == f.dst && e.dst == f.src) digon = true;
        if (!digon) digonfree.push_back(a);
    } else {
        if (args.random_n < 2 || args.random_graphs < 1)
            throw ValidationError("verify: need --random-n >= 2 and --random-graphs >= 1");
        Rng rng(args.seed);
        for (int i = 0; i < args.random_graphs; ++i) {
            const int n = 2 + static_cast<int>(rng.index(args.random_n - 1));
            weighted.push_back(adjacency(random_digraph(n, 0.3, rng)));
            RandomDigraphOptions bopts;
            bopts.binary = true;
            binary.push_back(adjacency(random_digraph(n, 0.3, rng, bopts)));
            RandomDigraphOptions dopts;
            dopts.allow_digons = false;
            digonfree.push_back(adjacency(random_digraph(n, 0.3, rng, dopts)));
        }
    }

    Check herm{"sign-magnetic Laplacian hermiticity (bit-exact)", 0.0, 0.0};
    Check psd{"sign-magnetic Laplacian positive semidefiniteness", 1e-8, 0.0};
    Check psd_norm{"normalized operator positive semidefiniteness", 1e-8, 0.0};
    Check bound{"normalized spectrum upper bound 2", 1e-8, 0.0};
    Check homog{"scalar homogeneity L(alpha A) = alpha L(A)", 1e-10, 0.0};
    Check binq{"binary-graph match with quarter-phase operator", 1e-12, 0.0};
    Check reversal{"digon-free reversal invariance (bit-exact)", 0.0, 0.0};
    Check zerophase{"zero-phase degeneracy L(0) = D - As", 0.0, 0.0};
    Check table{"single-edge phase table", 1e-2, 0.0};

    for (const Matrix& a : weighted) {
        const CMatrix l = sign_magnetic_laplacian(a, false);
        const CMatrix ln = sign_magnetic_laplacian(a, true);
        herm.feed(hermitian_asymmetry(l));
        herm.feed(hermitian_asymmetry(ln));
        const auto el = hermitian_eig(l).eigenvalues;
        const auto en = hermitian_eig(ln).eigenvalues;
        psd.feed(std::max(0.0, -el.minCoeff()));
        psd_norm.feed(std::max(0.0, -en.minCoeff()));
        bound.feed(std::max(0.0, en.maxCoeff() - 2.0));
        for (double alpha : {0.5, 3.0, 10.0}) {
            const CMatrix scaled = sign_magnetic_laplacian(alpha * a, false);
            homog.feed(max_abs_diff(scaled, alpha * l));
        }
        zerophase.feed([&] {
            const CMatrix l0 = magnetic_laplacian(a, 0.0, false);
            const Matrix as = symmetrize(a);
            const Vector deg = as.rowwise().sum();
            CMatrix ref = (-as).cast<Complex>();
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                ref(i, i) = deg(i) - a(i, i);
            return max_abs_diff(l0, ref);
        }());
    }
    for (const Matrix& b : binary)
        binq.feed(max_abs_diff(sign_magnetic_laplacian(b, false),
                               magnetic_laplacian(b, 0.25, false)));
    {
        Rng rng(mix_seed(args.seed, 17));
        for (const Matrix& a : digonfree) {
            DirectedGraph g = from_adjacency(a);
            if (g.edges.empty()) continue;
            const std::size_t pick = rng.index(g.edges.size());
            DirectedGraph rev = g;
            std::swap(rev.edges[pick].src, rev.edges[pick].dst);
            rev.edges[pick].weight = -rev.edges[pick].weight;
            reversal.feed(max_abs_diff(sign_magnetic_laplacian(adjacency(g), false),
                                       sign_magnetic_laplacian(adjacency(rev), false)));
        }
    }
    for (double scale : {0.8, 2.0, 5.0, 36.0}) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 1) = scale;
        const Complex hq = magnetic_H(a, 0.25)(0, 1);
        const Complex hs = sign_magnetic_H(a)(0, 1);
        Complex expected;
        if (scale == 0.8) expected = Complex(0.4 * 0.31, 0.4 * 0.95);
        else if (scale == 2.0) expected = Complex(-1.0, 0.0);
        else if (scale == 5.0) expected = Complex(0.0, 2.5);
        else expected = Complex(18.0, 0.0);
        table.feed(std::abs(hq - expected));
        table.feed(hs.imag() > 0.0 ? 0.0 : 1.0);  // positivity must hold
    }

    bool all = true;
    for (const Check* c : {&herm, &psd, &psd_norm, &bound, &homog, &binq,
                           &reversal, &zerophase, &table}) {
        print_check(out, *c);
        all = all && c->pass();
    }
    out << (all ? "all checks passed\n" : "checks FAILED\n");
    return all ? 0 : 2;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
    const DsbmConfig cfg =
        make_dsbm_config(args.n, args.communities, args.alpha_intra,
                         args.alpha_inter, args.beta, args.weight_lo,
                         args.weight_hi);
    DsbmSample sample = generate_dsbm(cfg, args.seed);
    switch (args.flip_mode) {
        case SignFlipMode::none: break;
        case SignFlipMode::edge:
            sample.graph = flip_edge_signs(sample.graph, args.flip_frac,
                                           mix_seed(args.seed, kStreamFlip));
            break;
        case SignFlipMode::target_node:
            sample.graph = flip_signs_into_marked_nodes(
                sample.graph, args.flip_frac, mix_seed(args.seed, kStreamFlip));
            break;
    }

    ensure_dir(args.out_dir);
    std::vector<std::string> id_map(args.n);
    for (int i = 0; i < args.n; ++i) id_map[i] = std::to_string(i);
    const std::string edges = (fs::path(args.out_dir) / "edges.csv").string();
    const std::string labels = (fs::path(args.out_dir) / "labels.csv").string();
    const std::string params = (fs::path(args.out_dir) / "generate.toml").string();
    save_edge_list(edges, sample.graph);
    save_labels(labels, sample.labels, id_map);
    {
        std::ofstream p(params);
        if (!p) throw ValidationError("cannot write " + params);
        p << "n = " << args.n << "\n"
          << "communities = " << args.communities << "\n"
          << "alpha_intra = " << fmt(args.alpha_intra) << "\n"
          << "alpha_inter = " << fmt(args.alpha_inter) << "\n"
          << "beta = " << fmt(args.beta) << "\n"
          << "weight_lo = " << args.weight_lo << "\n"
          << "weight_hi = " << args.weight_hi << "\n"
          << "flip_mode = \"" << to_string(args.flip_mode) << "\"\n"
          << "flip_frac = " << fmt(args.flip_frac) << "\n"
          << "seed = " << args.seed << "\n";
    }
    out << "generated " << sample.graph.edges.size() << " edges over " << args.n
        << " nodes\n";
    out << "wrote " << edges << "\n";
    out << "wrote " << labels << "\n";
    out << "wrote " << params << "\n";
    return 0;
}

int cmd_train(const TrainRunSettings& settings, std::ostream& out) {
    TrainRunSettings resolved = settings;
    resolved.exp = resolve_defaults(settings.exp);
    ensure_dir(resolved.out_dir);

    const ExperimentResult res = run_experiment(resolved.exp);
    resolved.exp = res.resolved;

    const fs::path dir(resolved.out_dir);
    write_run_config((dir / "config.toml").string(), resolved);

    {
        std::ofstream m((dir / "metrics.csv").string());
        if (!m) throw ValidationError("cannot write metrics.csv");
        m << "fold,metric,value\n";
        for (std::size_t f = 0; f < res.folds.size(); ++f)
            for (const auto& [name, field] : kMetricFields)
                m << f << "," << name << "," << fmt(res.folds[f].metrics.*field)
                  << "\n";
        for (const auto& [name, field] : kMetricFields)
            m << "mean," << name << "," << fmt(res.report.mean.*field) << "\n";
        for (const auto& [name, field] : kMetricFields)
            m << "std," << name << "," << fmt(res.report.stddev.*field) << "\n";
    }
    {
        std::ofstream c((dir / "loss_curve.csv").string());
        if (!c) throw ValidationError("cannot write loss_curve.csv");
        c << "fold,epoch,train_loss,val_loss\n";
        for (std::size_t f = 0; f < res.folds.size(); ++f) {
            const auto& curve = res.folds[f].loss_curve;
            for (std::size_t e = 0; e < curve.size(); ++e)
                c << f << "," << (e + 1) << "," << fmt(curve[e].first) << ","
                  << fmt(curve[e].second) << "\n";
        }
    }
    for (std::size_t f = 0; f < res.folds.size(); ++f) {
        SigMaNetModel shell;
        shell.theta1 = res.folds[f].best_params.theta1;
        shell.theta2 = res.folds[f].best_params.theta2;
        shell.head_w = res.folds[f].best_params.head_w;
        shell.dropout_p = res.folds[f].dropout_p;
        shell.concat_width = res.folds[f].concat_width;
        save_checkpoint((dir / ("checkpoint_fold" + std::to_string(f) + ".txt")).string(),
                        shell, res.resolved.seed);
    }

    std::ostringstream summary;
    summary << "task " << to_string(res.resolved.task) << ", "
            << res.folds.size() << " folds, seed " << res.resolved.seed << "\n";
    for (std::size_t f = 0; f < res.folds.size(); ++f) {
        const FoldResult& fr = res.folds[f];
        summary << "fold " << f << ":";
        for (const auto& [name, field] : kMetricFields) {
            const double v = fr.metrics.*field;
            if (!std::isnan(v)) summary << " " << name << " " << fmt_short(v);
        }
        summary << "  (epochs " << fr.last_epoch << ", best " << fr.best_epoch
                << ")\n";
    }
    summary << "mean over folds:";
    for (const auto& [name, field] : kMetricFields) {
        const double v = res.report.mean.*field;
        if (!std::isnan(v))
            summary << " " << name << " " << fmt_short(v) << " +/- "
                    << fmt_short(res.report.stddev.*field);
    }
    summary << "\n";
    {
        std::ofstream s((dir / "summary.txt").string());
        if (!s) throw ValidationError("cannot write summary.txt");
        s << summary.str();
    }
    out << summary.str();
    out << "outputs in " << resolved.out_dir << "\n";
    return 0;
}

}  // namespace sigmanet
