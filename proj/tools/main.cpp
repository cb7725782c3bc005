#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sigmanet/cli.hpp"
#include "sigmanet/config.hpp"

namespace sm = sigmanet;

int main(int argc, char** argv) {
    CLI::App app{"spectral graph toolkit for signed directed graphs"};
    app.require_subcommand(1);

    // laplacian: edge list in, operator dumps out
    sm::LaplacianArgs lap;
    std::string lap_op = "sigma";
    auto* laplacian = app.add_subcommand(
        "laplacian", "build the Laplacian of an edge-list CSV and dump H and L");
    laplacian->add_option("--input", lap.input, "edge-list CSV")->required();
    laplacian->add_flag("--merge-parallel", lap.merge_parallel,
                        "sum repeated (src,dst) rows instead of rejecting them");
    laplacian->add_option("--operator", lap_op, "sigma | q")
        ->check(CLI::IsMember({"sigma", "q"}));
    laplacian->add_option("--q", lap.q, "phase parameter for the q operator");
    laplacian->add_flag("--normalized", lap.normalized,
                        "emit the degree-normalized Laplacian");
    laplacian->add_option("--out", lap.out_dir, "output directory")->required();

    // verify: invariant battery over random or given graphs
    sm::VerifyArgs ver;
    auto* verify = app.add_subcommand(
        "verify", "check operator invariants on random graphs, a CSV, or a dump");
    verify->add_option("--input", ver.input, "edge-list CSV to check");
    verify->add_option("--matrix", ver.matrix,
                       "matrix dump to check for hermiticity and PSD");
    verify->add_option("--random-n", ver.random_n, "max node count of random graphs");
    verify->add_option("--random-graphs", ver.random_graphs,
                       "number of random graphs");
    verify->add_option("--seed", ver.seed, "random graph seed");
    verify->add_flag("--demo-signflip", ver.demo_signflip,
                     "print the single-edge operator comparison table");

    // generate: synthetic community digraph
    sm::GenerateArgs gen;
    std::string gen_flip = "none";
    auto* generate = app.add_subcommand(
        "generate", "sample a directed stochastic block model dataset");
    generate->add_option("--n", gen.n, "node count");
    generate->add_option("--communities", gen.communities, "community count");
    generate->add_option("--alpha-intra", gen.alpha_intra,
                         "edge probability inside a community");
    generate->add_option("--alpha-inter", gen.alpha_inter,
                         "edge probability across communities");
    generate->add_option("--beta", gen.beta,
                         "probability an inter-community edge points low -> high");
    generate->add_option("--weight-lo", gen.weight_lo, "min edge weight");
    generate->add_option("--weight-hi", gen.weight_hi, "max edge weight");
    generate->add_option("--flip-mode", gen_flip, "none | edge | target-node")
        ->check(CLI::IsMember({"none", "edge", "target-node"}));
    generate->add_option("--flip-frac", gen.flip_frac, "fraction flipped negative");
    generate->add_option("--seed", gen.seed, "sampling seed");
    generate->add_option("--out", gen.out_dir, "output directory")->required();

    // train: full experiment pipeline
    sm::TrainRunSettings tr;
    std::string tr_config, tr_task = "node", tr_op = "sigma", tr_flow = "auto",
                tr_flip = "none";
    auto* train = app.add_subcommand(
        "train", "train and evaluate over cross-validation folds");
    train->add_option("--config", tr_config,
                      "run config file; other flags override nothing when set");
    train->add_option("--task", tr_task,
                      "node | link-exist | link-direction | link-sign");
    train->add_option("--edges", tr.exp.edges_path, "edge-list CSV");
    train->add_option("--labels", tr.exp.labels_path, "node label CSV");
    train->add_flag("--merge-parallel", tr.exp.merge_parallel,
                    "sum repeated (src,dst) rows");
    train->add_flag("--dsbm", tr.exp.use_dsbm, "sample the dataset instead");
    train->add_option("--dsbm-n", tr.exp.dsbm_n, "DSBM node count");
    train->add_option("--communities", tr.exp.dsbm_communities, "DSBM communities");
    train->add_option("--alpha-intra", tr.exp.dsbm_alpha_intra, "DSBM intra prob");
    train->add_option("--alpha-inter", tr.exp.dsbm_alpha_inter, "DSBM inter prob");
    train->add_option("--beta", tr.exp.dsbm_beta, "DSBM direction prob");
    train->add_option("--weight-lo", tr.exp.dsbm_weight_lo, "DSBM min weight");
    train->add_option("--weight-hi", tr.exp.dsbm_weight_hi, "DSBM max weight");
    train->add_option("--flip-mode", tr_flip, "none | edge | target-node")
        ->check(CLI::IsMember({"none", "edge", "target-node"}));
    train->add_option("--flip-frac", tr.exp.sign_flip_frac, "fraction flipped");
    train->add_option("--folds", tr.exp.folds, "fold count (0: task default)");
    train->add_option("--test-frac", tr.exp.test_frac, "test fraction");
    train->add_option("--val-frac", tr.exp.val_frac, "validation fraction");
    train->add_option("--f1", tr.exp.f1, "first layer width");
    train->add_option("--f2", tr.exp.f2, "second layer width");
    train->add_option("--lr", tr.exp.lr, "learning rate");
    train->add_option("--weight-decay", tr.exp.weight_decay, "decoupled decay");
    train->add_option("--dropout", tr.exp.dropout, "dropout probability");
    train->add_option("--max-epochs", tr.exp.max_epochs, "epoch cap");
    train->add_option("--patience", tr.exp.patience, "early stopping patience");
    train->add_option("--operator", tr_op, "sigma | q")
        ->check(CLI::IsMember({"sigma", "q"}));
    train->add_option("--q", tr.exp.q, "phase parameter for the q operator");
    train->add_option("--flow", tr_flow, "auto | on | off")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    train->add_option("--seed", tr.exp.seed, "master seed");
    train->add_option("--parallel-folds", tr.exp.parallel_folds,
                      "fold-level worker threads");
    auto* tr_out = train->add_option("--out", tr.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (laplacian->parsed()) {
            lap.op = sm::operator_from_string(lap_op);
            return sm::cmd_laplacian(lap, std::cout);
        }
        if (verify->parsed()) return sm::cmd_verify(ver, std::cout);
        if (generate->parsed()) {
            gen.flip_mode = sm::sign_flip_from_string(gen_flip);
            return sm::cmd_generate(gen, std::cout);
        }
        if (train->parsed()) {
            if (!tr_config.empty()) {
                const std::string out_override = tr.out_dir;
                tr = sm::read_run_config(tr_config);
                if (tr_out->count() > 0) tr.out_dir = out_override;
            } else {
                if (tr_out->count() == 0)
                    throw sm::ValidationError(
                        "train: --out is required (or out_dir via --config)");
                tr.exp.task = sm::task_from_string(tr_task);
                tr.exp.op = sm::operator_from_string(tr_op);
                tr.exp.flow = sm::flow_from_string(tr_flow);
                tr.exp.sign_flip_mode = sm::sign_flip_from_string(tr_flip);
            }
            return sm::cmd_train(tr, std::cout);
        }
    } catch (const sm::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const sm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
