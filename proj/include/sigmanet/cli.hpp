#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sigmanet/config.hpp"

namespace sigmanet {

// Subcommand bodies. Each returns a process exit code: 0 success, 1 invalid
// input or configuration, 2 violated numerical property. ValidationError and
// NumericalError thrown past these map to 1 and 2 in the binary's main().

struct LaplacianArgs {
    std::string input;
    bool merge_parallel = false;
    OperatorKind op = OperatorKind::sign_magnetic;
    double q = 0.25;
    bool normalized = false;
    std::string out_dir = ".";
};

int cmd_laplacian(const LaplacianArgs& args, std::ostream& out);

struct VerifyArgs {
    std::string input;       // edge list to check (optional)
    std::string matrix;      // matrix dump to check instead (optional)
    int random_n = 20;       // max node count in random mode
    int random_graphs = 50;  // graphs per check in random mode
    std::uint64_t seed = 7;
    bool demo_signflip = false;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out);

struct GenerateArgs {
    int n = 500;
    int communities = 5;
    double alpha_intra = 0.1;
    double alpha_inter = 0.1;
    double beta = 0.2;
    long weight_lo = 2;
    long weight_hi = 1000;
    SignFlipMode flip_mode = SignFlipMode::none;
    double flip_frac = 0.15;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

int cmd_generate(const GenerateArgs& args, std::ostream& out);

// Runs the experiment and writes config.toml, metrics.csv, loss_curve.csv,
// per-fold checkpoints, and summary.txt into out_dir.
int cmd_train(const TrainRunSettings& settings, std::ostream& out);

}  // namespace sigmanet
