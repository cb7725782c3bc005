#pragma once

#include <string>

#include "sigmanet/tasks.hpp"

namespace sigmanet {

const char* to_string(OperatorKind op);
const char* to_string(FlowPolicy f);
const char* to_string(SignFlipMode m);
OperatorKind operator_from_string(const std::string& s);
FlowPolicy flow_from_string(const std::string& s);
SignFlipMode sign_flip_from_string(const std::string& s);

struct TrainRunSettings {
    ExperimentConfig exp;
    std::string out_dir = ".";
};

// Flat key = value file, one pair per line, '#' comments. Every key is
// written explicitly (resolved defaults included) so a rerun from the emitted
// file reproduces the run byte for byte.
void write_run_config(const std::string& path, const TrainRunSettings& settings);
TrainRunSettings read_run_config(const std::string& path);

}  // namespace sigmanet
