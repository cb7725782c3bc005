#include "sigmanet/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

namespace sigmanet {

const char* to_string(OperatorKind op) {
    return op == OperatorKind::sign_magnetic ? "sigma" : "q";
}

const char* to_string(FlowPolicy f) {
    switch (f) {
        case FlowPolicy::task_default: return "auto";
        case FlowPolicy::on: return "on";
        case FlowPolicy::off: return "off";
    }
    return "?";
}

const char* to_string(SignFlipMode m) {
    switch (m) {
        case SignFlipMode::none: return "none";
        case SignFlipMode::edge: return "edge";
        case SignFlipMode::target_node: return "target-node";
    }
    return "?";
}

OperatorKind operator_from_string(const std::string& s) {
    if (s == "sigma") return OperatorKind::sign_magnetic;
    if (s == "q") return OperatorKind::magnetic;
    throw ValidationError("unknown operator: " + s + " (expected sigma or q)");
}

FlowPolicy flow_from_string(const std::string& s) {
    if (s == "auto") return FlowPolicy::task_default;
    if (s == "on") return FlowPolicy::on;
    if (s == "off") return FlowPolicy::off;
    throw ValidationError("unknown flow policy: " + s);
}

SignFlipMode sign_flip_from_string(const std::string& s) {
    if (s == "none") return SignFlipMode::none;
    if (s == "edge") return SignFlipMode::edge;
    if (s == "target-node") return SignFlipMode::target_node;
    throw ValidationError("unknown sign flip mode: " + s);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string unquote(const std::string& s, const std::string& key) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        throw ValidationError("config: value for '" + key + "' must be quoted");
    return s.substr(1, s.size() - 2);
}

double parse_num(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ValidationError("config: bad number for '" + key + "': " + s);
    return v;
}

long parse_long(const std::string& s, const std::string& key) {
    const double v = parse_num(s, key);
    if (v != std::floor(v))
        throw ValidationError("config: '" + key + "' must be an integer");
    return static_cast<long>(v);
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ValidationError("config: '" + key + "' must be true or false");
}

}  // namespace

void write_run_config(const std::string& path, const TrainRunSettings& st) {
    const ExperimentConfig& e = st.exp;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write config: " + path);
    out << "# training run configuration; rerunning from this file reproduces\n"
           "# the metrics file byte for byte\n";
    out << "task = " << quote(to_string(e.task)) << "\n";
    out << "edges = " << quote(e.edges_path) << "\n";
    out << "labels = " << quote(e.labels_path) << "\n";
    out << "merge_parallel = " << (e.merge_parallel ? "true" : "false") << "\n";
    out << "dsbm = " << (e.use_dsbm ? "true" : "false") << "\n";
    out << "dsbm_n = " << e.dsbm_n << "\n";
    out << "dsbm_communities = " << e.dsbm_communities << "\n";
    out << "dsbm_alpha_intra = " << fmt_double(e.dsbm_alpha_intra) << "\n";
    out << "dsbm_alpha_inter = " << fmt_double(e.dsbm_alpha_inter) << "\n";
    out << "dsbm_beta = " << fmt_double(e.dsbm_beta) << "\n";
    out << "dsbm_weight_lo = " << e.dsbm_weight_lo << "\n";
    out << "dsbm_weight_hi = " << e.dsbm_weight_hi << "\n";
    out << "sign_flip_mode = " << quote(to_string(e.sign_flip_mode)) << "\n";
    out << "sign_flip_frac = " << fmt_double(e.sign_flip_frac) << "\n";
    out << "folds = " << e.folds << "\n";
    out << "test_frac = " << fmt_double(e.test_frac) << "\n";
    out << "val_frac = " << fmt_double(e.val_frac) << "\n";
    out << "f1 = " << e.f1 << "\n";
    out << "f2 = " << e.f2 << "\n";
    out << "lr = " << fmt_double(e.lr) << "\n";
    out << "weight_decay = " << fmt_double(e.weight_decay) << "\n";
    out << "dropout = " << fmt_double(e.dropout) << "\n";
    out << "max_epochs = " << e.max_epochs << "\n";
    out << "patience = " << e.patience << "\n";
    out << "operator = " << quote(to_string(e.op)) << "\n";
    out << "q = " << fmt_double(e.q) << "\n";
    out << "flow_preprocess = " << quote(to_string(e.flow)) << "\n";
    out << "seed = " << e.seed << "\n";
    out << "parallel_folds = " << e.parallel_folds << "\n";
    out << "out_dir = " << quote(st.out_dir) << "\n";
}

TrainRunSettings read_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path);
    TrainRunSettings st;
    ExperimentConfig& e = st.exp;

    const std::map<std::string, std::function<void(const std::string&)>> handlers = {
        {"task", [&](const std::string& v) { e.task = task_from_string(unquote(v, "task")); }},
        {"edges", [&](const std::string& v) { e.edges_path = unquote(v, "edges"); }},
        {"labels", [&](const std::string& v) { e.labels_path = unquote(v, "labels"); }},
        {"merge_parallel", [&](const std::string& v) { e.merge_parallel = parse_bool(v, "merge_parallel"); }},
        {"dsbm", [&](const std::string& v) { e.use_dsbm = parse_bool(v, "dsbm"); }},
        {"dsbm_n", [&](const std::string& v) { e.dsbm_n = static_cast<int>(parse_long(v, "dsbm_n")); }},
        {"dsbm_communities", [&](const std::string& v) { e.dsbm_communities = static_cast<int>(parse_long(v, "dsbm_communities")); }},
        {"dsbm_alpha_intra", [&](const std::string& v) { e.dsbm_alpha_intra = parse_num(v, "dsbm_alpha_intra"); }},
        {"dsbm_alpha_inter", [&](const std::string& v) { e.dsbm_alpha_inter = parse_num(v, "dsbm_alpha_inter"); }},
        {"dsbm_beta", [&](const std::string& v) { e.dsbm_beta = parse_num(v, "dsbm_beta"); }},
        {"dsbm_weight_lo", [&](const std::string& v) { e.dsbm_weight_lo = parse_long(v, "dsbm_weight_lo"); }},
        {"dsbm_weight_hi", [&](const std::string& v) { e.dsbm_weight_hi = parse_long(v, "dsbm_weight_hi"); }},
        {"sign_flip_mode", [&](const std::string& v) { e.sign_flip_mode = sign_flip_from_string(unquote(v, "sign_flip_mode")); }},
        {"sign_flip_frac", [&](const std::string& v) { e.sign_flip_frac = parse_num(v, "sign_flip_frac"); }},
        {"folds", [&](const std::string& v) { e.folds = static_cast<int>(parse_long(v, "folds")); }},
        {"test_frac", [&](const std::string& v) { e.test_frac = parse_num(v, "test_frac"); }},
        {"val_frac", [&](const std::string& v) { e.val_frac = parse_num(v, "val_frac"); }},
        {"f1", [&](const std::string& v) { e.f1 = static_cast<int>(parse_long(v, "f1")); }},
        {"f2", [&](const std::string& v) { e.f2 = static_cast<int>(parse_long(v, "f2")); }},
        {"lr", [&](const std::string& v) { e.lr = parse_num(v, "lr"); }},
        {"weight_decay", [&](const std::string& v) { e.weight_decay = parse_num(v, "weight_decay"); }},
        {"dropout", [&](const std::string& v) { e.dropout = parse_num(v, "dropout"); }},
        {"max_epochs", [&](const std::string& v) { e.max_epochs = static_cast<int>(parse_long(v, "max_epochs")); }},
        {"patience", [&](const std::string& v) { e.patience = static_cast<int>(parse_long(v, "patience")); }},
        {"operator", [&](const std::string& v) { e.op = operator_from_string(unquote(v, "operator")); }},
        {"q", [&](const std::string& v) { e.q = parse_num(v, "q"); }},
        {"flow_preprocess", [&](const std::string& v) { e.flow = flow_from_string(unquote(v, "flow_preprocess")); }},
        {"seed", [&](const std::string& v) { e.seed = static_cast<std::uint64_t>(parse_long(v, "seed")); }},
        {"parallel_folds", [&](const std::string& v) { e.parallel_folds = static_cast<int>(parse_long(v, "parallel_folds")); }},
        {"out_dir", [&](const std::string& v) { st.out_dir = unquote(v, "out_dir"); }},
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: missing '=' at " + path + ":" +
                                  std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        auto it = handlers.find(key);
        if (it == handlers.end())
            throw ValidationError("config: unknown key '" + key + "' at " + path +
                                  ":" + std::to_string(line_no));
        it->second(value);
    }
    return st;
}

}  // namespace sigmanet
