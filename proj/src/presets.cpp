#include "fdkl/errors.hpp"
#include "fdkl/experiment.hpp"

namespace fdkl {

namespace {

ExperimentConfig example1(ExperimentKind kind, const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.kind = kind;
    c.seed = 20240501;
    c.n_samples = 2000;
    c.paper_scale_samples = 5000;
    c.grid = {1, 50.0, 0.0, 0.01, 0.0};
    c.stride = 10;
    c.kernels = {{"matern_like", 0.1}, {"matern_like", 0.2}};
    c.marginals = {{"gumbel", {0.0, 1.0}}, {"gumbel", {1.0, 2.0}}};
    c.d_levels = {{5, 15}, {10, 20}, {15, 25}};
    c.output_dir = "runs/" + name;
    return c;
}

ExperimentConfig example2(ExperimentKind kind, const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.kind = kind;
    c.seed = 20240502;
    c.n_samples = 2000;
    c.paper_scale_samples = 5000;
    c.grid = {1, 10.0, 0.0, 0.01, 0.0};
    c.kernels = {{"ou", 1.0}};
    c.oscillators = {{0.5, 10.0, 1.0}, {0.2, 5.0, 2.0}};
    c.d_levels = {{5, 5}, {15, 15}, {25, 25}};
    c.output_dir = "runs/" + name;
    return c;
}

ExperimentConfig example3() {
    ExperimentConfig c;
    c.name = "example3_conductivity";
    c.kind = ExperimentKind::Example3Conductivity;
    c.seed = 20240503;
    c.n_samples = 200;
    c.paper_scale_samples = 1000;
    c.grid = {2, 20.0, 15.0, 0.4, 0.3};
    c.kernels = {{"gauss2d", 0.7}};
    c.marginals = {{"scaled_beta", {0.5, 1.5, 1.0, 20.0}}};
    c.d_levels = {{50}, {150}};
    c.stored_samples = 3;
    c.output_dir = "runs/example3_conductivity";
    return c;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"example1_direct", "example1_translation", "example2_response", "example2_input", "example3_conductivity"};
}

ExperimentConfig preset(const std::string& name) {
    if (name == "example1_direct") return example1(ExperimentKind::Example1Direct, name);
    if (name == "example1_translation") return example1(ExperimentKind::Example1Translation, name);
    if (name == "example2_response" || name == "example2") return example2(ExperimentKind::Example2Response, "example2_response");
    if (name == "example2_input") return example2(ExperimentKind::Example2Input, name);
    if (name == "example3_conductivity" || name == "example3") return example3();
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ArgumentError("unknown preset '" + name + "' (known: " + known + ")");
}

} // namespace fdkl
