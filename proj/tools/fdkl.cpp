#include "fdkl/errors.hpp"
#include "fdkl/experiment.hpp"
#include "fdkl/io.hpp"
#include "fdkl/parallel.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Source {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool paper_scale = false;
};

fdkl::ExperimentConfig load(const Source& src) {
    if (src.config_path.empty() == src.preset_name.empty()) throw fdkl::ConfigError("give exactly one of --config or --preset");
    fdkl::ExperimentConfig c;
    if (src.preset_name.empty()) {
        std::string text;
        try {
            text = fdkl::read_text_file(src.config_path);
        } catch (const std::runtime_error& e) {
            throw fdkl::ConfigError(e.what());
        }
        c = fdkl::parse_config(text);
    } else {
        c = fdkl::preset(src.preset_name);
    }
    if (src.seed) c.seed = *src.seed;
    if (!src.out.empty()) c.output_dir = src.out;
    if (src.paper_scale && c.paper_scale_samples > 0) c.n_samples = c.paper_scale_samples;
    return c;
}

void add_source(CLI::App* cmd, Source& src, bool with_run_flags) {
    cmd->add_option("--config", src.config_path, "experiment config (JSON)");
    cmd->add_option("--preset", src.preset_name, "built-in preset instead of --config");
    if (with_run_flags) {
        cmd->add_option("--seed", src.seed, "override the config seed");
        cmd->add_flag("--paper-scale", src.paper_scale, "use the full sample counts");
    }
}

int report_violations(const std::vector<std::string>& violations) {
    for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
    return violations.empty() ? 0 : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-dimensional Karhunen-Loeve models of random processes and fields"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "worker threads (default: hardware concurrency)");

    Source src;
    std::string preset_arg;
    bool list = false;
    std::string preset_out;
    auto* preset_cmd = app.add_subcommand("preset", "print a built-in config");
    preset_cmd->add_option("name", preset_arg, "preset name");
    preset_cmd->add_flag("--list", list, "list preset names");
    preset_cmd->add_option("--out", preset_out, "write to a file instead of stdout");

    auto* validate_cmd = app.add_subcommand("validate", "check a config and list every violation");
    add_source(validate_cmd, src, false);

    auto* run_cmd = app.add_subcommand("run", "run an experiment and write its artifacts");
    add_source(run_cmd, src, true);
    run_cmd->add_option("--out", src.out, "output directory (overrides the config)");

    auto* eigen_cmd = app.add_subcommand("eigen", "write the Nystrom bases of a config's kernels");
    add_source(eigen_cmd, src, false);
    eigen_cmd->add_option("--out", src.out, "output directory")->required();

    std::string run_dir, report_out;
    auto* report_cmd = app.add_subcommand("report", "recompute exceedance and report CSVs from a finished run");
    report_cmd->add_option("--run", run_dir, "run directory holding manifest.json")->required();
    report_cmd->add_option("--out", report_out, "output directory (default: the run directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    fdkl::set_thread_count(threads > 0 ? threads : std::thread::hardware_concurrency());

    try {
        if (preset_cmd->parsed()) {
            if (list) {
                for (const auto& n : fdkl::preset_names()) std::cout << n << "\n";
                return 0;
            }
            if (preset_arg.empty()) throw fdkl::ConfigError("preset name required (see --list)");
            const std::string text = fdkl::preset(preset_arg).to_json().dump(2) + "\n";
            if (preset_out.empty())
                std::cout << text;
            else
                fdkl::write_text_file(preset_out, text);
            return 0;
        }
        if (validate_cmd->parsed()) {
            const int code = report_violations(fdkl::validate(load(src)));
            if (code == 0) std::cout << "ok\n";
            return code;
        }
        if (run_cmd->parsed()) {
            const auto config = load(src);
            if (const int code = report_violations(fdkl::validate(config)); code != 0) return code;
            const auto result = fdkl::run_experiment(config);
            std::cout << result.directory << "\n";
            return 0;
        }
        if (eigen_cmd->parsed()) {
            const auto config = load(src);
            if (const int code = report_violations(fdkl::validate(config)); code != 0) return code;
            for (const auto& stem : fdkl::write_config_bases(config, src.out)) std::cout << stem << ".csv\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            fdkl::recompute_report(run_dir, report_out.empty() ? run_dir : report_out);
            return 0;
        }
    } catch (const fdkl::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const fdkl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
