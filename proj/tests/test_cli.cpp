#include "fdkl/experiment.hpp"
#include "fdkl/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

using namespace fdkl;
namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "fdkl_test_cli";

int cli(const std::string& args, const std::string& log = "cli.log") {
    fs::create_directories(work);
    const std::string cmd = std::string(FDKL_CLI_PATH) + " " + args + " > " + (work / log).string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string output(const std::string& log = "cli.log") { return read_text_file((work / log).string()); }

void write_config(const ExperimentConfig& c, const std::string& name) { write_text_file((work / name).string(), c.to_json().dump(2)); }

ExperimentConfig tiny() {
    ExperimentConfig c = preset("example1_translation");
    c.n_samples = 30;
    c.grid.tau1 = 2.0;
    c.d_levels = {{2, 4}, {5, 10}};
    c.output_dir = (work / "tiny_run").string();
    return c;
}

} // namespace

TEST_CASE("cli preset and validate") {
    fs::remove_all(work);
    CHECK(cli("preset --list") == 0);
    CHECK(output().find("example3_conductivity") != std::string::npos);
    CHECK(cli("preset example2_input --out " + (work / "p.json").string()) == 0);
    CHECK(parse_config(read_text_file((work / "p.json").string())).kind == ExperimentKind::Example2Input);
    CHECK(cli("preset no_such_preset") == 2);

    CHECK(cli("validate --config " + (work / "p.json").string()) == 0);
    ExperimentConfig bad = preset("example2_response");
    bad.oscillators[0] = {2.0, 1.0, 1.0};
    bad.d_levels = {{5, 5}, {5, 5}};
    write_config(bad, "bad.json");
    CHECK(cli("validate --config " + (work / "bad.json").string()) == 2);
    const std::string out = output();
    CHECK(out.find("underdamping") != std::string::npos);
    CHECK(out.find("not strictly increasing") != std::string::npos);

    write_text_file((work / "broken.json").string(), "{ \"name\": ");
    CHECK(cli("validate --config " + (work / "broken.json").string()) == 2);
    CHECK(output().find("syntax") != std::string::npos);
    CHECK(cli("validate --config " + (work / "missing.json").string()) == 2);
    CHECK(cli("frobnicate") == 2);
}

TEST_CASE("cli run, report and eigen") {
    write_config(tiny(), "tiny.json");
    CHECK(cli("--threads 2 run --config " + (work / "tiny.json").string()) == 0);
    const fs::path run = work / "tiny_run";
    REQUIRE(fs::exists(run / "manifest.json"));
    CHECK(fs::exists(run / "report.csv"));

    CHECK(cli("run --config " + (work / "tiny.json").string() + " --seed 7 --out " + (work / "seeded").string()) == 0);
    CHECK(parse_config(read_text_file((work / "seeded" / "config.json").string())).seed == 7);

    CHECK(cli("report --run " + run.string() + " --out " + (work / "rep").string()) == 0);
    CHECK(read_text_file((work / "rep" / "report.csv").string()) == read_text_file((run / "report.csv").string()));
    CHECK(cli("report --run " + (work / "nowhere").string()) != 0);

    CHECK(cli("eigen --config " + (work / "tiny.json").string() + " --out " + (work / "bases").string()) == 0);
    CHECK(fs::exists(work / "bases" / "basis_1.csv"));
    CHECK(fs::exists(work / "bases" / "basis_2.csv"));
    fs::remove_all(work);
}
