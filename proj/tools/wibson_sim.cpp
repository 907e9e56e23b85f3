// Copyright 2026 The Wibson Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wibson/sim/engine.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deterministic data-marketplace simulator"};
    app.require_subcommand(1);

    std::string run_file, verify_file, report_path, trace_path;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run a scenario and report the outcome");
    run->add_option("file", run_file, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--report", report_path, "Write the JSON report here");
    run->add_option("--trace", trace_path, "Write the event trace here");
    run->add_flag("-q,--quiet", quiet, "Skip the summary table");

    auto* verify = app.add_subcommand("verify", "Validate a scenario without running it");
    verify->add_option("file", verify_file, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    if (*verify) {
        try {
            const auto s = wibson::sim::load_scenario(verify_file);
            std::cout << verify_file << ": ok (" << s.name << ", " << s.buyers.size() << " buyers, "
                      << s.seller_count() << " sellers, " << s.notaries.size() << " notaries)\n";
            return 0;
        } catch (const wibson::sim::ScenarioError& e) {
            std::cerr << verify_file << ": error: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        wibson::sim::Engine engine(wibson::sim::load_scenario(run_file), seed);
        const bool ok = engine.run();
        if (!quiet)
            std::cout << engine.summary();
        if (!report_path.empty() && !write_file(report_path, engine.report_json()))
            return 3;
        if (!trace_path.empty() && !write_file(trace_path, engine.trace()))
            return 3;
        if (!ok)
            for (const auto& v : engine.violations())
                std::cerr << "invariant violation: " << v.str() << "\n";
        return ok ? 0 : 1;
    } catch (const wibson::sim::ScenarioError& e) {
        std::cerr << run_file << ": error: " << e.what() << "\n";
        return 2;
    }
}
