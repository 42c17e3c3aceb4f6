#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace diforge {

/// Everything a CLI invocation resolves to before dispatch. Numeric fields
/// keep the documented defaults; optionals stay empty unless given.
struct RunConfig {
    std::string command;

    int n = 0;
    int L = 2;
    double delta = 0.2;
    std::vector<int> branching;
    std::string mode = "capacity";
    std::vector<double> radii; // custom mode
    std::optional<double> d;   // custom mode

    std::string channel = "bernoulli";
    double a = 0.2, b = 0.8;
    double A = 1.0;

    std::optional<double> E;
    std::optional<double> gen_separation;

    long long trials = 100'000;
    std::uint64_t build_seed = 1;
    std::uint64_t rotation_seed = 7;
    std::uint64_t trial_seed = 1;
    std::uint64_t input_seed = 42;
    bool use_rotation = false;

    std::string experiment = "missed-id";
    std::optional<double> t;
    std::string t_mode = "capacity";
    std::vector<int> tested_id;
    std::vector<int> transmitted_id;
    bool adversarial = true;

    std::optional<double> affine_scale;
    std::optional<double> affine_center;

    std::vector<double> E_grid;
    std::vector<double> x_values;

    std::string in_path;
    std::string out_path;
    std::string format = "json";
};

/// Exit codes: 0 ok, 2 usage, 3 placement failure, 4 regime violation,
/// 5 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace diforge
