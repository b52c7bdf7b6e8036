#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "msond/config.hpp"
#include "msond/error.hpp"
#include "msond/experiments.hpp"

int main(int argc, char** argv)
{
    const std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << msond::usage();
        return 2;
    }
    if (std::find(args.begin(), args.end(), "--help") != args.end() ||
        std::find(args.begin(), args.end(), "-h") != args.end()) {
        std::cout << msond::usage();
        return 0;
    }
    if (args[0] == "--version") {
        std::cout << msond::version_string() << '\n';
        return 0;
    }

    std::optional<std::string> env_seed;
    if (const char* s = std::getenv("MSOND_SEED")) {
        env_seed = s;
    }

    msond::ExperimentSpec spec;
    try {
        spec = msond::parse_config(args, env_seed);
    } catch (const msond::ConfigError& e) {
        std::cerr << "msond: configuration error: " << e.what() << '\n';
        return 2;
    }
    std::cerr << msond::describe(spec);

    try {
        msond::write_outputs(msond::run_experiment(spec));
    } catch (const msond::ConfigError& e) {
        std::cerr << "msond: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "msond: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
