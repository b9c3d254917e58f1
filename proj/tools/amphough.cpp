#include <string>
#include <vector>

#include "amphough/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return amphough::cli::run_cli(args);
}
