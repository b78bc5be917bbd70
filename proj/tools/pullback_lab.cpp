#include <string>
#include <vector>

#include "pullback/runner.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pullback::cli::cli_main(args);
}
