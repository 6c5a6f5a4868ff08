#include <string>
#include <vector>

#include "reachmax/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return reachmax::cli::run(std::move(args));
}
