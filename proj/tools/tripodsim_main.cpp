#include <string>
#include <vector>

#include "tripod/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tripod::run_command(args);
}
