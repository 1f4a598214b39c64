#include <string>
#include <vector>

#include "lev2d/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lev2d::cli_dispatch(args);
}
