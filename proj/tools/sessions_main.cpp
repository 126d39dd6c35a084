#include <iostream>

#include "sessions/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sessions::run_cli(args, std::cout, std::cerr);
}
