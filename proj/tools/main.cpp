#include <iostream>
#include <string>
#include <vector>

#include "bracket/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return bracket::run_cli(args, std::cout, std::cerr);
}
