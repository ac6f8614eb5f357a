#include <iostream>
#include <string>
#include <vector>

#include "pathparse/cli.hpp"

int main(int argc, char** argv) {
    return pathparse::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
