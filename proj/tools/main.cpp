#include <iostream>

#include "stieltjes/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return stieltjes::run_cli(args, std::cout, std::cerr);
}
