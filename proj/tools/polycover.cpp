#include "polycover/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return polycover::run_cli(argc, argv, std::cout, std::cerr);
}
