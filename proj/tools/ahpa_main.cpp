#include "ahpa/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return ahpa::run_cli(argc, argv, std::cout, std::cerr);
}
