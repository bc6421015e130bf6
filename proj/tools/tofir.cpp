#include <tofir/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return tofir::cli::run(argc, argv, std::cout, std::cerr);
}
