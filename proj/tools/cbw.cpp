#include "cbw/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return cbw::cli::run(argc, argv, std::cout, std::cerr);
}
