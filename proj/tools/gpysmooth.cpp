#include <gpysmooth/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return gpysmooth::run_cli(argc, argv, std::cout, std::cerr); }
