#include <iostream>

#include "mural2scene/cli.hpp"

int main(int argc, char **argv) { return mural2scene::run_cli(argc, argv, std::cout, std::cerr); }
