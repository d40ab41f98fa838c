#include <iostream>

#include "larsnet/commands.hpp"

int main(int argc, char** argv) { return larsnet::run_cli(argc, argv, std::cout, std::cerr); }
