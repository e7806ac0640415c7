#include <iostream>

#include "tracerec/cli.hpp"

int main(int argc, char** argv) { return tracerec::run_command(argc, argv, std::cout, std::cerr); }
