#include "predreg/cli.hpp"

int main(int argc, char** argv) { return predreg::cli::main(argc, argv); }
