#include "torsion8/cli.hpp"

int main(int argc, char** argv) { return torsion8::cli::main(argc, argv); }
