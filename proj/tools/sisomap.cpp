#include "sisomap/cli.hpp"

int main(int argc, char** argv) { return sisomap::cli::main(argc, argv); }
