#include "cdc/cli.hpp"

int main(int argc, char** argv) { return cdc::cli::main(argc, argv); }
