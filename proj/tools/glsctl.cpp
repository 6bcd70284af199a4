#include "gls/cli.hpp"

int main(int argc, char** argv) { return gls::cli::main(argc, argv); }
