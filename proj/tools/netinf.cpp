#include "netinf/cli.hpp"

int main(int argc, char** argv) { return netinf::cli::run(argc, argv); }
