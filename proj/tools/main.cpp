#include "qardl/cli.hpp"

int main(int argc, char** argv) { return qardl::run_cli(argc, argv); }
