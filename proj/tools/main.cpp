#include "linf/cli.hpp"

int main(int argc, char** argv) { return linf::run_cli(argc, argv); }
