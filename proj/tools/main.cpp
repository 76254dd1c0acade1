#include "gridres/cli.hpp"

int main(int argc, char** argv) { return gridres::run_cli(argc, argv); }
