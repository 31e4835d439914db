#include "lightam/cli.hpp"

int main(int argc, char** argv) { return lightam::cli::run_cli(argc, argv); }
