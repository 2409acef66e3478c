#include "cli.hpp"

int main(int argc, char** argv) { return upasim::cli::run_cli(argc, argv); }
