#include "cli.hpp"

int main(int argc, char** argv) { return roam::cli::run_cli(argc, argv); }
