#include "cli.hpp"
int main(int argc, char** argv) { return sbadmm::cli::run_cli(argc, argv); }
