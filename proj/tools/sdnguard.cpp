#include "sdnguard/cli.hpp"

int main(int argc, char** argv) { return sdnguard::cli::run_cli(argc, argv); }
