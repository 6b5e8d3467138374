#include "camellia/cli.hpp"

int main(int argc, char** argv) { return camellia::run_cli(argc, argv); }
