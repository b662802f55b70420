#include "jmech/cli.hpp"

int main(int argc, char** argv) { return jmech::run_cli(argc, argv); }
