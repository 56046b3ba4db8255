#include "hpsplines/cli.hpp"

int main(int argc, char** argv) { return hpsplines::run_cli(argc, argv); }
