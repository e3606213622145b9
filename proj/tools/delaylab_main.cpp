#include "delaylab/cli.hpp"

int main(int argc, char** argv) { return delaylab::run_cli(argc, argv); }
