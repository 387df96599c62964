#include "discround/cli.hpp"

int main(int argc, char** argv) { return discround::run_cli(argc, argv); }
