#include "rfib/cli.hpp"

int main(int argc, char** argv) { return rfib::run_cli(argc, argv); }
