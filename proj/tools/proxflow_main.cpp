#include "proxflow/bench.hpp"

int main(int argc, char** argv) { return proxflow::bench::run_cli(argc, argv); }
