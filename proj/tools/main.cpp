#include "wbqa/cli.hpp"

int main(int argc, char** argv) { return wbqa::run_cli(argc, argv); }
