#include "isoplete/cli.hpp"

int main(int argc, char** argv) { return isoplete::cli_main(argc, argv); }
