#include "fracsys/cli.hpp"

int main(int argc, char** argv) { return fracsys::cli_main(argc, argv); }
