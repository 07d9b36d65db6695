#include "loadflow/cli.hpp"

int main(int argc, char** argv) { return loadflow::cli::main_entry(argc, argv); }
