#include "datalens/cli/driver.hpp"

int main(int argc, char** argv) { return datalens::cli::run_cli(argc, argv); }
