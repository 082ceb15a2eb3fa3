#include <stls/harness/cli.hpp>

int main(int argc, char** argv) { return stls::cli::run(argc, argv); }
