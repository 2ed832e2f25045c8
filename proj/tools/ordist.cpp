#include "ordist/cli/app.hpp"

int main(int argc, char** argv) { return ordist::cli::run(std::vector<std::string>(argv + 1, argv + argc)); }
