#include "mixedbvp/cli/app.hpp"

int main(int argc, char** argv) { return mixedbvp::cli::main(argc, argv); }
