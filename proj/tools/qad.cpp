#include "qad/cli.hpp"

int main(int argc, char** argv)
{
    return qad::cli::run(argc, argv);
}
