#include "cli.hpp"

int main(int argc, char** argv)
{
    return bimodal::cli::run(argc, argv);
}
