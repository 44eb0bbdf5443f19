#include "asclt/cli.hpp"

int main(int argc, char** argv)
{
    return asclt::run(argc, argv);
}
