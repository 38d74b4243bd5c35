#include <iostream>

#include "ptrac/driver.hpp"

int main(int argc, char** argv)
{
    return ptrac::sim_main(argc, argv, std::cout, std::cerr);
}
