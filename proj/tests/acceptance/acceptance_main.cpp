#include "iinr/iinr.hpp"
int main() { return 0; }
