#include "pulseforge/pulseforge.hpp"
int main() { return 0; }
