#include "dpsynth/dpsynth.hpp"
int main() { return 0; }
