#include "corpus.h"

int clamp_byte(signed char x)
{
    if (x < -100)
        return -100;
    if (x > 100)
        return 100;
    return x;
}

int sign_of(short v)
{
    if (v > 0)
        return 1;
    if (v < 0)
        return -1;
    return 0;
}

int parity(unsigned char b)
{
    int p = 0;
    while (b != 0) {
        p ^= b & 1;
        b >>= 1;
    }
    return p;
}

int max2(signed char a, signed char b)
{
    return a >= b ? a : b;
}

int safe_div(short a, short b)
{
    if (b == 0)
        return 0;
    return a / b;
}
