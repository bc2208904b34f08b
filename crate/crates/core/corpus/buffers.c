#include "corpus.h"

unsigned int checksum(unsigned char buf[8])
{
    unsigned int s = 0;
    int i;
    for (i = 0; i < 8; i++)
        s = (s << 1) ^ buf[i];
    return s;
}

int trim(char *s)
{
    int n = 0;
    while (n < 16 && s[n] != '\0')
        n++;
    while (n > 0 && (s[n - 1] == ' ' || s[n - 1] == '\t')) {
        n--;
        s[n] = '\0';
    }
    return n;
}

double poly(double x)
{
    return 3.0 * x * x - 2.0 * x + 1.0;
}
