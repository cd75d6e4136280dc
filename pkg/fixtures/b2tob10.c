/* Binary-to-decimal conversion, C port of the mini fixture.
 * Reads the bit count and then the bits (most significant first) from
 * standard input; prints the decimal value. */
#include <stdio.h>

int main(void) {
    static int bits[64];
    int size = 0;
    if (scanf("%d", &size) != 1) {
        return 1;
    }
    for (int k = 0; k < size; k++) {
        if (scanf("%d", &bits[k]) != 1) {
            return 1;
        }
    }
    if (size == 0) {
        printf("0\n");
        return 0;
    }
    int pos = 1, i = 2, number = 0, count, aux;
    number += bits[size - 1];
    while (i <= 1 << size - 1) {
        aux = i;
        count = 0;
        while (aux > 0) {
            count++;
            aux = aux & (aux - 1);
        }
        if (count > 1) {
            i += 2;
            continue;
        }
        number += bits[size - 1 - pos] * i;
        pos++;
        i += 2;
    }
    printf("%d\n", number);
    return 0;
}
