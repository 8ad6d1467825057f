#include <stdio.h>
#include "triheun.h"

int main(void) {
    const double a[3] = {9.0, 22.5, 15.75};
    const double b[3] = {1.0, 2.0, 1.0};
    TriheunMap *map = NULL;
    if (triheun_map_new(a, b, &map) != TRIHEUN_STATUS_OK) {
        fprintf(stderr, "%s\n", triheun_last_error());
        return 1;
    }
    double v = 0.0;
    TriheunStatus st = triheun_map_potential(map, 0.0, &v);
    triheun_map_free(map);
    if (st != TRIHEUN_STATUS_OK) {
        fprintf(stderr, "%s\n", triheun_last_error());
        return 1;
    }
    printf("%f\n", v);
    return 0;
}
