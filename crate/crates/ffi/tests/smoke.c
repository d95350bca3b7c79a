#include <stdio.h>
#include "dail.h"

int main(void) {
    DailFamily *family = NULL;
    if (dail_family_generate(17, &family) != DAIL_STATUS_OK) return 1;

    DailRectangle *a = NULL, *b = NULL;
    if (dail_family_cut(family, 0, 16, 12, &a) != DAIL_STATUS_OK) return 2;
    if (dail_family_cut(family, 1, 16, 12, &b) != DAIL_STATUS_OK) return 3;

    size_t worst = 0;
    for (uint32_t s = 0; s < 17; s++) {
        for (uint32_t t = 0; t < 17; t++) {
            size_t shared = 0;
            if (dail_pattern_overlap(a, s, b, t, &shared) != DAIL_STATUS_OK) return 4;
            if (shared > worst) worst = shared;
        }
    }

    DailFamily *bad = NULL;
    char msg[128];
    if (dail_family_generate(12, &bad) != DAIL_STATUS_NOT_PRIME) return 5;
    dail_last_error_message(msg, sizeof msg);

    printf("max overlap %zu; %s\n", worst, msg);
    dail_rectangle_free(a);
    dail_rectangle_free(b);
    dail_family_free(family);
    return worst == 1 ? 0 : 6;
}
