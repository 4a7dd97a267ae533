#include <math.h>
#include <stdio.h>
#include "revaudit.h"

int main(void) {
    double scores[] = {0.9, 0.2, 0.8, 0.7};
    uint8_t labels[] = {1, 0, 1, 0};
    uint32_t groups[] = {0, 0, 1, 1};
    double dp = -1.0, auc = -1.0, sim = -1.0;
    if (ra_dp_gap(scores, labels, groups, 4, 0.5, &dp) != RA_STATUS_OK) return 1;
    if (fabs(dp - 0.5) > 1e-12) return 2;
    if (ra_roc_auc(scores, labels, 4, &auc) != RA_STATUS_OK) return 3;
    if (fabs(auc - 1.0) > 1e-12) return 4;
    if (ra_normalized_levenshtein("kitten", "sitting", &sim) != RA_STATUS_OK) return 5;
    if (fabs(sim - (1.0 - 3.0 / 7.0)) > 1e-12) return 6;
    if (ra_roc_auc(scores, NULL, 4, &auc) != RA_STATUS_NULL_POINTER) return 7;
    if (ra_last_error_message() == NULL) return 8;
    printf("ok\n");
    return 0;
}
