#include <math.h>
#include <stdio.h>
#include "ptbench.h"

int main(void) {
    PtbMedium *m = NULL;
    if (ptb_medium_fig2(&m) != PTB_STATUS_OK) return 10;

    PtbSettings s;
    ptb_settings_default(&s);
    PtbDetection w;
    PtbProbabilities p;
    if (ptb_run_bench(m, &s, &w) != PTB_STATUS_OK) return 11;
    if (ptb_probabilities(&w, &p) != PTB_STATUS_OK) return 12;
    printf("%.12f\n", p.pa_h);

    PtbMedium *broken = NULL;
    ptb_medium_new(1.0, 1.5707963267948966, 0.5, 0.0, &broken);
    PtbStatus st = ptb_run_bench(broken, &s, &w);
    char msg[256];
    ptb_last_error_message(msg, sizeof msg);
    printf("%d %s\n", (int)st, msg);

    ptb_medium_free(broken);
    ptb_medium_free(m);
    return fabs(p.pa_h - 0.474806435) < 1e-8 ? 0 : 1;
}
