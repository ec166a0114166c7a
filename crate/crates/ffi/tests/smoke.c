#include <stdio.h>
#include <string.h>

#include "dualis.h"

static const char *C4 = "v a\nv b\nv c\nv d\ne 1 a b\ne 2 b c\ne 3 c d\ne 4 d a\n";
static const char *D4 = "v x\nv y\ne 1 x y\ne 2 x y\ne 3 x y\ne 4 x y\n";

int main(void) {
    DualisGraph *c4 = NULL, *d4 = NULL, *dual = NULL;
    bool yes = false;
    if (dualis_graph_parse(C4, &c4) != DUALIS_STATUS_OK) return 10;
    if (dualis_graph_parse(D4, &d4) != DUALIS_STATUS_OK) return 11;
    if (dualis_mutual_duality(c4, d4, &yes) != DUALIS_STATUS_OK || !yes) return 12;
    if (dualis_graph_dual(c4, &dual) != DUALIS_STATUS_OK) return 13;
    if (dualis_graph_vertex_count(dual) != 2 || dualis_graph_edge_count(dual) != 4) return 14;

    DualisGraph *bad = NULL;
    if (dualis_graph_parse("e 1 a", &bad) != DUALIS_STATUS_PARSE) return 15;
    if (dualis_last_error() == NULL) return 16;

    char *text = NULL;
    if (dualis_graph_write(dual, &text) != DUALIS_STATUS_OK) return 17;
    if (strstr(text, "rot") == NULL) return 18;
    dualis_string_free(text);

    dualis_graph_free(dual);
    dualis_graph_free(d4);
    dualis_graph_free(c4);
    printf("ok %s\n", dualis_version());
    return 0;
}
