#include <stdio.h>
#include "ontoforge.h"

int main(void) {
    size_t d = 0;
    if (onto_edit_distance("teh", "the", &d) != ONTO_STATUS_OK) {
        fprintf(stderr, "%s\n", onto_last_error());
        return 1;
    }
    OntoSnapshot *snap = NULL;
    OntoStatus st = onto_snapshot_from_json("{\"N\": 10, \"unigram\": {}, \"pair\": {}}", &snap);
    if (st == ONTO_STATUS_OK) {
        onto_snapshot_free(snap);
    }
    char *json = NULL;
    if (onto_cluster_tsv("a\ta\t0\n", 0, &json) == ONTO_STATUS_OK) {
        onto_string_free(json);
    }
    printf("%s %zu\n", onto_version(), d);
    return 0;
}
