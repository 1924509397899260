#include <stdio.h>
#include <string.h>

#include "scp.h"

static const char *SOURCE =
    "universe: a b c d e f g\n"
    "sets: X Y Z\n"
    "X \\ Y = {a, d}\n"
    "X \\ Z = {d}\n"
    "Y \\ X = {b, f}\n"
    "Z \\ X = {b}\n"
    "Z \\ Y = {a}\n"
    "c !in X\n"
    "e in Z\n";

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__,     \
                    __LINE__, #cond);                                  \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    ScpInstance *inst = NULL;
    ScpMatrix *m = NULL;
    size_t rows = 0, cols = 0, uncertain = 0;
    int8_t v = 0;
    char *expr = NULL;

    CHECK(scp_instance_parse(SOURCE, &inst) == SCP_STATUS_OK);
    CHECK(scp_matrix_build(inst, &m) == SCP_STATUS_OK);
    CHECK(scp_matrix_dims(m, &rows, &cols) == SCP_STATUS_OK);
    CHECK(rows == 7 && cols == 3);
    CHECK(scp_matrix_get(m, 0, 1, &v) == SCP_STATUS_OK && v == -1);
    CHECK(scp_matrix_get(m, 6, 2, &v) == SCP_STATUS_OK && v == 0);
    CHECK(scp_matrix_get(m, 9, 0, &v) == SCP_STATUS_OUT_OF_RANGE);
    CHECK(scp_last_error_message() != NULL);
    CHECK(scp_matrix_uncertain_count(m, &uncertain) == SCP_STATUS_OK && uncertain == 8);

    CHECK(scp_set_expression(m, "Z", &expr) == SCP_STATUS_OK);
    CHECK(strcmp(expr, "Z = |0>.(a+b+e) + |1>.(d) + (1/sqrt2)(|0>+|1>).(c+f+g)") == 0);
    scp_string_free(expr);

    scp_matrix_free(m);
    scp_instance_free(inst);

    CHECK(scp_instance_parse("universe: c\nsets: X\nc in X\nc !in X\n", &inst) == SCP_STATUS_OK);
    m = NULL;
    CHECK(scp_matrix_build(inst, &m) == SCP_STATUS_CONTRADICTION);
    CHECK(m == NULL);
    CHECK(strstr(scp_last_error_message(), "contradiction") != NULL);
    scp_instance_free(inst);

    printf("ok %s\n", scp_version());
    return 0;
}
