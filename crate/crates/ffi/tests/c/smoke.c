#include <stdio.h>
#include <string.h>

#include "regen.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "line %d: %s\n", __LINE__, #cond);         \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    RegenCode *code = NULL;
    CHECK(regen_code_from_recipe("blowup_simple(base(3,2))", 0, &code) == REGEN_STATUS_OK);

    size_t n, k, d, alpha, gamma, file_len, total;
    CHECK(regen_code_params(code, &n, &k, &d) == REGEN_STATUS_OK);
    CHECK(n == 4 && k == 3 && d == 3);
    CHECK(regen_code_sizes(code, &alpha, &gamma, &file_len) == REGEN_STATUS_OK);
    CHECK(alpha == 3 && gamma == 6 && file_len == 8);
    CHECK(regen_code_total_symbols(code, &total) == REGEN_STATUS_OK);
    CHECK(total == 12);

    uint16_t msg[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    uint16_t nodes[12];
    CHECK(regen_code_encode(code, msg, 8, nodes, 12) == REGEN_STATUS_OK);
    CHECK(nodes[0] == 3 && nodes[1] == 5 && nodes[2] == 7);
    CHECK(regen_code_encode(code, msg, 8, nodes, 11) == REGEN_STATUS_BUFFER_SIZE);

    RegenReport *report = NULL;
    CHECK(regen_code_verify(code, 0, false, &report) == REGEN_STATUS_OK);
    CHECK(regen_report_passed(report));
    char *json = NULL;
    CHECK(regen_report_json(report, &json) == REGEN_STATUS_OK);
    CHECK(strstr(json, "\"match\": true") != NULL);
    regen_string_free(json);
    regen_report_free(report);
    regen_code_free(code);

    char *gamma_s = NULL, *file_s = NULL;
    CHECK(regen_perf_p1(4, 3, 3, "3/8", 2, &gamma_s, &file_s) == REGEN_STATUS_OK);
    CHECK(strcmp(gamma_s, "3/4") == 0 && strcmp(file_s, "1") == 0);
    regen_string_free(gamma_s);
    regen_string_free(file_s);

    CHECK(regen_code_from_recipe("blowup_full(base(7,2))", 0, &code) == REGEN_STATUS_BUDGET);
    CHECK(code == NULL);
    CHECK(regen_last_error() != NULL);
    printf("ok\n");
    return 0;
}
