#include <stdio.h>
#include <string.h>

#include "bidisc.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    BidiscSigning *m = NULL;
    CHECK(bidisc_signing_parse("4\n++++\n++++\n++++\n++++\n", &m) == BIDISC_STATUS_OK);
    CHECK(bidisc_signing_n(m) == 4);

    BidiscCensus c;
    CHECK(bidisc_signing_census(m, &c) == BIDISC_STATUS_OK);
    CHECK(c.s == 0);

    BidiscFactorization *f = NULL;
    CHECK(bidisc_factorize_cyclic(m, 1, 100, &f) == BIDISC_STATUS_OK);
    CHECK(bidisc_factorization_n(f) == 4);
    int64_t num = 0, den = 0;
    CHECK(bidisc_factorization_min_disc(f, m, &num, &den) == BIDISC_STATUS_OK);
    CHECK(num == 1 && den == 1);
    size_t row[4];
    CHECK(bidisc_factorization_matching(f, 3, row) == BIDISC_STATUS_OK);
    CHECK(bidisc_factorization_matching(f, 4, row) == BIDISC_STATUS_INVALID_ARGUMENT);
    CHECK(bidisc_last_error_message() != NULL);

    char *json = NULL;
    CHECK(bidisc_certify(m, 1, 2, 0, &json) == BIDISC_STATUS_OK);
    CHECK(strstr(json, "\"branch\":1") != NULL);
    bidisc_string_free(json);

    BidiscSigning *bad = NULL;
    CHECK(bidisc_signing_parse("2\n+x\n--\n", &bad) == BIDISC_STATUS_PARSE_ERROR);
    CHECK(bad == NULL);

    bidisc_factorization_free(f);
    bidisc_signing_free(m);
    puts("ok");
    return 0;
}
