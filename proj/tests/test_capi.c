/* Exercises the public C header from a C translation unit. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "sglab/sglab.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static void on_progress(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

int main(void) {
  sglab_run* run = NULL;
  sglab_row row;
  int lines = 0;
  const char* labels[2] = {"free-energy", "F_N"};
  uint64_t seed = 0;
  size_t i, found = 0;

  EXPECT(strlen(sglab_version()) > 0);
  EXPECT(sglab_experiment_count() >= 17);
  for (i = 0; i < sglab_experiment_count(); ++i)
    if (strcmp(sglab_experiment_name(i), "verify-all") == 0) found = 1;
  EXPECT(found);
  EXPECT(sglab_experiment_name(1000) == NULL);

  EXPECT(sglab_run_create("{\"experiment\":\"free-energy\",\"model\":{\"alpha\":0},\"params\":{\"N\":6}}", &run) ==
         SGLAB_OK);
  EXPECT(run != NULL);
  EXPECT(sglab_run_all_passed(run) == -1);
  EXPECT(sglab_run_write(run, NULL) == SGLAB_INVALID_ARGUMENT);
  EXPECT(sglab_run_execute(run, 1, on_progress, &lines) == SGLAB_OK);
  EXPECT(lines >= 1);
  EXPECT(sglab_run_row_count(run) == 1);
  EXPECT(sglab_run_row(run, 0, &row) == SGLAB_OK);
  EXPECT(fabs(row.value - log(2.0)) < 1e-14);
  EXPECT(row.pass == 1);
  EXPECT(strcmp(row.experiment, "free-energy") == 0);
  EXPECT(strlen(sglab_run_digest(run)) == 16);
  EXPECT(sglab_run_row(run, 5, &row) == SGLAB_INVALID_ARGUMENT);
  EXPECT(sglab_run_all_passed(run) == 1);
  sglab_run_destroy(run);

  run = NULL;
  EXPECT(sglab_run_create("{\"experiment\":\"free-energy\",\"mc\":{\"outr\":1}}", &run) == SGLAB_CONFIG);
  EXPECT(run == NULL);
  EXPECT(strcmp(sglab_last_error_location(), "mc.outr") == 0);
  EXPECT(strlen(sglab_last_error()) > 0);
  EXPECT(sglab_run_create(NULL, &run) == SGLAB_INVALID_ARGUMENT);
  EXPECT(sglab_run_execute(NULL, 1, NULL, NULL) == SGLAB_INVALID_ARGUMENT);
  sglab_run_destroy(NULL);

  EXPECT(sglab_seed_derive(12345, labels, 2, &seed) == SGLAB_OK);
  EXPECT(seed == 6948356462369014153ULL);
  EXPECT(sglab_seed_derive(12345, labels, 0, &seed) == SGLAB_INVALID_ARGUMENT);

  EXPECT(fabs(sglab_convexity_term(0.5, -0.5, 2) - 1.0) < 1e-15);
  EXPECT(isnan(sglab_convexity_term(0.5, -0.5, 3)));

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
