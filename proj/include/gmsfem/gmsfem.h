/* C interface to the multiscale elliptic solver.
 *
 * Usage: create a context, load or parse a configuration, optionally adjust
 * runtime options, then run one of the commands.  All functions returning int
 * yield GMSFEM_OK on success; on failure the context stores a message
 * retrievable with gmsfem_last_error().
 */
#ifndef GMSFEM_H
#define GMSFEM_H

#ifdef __cplusplus
extern "C" {
#endif

enum {
  GMSFEM_OK = 0,
  GMSFEM_ERR_CONFIG = 2, /* bad configuration or arguments */
  GMSFEM_ERR_NUMERIC = 3 /* numerical failure in the pipeline */
};

typedef struct gmsfem_ctx gmsfem_ctx;

/* Context lifetime.  gmsfem_destroy accepts NULL. */
gmsfem_ctx* gmsfem_create(void);
void gmsfem_destroy(gmsfem_ctx* ctx);

/* Load the experiment description from a file or from an in-memory string. */
int gmsfem_load_config(gmsfem_ctx* ctx, const char* path);
int gmsfem_parse_config(gmsfem_ctx* ctx, const char* text);

/* Override a runtime option: "out" (directory), "workers" (integer),
 * "verbose" ("0"/"1").  Must be called after a config is loaded. */
int gmsfem_set_option(gmsfem_ctx* ctx, const char* key, const char* value);

/* Run a command: "solve", "study", "spectra" or "appendix".  Artifacts are
 * written under the configured output directory. */
int gmsfem_run(gmsfem_ctx* ctx, const char* command);

/* Message of the most recent failure; empty string if none. */
const char* gmsfem_last_error(const gmsfem_ctx* ctx);

#ifdef __cplusplus
}
#endif

#endif /* GMSFEM_H */
