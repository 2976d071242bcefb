// Command-line front end; talks to the solver only through the shared-library
// C interface.
#include <gmsfem/gmsfem.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Multiscale finite element experiment runner"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand

  std::string config_path, out_dir;
  int workers = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--workers", workers, "worker cap for parallel sections")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "progress output on stderr");

  for (const char* name : {"solve", "study", "spectra", "appendix"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : GMSFEM_ERR_CONFIG;
  }

  struct CtxDeleter {
    void operator()(gmsfem_ctx* c) const { gmsfem_destroy(c); }
  };
  std::unique_ptr<gmsfem_ctx, CtxDeleter> ctx(gmsfem_create());
  if (!ctx) {
    std::fprintf(stderr, "error: cannot create solver context\n");
    return GMSFEM_ERR_NUMERIC;
  }

  auto fail = [&](int rc) {
    std::fprintf(stderr, "error: %s\n", gmsfem_last_error(ctx.get()));
    return rc;
  };

  int rc = gmsfem_load_config(ctx.get(), config_path.c_str());
  if (rc != GMSFEM_OK) return fail(rc);
  if (!out_dir.empty()) {
    rc = gmsfem_set_option(ctx.get(), "out", out_dir.c_str());
    if (rc != GMSFEM_OK) return fail(rc);
  }
  rc = gmsfem_set_option(ctx.get(), "workers",
                         std::to_string(workers).c_str());
  if (rc != GMSFEM_OK) return fail(rc);
  rc = gmsfem_set_option(ctx.get(), "verbose", verbose ? "1" : "0");
  if (rc != GMSFEM_OK) return fail(rc);

  const std::string cmd = app.get_subcommands().front()->get_name();
  rc = gmsfem_run(ctx.get(), cmd.c_str());
  if (rc != GMSFEM_OK) return fail(rc);
  return 0;
}
