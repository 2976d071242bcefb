#include "gmsfem/gmsfem.h"

#include "config.hpp"
#include "study.hpp"

#include <cstdlib>
#include <string>

struct gmsfem_ctx {
  gmsfem::StudyConfig cfg;
  bool configured = false;
  std::string error;
};

namespace {

template <typename Fn>
int guarded(gmsfem_ctx* ctx, Fn&& fn) {
  if (!ctx) return GMSFEM_ERR_CONFIG;
  ctx->error.clear();
  try {
    return fn();
  } catch (const gmsfem::ConfigError& e) {
    ctx->error = e.what();
    return GMSFEM_ERR_CONFIG;
  } catch (const gmsfem::NumericError& e) {
    ctx->error = e.what();
    return GMSFEM_ERR_NUMERIC;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    return GMSFEM_ERR_NUMERIC;
  }
}

} // namespace

extern "C" {

gmsfem_ctx* gmsfem_create(void) { return new (std::nothrow) gmsfem_ctx; }

void gmsfem_destroy(gmsfem_ctx* ctx) { delete ctx; }

int gmsfem_load_config(gmsfem_ctx* ctx, const char* path) {
  return guarded(ctx, [&] {
    if (!path) throw gmsfem::ConfigError("config path is null");
    ctx->cfg = gmsfem::parse_config_file(path);
    ctx->configured = true;
    return GMSFEM_OK;
  });
}

int gmsfem_parse_config(gmsfem_ctx* ctx, const char* text) {
  return guarded(ctx, [&] {
    if (!text) throw gmsfem::ConfigError("config text is null");
    ctx->cfg = gmsfem::parse_config_text(text);
    ctx->configured = true;
    return GMSFEM_OK;
  });
}

int gmsfem_set_option(gmsfem_ctx* ctx, const char* key, const char* value) {
  return guarded(ctx, [&] {
    if (!ctx->configured)
      throw gmsfem::ConfigError("no configuration loaded");
    if (!key || !value)
      throw gmsfem::ConfigError("option key/value is null");
    const std::string k = key;
    if (k == "out") {
      ctx->cfg.out_dir = value;
    } else if (k == "workers") {
      char* end = nullptr;
      const long w = std::strtol(value, &end, 10);
      if (!end || *end != '\0' || w < 1)
        throw gmsfem::ConfigError("workers must be a positive integer");
      ctx->cfg.workers = static_cast<int>(w);
    } else if (k == "verbose") {
      ctx->cfg.verbose = std::string(value) != "0";
    } else {
      throw gmsfem::ConfigError("unknown option '" + k + "'");
    }
    return GMSFEM_OK;
  });
}

int gmsfem_run(gmsfem_ctx* ctx, const char* command) {
  return guarded(ctx, [&] {
    if (!ctx->configured)
      throw gmsfem::ConfigError("no configuration loaded");
    if (!command) throw gmsfem::ConfigError("command is null");
    gmsfem::run_command(command, ctx->cfg);
    return GMSFEM_OK;
  });
}

const char* gmsfem_last_error(const gmsfem_ctx* ctx) {
  return ctx ? ctx->error.c_str() : "null context";
}

} // extern "C"
