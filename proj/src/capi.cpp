#include "hardy/hardy.h"

#include <new>
#include <string>

#include "driver.hpp"
#include "report.hpp"

struct hardy_analysis {
  int status = hardy::kExitInternal;
  std::string output;
  std::string error;
};

namespace {

thread_local std::string g_last_error;

const char* set_last_error(const char* msg) {
  g_last_error = msg;
  return g_last_error.c_str();
}

}  // namespace

extern "C" {

hardy_analysis* hardy_run(const char* config_json, const char* mode) {
  g_last_error.clear();
  auto* handle = new (std::nothrow) hardy_analysis();
  if (handle == nullptr) {
    set_last_error("allocation failure");
    return nullptr;
  }
  try {
    hardy::RunOutput run = hardy::run_from_json(
        config_json == nullptr ? std::string() : std::string(config_json),
        mode == nullptr ? std::string() : std::string(mode));
    handle->status = run.status;
    handle->output = std::move(run.output);
    handle->error = std::move(run.error);
  } catch (const std::exception& e) {
    handle->status = hardy::kExitInternal;
    handle->error = std::string("internal error: ") + e.what();
  } catch (...) {
    handle->status = hardy::kExitInternal;
    handle->error = "internal error";
  }
  return handle;
}

int hardy_result_status(const hardy_analysis* a) {
  if (a == nullptr) {
    set_last_error("hardy_result_status: NULL handle");
    return hardy::kExitInternal;
  }
  return a->status;
}

int hardy_result_ok(const hardy_analysis* a) {
  return hardy_result_status(a) == hardy::kExitOk ? 1 : 0;
}

const char* hardy_result_output(const hardy_analysis* a) {
  if (a == nullptr) {
    set_last_error("hardy_result_output: NULL handle");
    return "";
  }
  return a->output.c_str();
}

const char* hardy_result_error(const hardy_analysis* a) {
  if (a == nullptr) {
    set_last_error("hardy_result_error: NULL handle");
    return "";
  }
  return a->error.c_str();
}

void hardy_free(hardy_analysis* a) { delete a; }

const char* hardy_last_error(void) { return g_last_error.c_str(); }

const char* hardy_version(void) { return hardy::kToolVersion; }

}  // extern "C"
