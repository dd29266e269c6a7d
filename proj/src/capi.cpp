#include "dynlab.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "dynlab/bitwindow.hpp"
#include "dynlab/error.hpp"
#include "dynlab/experiment.hpp"
#include "dynlab/intfam.hpp"
#include "dynlab/systems.hpp"

using dynlab::BitWindow;
using dynlab::Error;
using dynlab::ErrorCode;
using nlohmann::json;

struct dynlab_system {
  std::shared_ptr<const dynlab::systems::System> impl;
};

struct dynlab_setgen {
  dynlab::intfam::SetGeneratorPtr impl;
};

struct dynlab_window {
  BitWindow impl;
};

namespace {

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) {
    std::memcpy(out, s.c_str(), s.size() + 1);
  }
  return out;
}

dynlab_status status_of(const Error& e) {
  switch (e.code()) {
  case ErrorCode::invalid_argument:
    return DYNLAB_ERR_INVALID_ARGUMENT;
  case ErrorCode::parse:
    return DYNLAB_ERR_PARSE;
  case ErrorCode::unsupported:
    return DYNLAB_ERR_UNSUPPORTED;
  case ErrorCode::io:
    return DYNLAB_ERR_IO;
  case ErrorCode::internal:
    return DYNLAB_ERR_INTERNAL;
  }
  return DYNLAB_ERR_INTERNAL;
}

template <typename Fn>
dynlab_status guarded(char** error_message, Fn&& fn) {
  if (error_message) {
    *error_message = nullptr;
  }
  try {
    fn();
    return DYNLAB_OK;
  } catch (const Error& e) {
    if (error_message) {
      *error_message = copy_string(e.what());
    }
    return status_of(e);
  } catch (const json::exception& e) {
    if (error_message) {
      *error_message = copy_string(e.what());
    }
    return DYNLAB_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    return DYNLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    if (error_message) {
      *error_message = copy_string(e.what());
    }
    return DYNLAB_ERR_INTERNAL;
  }
}

json parse_json(const char* text, const char* what) {
  if (!text) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " must not be null");
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::parse, std::string("malformed JSON in ") + what);
  }
  return j;
}

} // namespace

extern "C" {

const char* dynlab_version(void) { return dynlab::experiment::kToolVersion; }

void dynlab_string_free(char* s) { std::free(s); }

dynlab_status dynlab_system_create(const char* spec_json, dynlab_system** out,
                                   char** error_message) {
  return guarded(error_message, [&] {
    if (!out) {
      throw Error(ErrorCode::invalid_argument, "out handle must not be null");
    }
    auto sys = std::make_shared<const dynlab::systems::System>(
        dynlab::systems::System::from_json(parse_json(spec_json, "system spec")));
    *out = new dynlab_system{std::move(sys)};
  });
}

void dynlab_system_destroy(dynlab_system* sys) { delete sys; }

int dynlab_system_minimal_by_construction(const dynlab_system* sys) {
  return sys && sys->impl->minimal_by_construction() ? 1 : 0;
}

uint64_t dynlab_system_period_hint(const dynlab_system* sys) {
  if (!sys) {
    return 0;
  }
  return sys->impl->period_hint().value_or(0);
}

dynlab_status dynlab_return_set(const dynlab_system* sys, const char* point_json,
                                const char* open_set_json, uint64_t horizon,
                                dynlab_window** out, char** error_message) {
  return guarded(error_message, [&] {
    if (!sys || !out) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    const auto point = dynlab::systems::PointRef::from_json(
        parse_json(point_json, "point spec"));
    const auto open_set = dynlab::systems::OpenSetSpec::from_json(
        parse_json(open_set_json, "open set spec"));
    *out = new dynlab_window{
        dynlab::systems::return_set(*sys->impl, point, open_set, horizon)};
  });
}

dynlab_status dynlab_transfer_set(const dynlab_system* sys_x,
                                  const dynlab_system* sys_y, const char* x_json,
                                  const char* y_json, const char* u_json,
                                  const char* v_json, uint64_t horizon,
                                  dynlab_window** out, char** error_message) {
  return guarded(error_message, [&] {
    if (!sys_x || !sys_y || !out) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    const auto x =
        dynlab::systems::PointRef::from_json(parse_json(x_json, "x spec"));
    const auto y =
        dynlab::systems::PointRef::from_json(parse_json(y_json, "y spec"));
    const auto u =
        dynlab::systems::OpenSetSpec::from_json(parse_json(u_json, "U spec"));
    const auto v =
        dynlab::systems::OpenSetSpec::from_json(parse_json(v_json, "V spec"));
    *out = new dynlab_window{dynlab::systems::transfer_set(
        *sys_x->impl, *sys_y->impl, x, y, u, v, horizon)};
  });
}

dynlab_status dynlab_setgen_create(const char* spec_json, dynlab_setgen** out,
                                   char** error_message) {
  return guarded(error_message, [&] {
    if (!out) {
      throw Error(ErrorCode::invalid_argument, "out handle must not be null");
    }
    *out = new dynlab_setgen{dynlab::intfam::SetGenerator::from_json(
        parse_json(spec_json, "set spec"))};
  });
}

void dynlab_setgen_destroy(dynlab_setgen* gen) { delete gen; }

dynlab_status dynlab_setgen_window(const dynlab_setgen* gen, uint64_t horizon,
                                   dynlab_window** out, char** error_message) {
  return guarded(error_message, [&] {
    if (!gen || !out) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    *out = new dynlab_window{gen->impl->window(horizon)};
  });
}

uint64_t dynlab_window_horizon(const dynlab_window* w) {
  return w ? w->impl.horizon() : 0;
}

int dynlab_window_test(const dynlab_window* w, uint64_t n) {
  return w && w->impl.test(n) ? 1 : 0;
}

uint64_t dynlab_window_count(const dynlab_window* w) {
  return w ? w->impl.count() : 0;
}

void dynlab_window_destroy(dynlab_window* w) { delete w; }

dynlab_status dynlab_window_to_text(const dynlab_window* w, char** out) {
  return guarded(nullptr, [&] {
    if (!w || !out) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    *out = copy_string(w->impl.to_text());
  });
}

dynlab_status dynlab_window_from_text(const char* text, dynlab_window** out,
                                      char** error_message) {
  return guarded(error_message, [&] {
    if (!text || !out) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    *out = new dynlab_window{BitWindow::from_text(text)};
  });
}

dynlab_status dynlab_check_family(const dynlab_window* w, const char* claim_json,
                                  char** verdict_json, char** error_message) {
  return guarded(error_message, [&] {
    if (!w || !verdict_json) {
      throw Error(ErrorCode::invalid_argument, "null handle");
    }
    const json cj = parse_json(claim_json, "claim");
    dynlab::intfam::FamilyClaim claim;
    claim.family = cj.at("family").get<std::string>();
    claim.parameters = cj.value("parameters", json::object());
    claim.horizon = w->impl.horizon();
    const auto verdict = dynlab::intfam::check_claim(w->impl, claim);
    *verdict_json = copy_string(verdict.to_json().dump());
  });
}

dynlab_status dynlab_run_experiment(const char* config_json, char** report_json,
                                    char** error_message) {
  return guarded(error_message, [&] {
    if (!report_json) {
      throw Error(ErrorCode::invalid_argument, "null out pointer");
    }
    const json report =
        dynlab::experiment::run_experiment(parse_json(config_json, "config"));
    *report_json = copy_string(report.dump(2));
  });
}

int dynlab_report_exit_code(const char* report_json) {
  try {
    return dynlab::experiment::report_exit_code(
        parse_json(report_json, "report"));
  } catch (...) {
    return -1;
  }
}

dynlab_status dynlab_report_to_csv(const char* report_json, char** csv_out,
                                   char** error_message) {
  return guarded(error_message, [&] {
    if (!csv_out) {
      throw Error(ErrorCode::invalid_argument, "null out pointer");
    }
    *csv_out = copy_string(
        dynlab::experiment::report_to_csv(parse_json(report_json, "report")));
  });
}

} // extern "C"
