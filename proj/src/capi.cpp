#include "qvibe/qvibe.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "qvibe/commands.hpp"
#include "qvibe/error.hpp"

struct qvibe_scenario {
  qvibe::ScenarioConfig config;
};

struct qvibe_stream {
  qvibe::TimestampStream stream;
};

namespace {

thread_local std::string last_error;

qvibe_status fail(qvibe_status status, const std::string& message) {
  last_error = message;
  return status;
}

/// Runs fn and maps exceptions onto status codes.
template <class Fn>
qvibe_status guarded(Fn&& fn) {
  try {
    fn();
    return QVIBE_OK;
  } catch (const qvibe::Error& e) {
    switch (e.kind()) {
      case qvibe::ErrorKind::config: return fail(QVIBE_ERR_CONFIG, e.what());
      case qvibe::ErrorKind::io: return fail(QVIBE_ERR_IO, e.what());
      case qvibe::ErrorKind::analysis: return fail(QVIBE_ERR_ANALYSIS, e.what());
    }
    return fail(QVIBE_ERR_INTERNAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QVIBE_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QVIBE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QVIBE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QVIBE_ERR_INTERNAL, "unknown error");
  }
}

void copy_summary(const std::string& text, char* summary, size_t capacity, size_t* needed) {
  if (needed) {
    *needed = text.size() + 1;
  }
  if (summary && capacity > 0) {
    const size_t n = std::min(text.size(), capacity - 1);
    std::memcpy(summary, text.data(), n);
    summary[n] = '\0';
  }
}

template <class Fn>
qvibe_status run_command(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed, Fn&& fn) {
  if (!scenario) {
    return fail(QVIBE_ERR_USAGE, "null scenario handle");
  }
  return guarded([&] { copy_summary(fn(scenario->config).summary, summary, capacity, needed); });
}

}  // namespace

extern "C" {

const char* qvibe_version(void) { return "1.0.0"; }

const char* qvibe_last_error(void) { return last_error.c_str(); }

const char* qvibe_status_name(qvibe_status status) {
  switch (status) {
    case QVIBE_OK: return "ok";
    case QVIBE_ERR_USAGE: return "usage error";
    case QVIBE_ERR_CONFIG: return "configuration error";
    case QVIBE_ERR_IO: return "I/O error";
    case QVIBE_ERR_ANALYSIS: return "analysis error";
    case QVIBE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

qvibe_status qvibe_scenario_new(qvibe_scenario** out) {
  if (!out) {
    return fail(QVIBE_ERR_USAGE, "null output pointer");
  }
  return guarded([&] { *out = new qvibe_scenario{}; });
}

qvibe_status qvibe_scenario_load(const char* path, qvibe_scenario** out) {
  if (!path || !out) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  return guarded([&] { *out = new qvibe_scenario{qvibe::load_scenario(path)}; });
}

qvibe_status qvibe_scenario_parse(const char* text, qvibe_scenario** out) {
  if (!text || !out) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  return guarded([&] { *out = new qvibe_scenario{qvibe::parse_scenario(text)}; });
}

qvibe_status qvibe_scenario_set(qvibe_scenario* scenario, const char* key, const char* value) {
  if (!scenario || !key || !value) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  return guarded([&] { qvibe::apply_setting(scenario->config, key, value); });
}

qvibe_status qvibe_scenario_validate(const qvibe_scenario* scenario) {
  if (!scenario) {
    return fail(QVIBE_ERR_USAGE, "null scenario handle");
  }
  return guarded([&] { scenario->config.validate(); });
}

void qvibe_scenario_free(qvibe_scenario* scenario) { delete scenario; }

qvibe_status qvibe_run_simulate(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed) {
  return run_command(scenario, summary, capacity, needed, [](const auto& c) { return qvibe::cmd_simulate(c); });
}

qvibe_status qvibe_run_estimate(const qvibe_scenario* scenario, const char* first_path, const char* second_path,
                                char* summary, size_t capacity, size_t* needed) {
  if (!first_path || !second_path) {
    return fail(QVIBE_ERR_USAGE, "null stream path");
  }
  return run_command(scenario, summary, capacity, needed,
                     [&](const auto& c) { return qvibe::cmd_estimate(c, first_path, second_path); });
}

qvibe_status qvibe_run_trials(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed) {
  return run_command(scenario, summary, capacity, needed, [](const auto& c) { return qvibe::cmd_trials(c); });
}

qvibe_status qvibe_run_sweep(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed) {
  return run_command(scenario, summary, capacity, needed, [](const auto& c) { return qvibe::cmd_sweep(c); });
}

qvibe_status qvibe_run_advantage(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed) {
  return run_command(scenario, summary, capacity, needed, [](const auto& c) { return qvibe::cmd_advantage(c); });
}

qvibe_status qvibe_run_qcrb(const qvibe_scenario* scenario, char* summary, size_t capacity, size_t* needed) {
  return run_command(scenario, summary, capacity, needed, [](const auto& c) { return qvibe::cmd_qcrb(c); });
}

qvibe_status qvibe_qcrb_delay_std(double n_pairs, double detuning_hz, double bandwidth_hz, double* out_seconds) {
  if (!out_seconds) {
    return fail(QVIBE_ERR_USAGE, "null output pointer");
  }
  return guarded([&] {
    qvibe::PhotonPairSpec pair;
    pair.delta_omega = qvibe::two_pi * detuning_hz;
    pair.sigma = qvibe::two_pi * bandwidth_hz;
    *out_seconds = qvibe::qcrb_delay_std({n_pairs, pair});
  });
}

qvibe_status qvibe_stream_read(const char* path, qvibe_stream** out) {
  if (!path || !out) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  return guarded([&] { *out = new qvibe_stream{qvibe::read_stream(path)}; });
}

qvibe_status qvibe_stream_write(const qvibe_stream* stream, const char* path, int binary) {
  if (!stream || !path) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  return guarded([&] {
    qvibe::write_stream(stream->stream, path, binary ? qvibe::StreamFormat::binary : qvibe::StreamFormat::text);
  });
}

qvibe_status qvibe_stream_count(const qvibe_stream* stream, size_t* out) {
  if (!stream || !out) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  *out = stream->stream.size();
  return QVIBE_OK;
}

qvibe_status qvibe_stream_exposure(const qvibe_stream* stream, double* out_seconds) {
  if (!stream || !out_seconds) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  *out_seconds = stream->stream.t_exp;
  return QVIBE_OK;
}

qvibe_status qvibe_stream_tick_ps(const qvibe_stream* stream, uint64_t* out) {
  if (!stream || !out) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  *out = stream->stream.tick_ps;
  return QVIBE_OK;
}

qvibe_status qvibe_stream_project(const qvibe_stream* stream, double frequency_hz, qvibe_window window,
                                  double* out_re, double* out_im) {
  if (!stream || !out_re || !out_im) {
    return fail(QVIBE_ERR_USAGE, "null argument");
  }
  if (window != QVIBE_WINDOW_HANN && window != QVIBE_WINDOW_RECTANGULAR) {
    return fail(QVIBE_ERR_USAGE, "unknown window");
  }
  return guarded([&] {
    const auto y = qvibe::project_timestamps(
        stream->stream, frequency_hz, window == QVIBE_WINDOW_HANN ? qvibe::Window::hann : qvibe::Window::rectangular);
    *out_re = y.real();
    *out_im = y.imag();
  });
}

void qvibe_stream_free(qvibe_stream* stream) { delete stream; }

}  // extern "C"
