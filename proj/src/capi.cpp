#include "cantordist/capi.h"

#include <exception>
#include <string>

#include "commands.hpp"

using namespace cantordist;

struct cd_report {
    std::string text;
    int exit_code = 0;
};

namespace {

thread_local std::string g_last_error;

cd_status mirror(Errc c) { return static_cast<cd_status>(static_cast<int>(c) + 1); }

cd_status set_error(cd_status s, const std::string& message) {
    g_last_error = message;
    return s;
}

CliOverrides overrides_from_json(const char* overrides_json) {
    CliOverrides o;
    if (!overrides_json || !*overrides_json) return o;
    Doc d = parse_text(overrides_json);
    if (!d.is_object()) fail(Errc::ConfigError, "overrides must be a JSON object");
    for (auto it = d.begin(); it != d.end(); ++it) {
        const std::string& k = it.key();
        if (k == "mode")
            o.mode = mode_from_string(doc_str(d, "mode"));
        else if (k == "max_depth")
            o.max_depth = static_cast<unsigned>(doc_uint(d, "max_depth"));
        else if (k == "max_tasks")
            o.max_tasks = doc_uint(d, "max_tasks");
        else if (k == "threads")
            o.threads = static_cast<unsigned>(doc_uint(d, "threads"));
        else if (k == "seed")
            o.seed = doc_uint(d, "seed");
        else
            fail(Errc::ConfigError, "unknown override '" + k + "'");
    }
    return o;
}

template <class LoadConfig>
cd_status run_guarded(const char* command, const char* overrides_json, cd_report** out,
                      LoadConfig&& load_config) {
    try {
        CliOverrides o = overrides_from_json(overrides_json);
        CmdResult res = run_command(command, load_config(), o);
        *out = new cd_report{canonical_text(res.report), res.exit_code};
        return CD_OK;
    } catch (const DomainError& e) {
        return set_error(mirror(e.code()), e.what());
    } catch (const std::exception& e) {
        return set_error(CD_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(CD_ERR_INTERNAL, "unidentified failure");
    }
}

}  // namespace

extern "C" {

const char* cd_status_name(cd_status s) {
    if (s == CD_OK) return "OK";
    if (s == CD_ERR_BAD_ARGUMENT) return "BadArgument";
    int v = static_cast<int>(s) - 1;
    if (v >= static_cast<int>(Errc::InvalidModel) && v <= static_cast<int>(Errc::Internal))
        return errc_name(static_cast<Errc>(v));
    return "Unknown";
}

int cd_status_exit_code(cd_status s) {
    if (s == CD_OK) return 0;
    if (s == CD_ERR_BAD_ARGUMENT) return 4;
    int v = static_cast<int>(s) - 1;
    if (v >= static_cast<int>(Errc::InvalidModel) && v <= static_cast<int>(Errc::Internal))
        return exit_code_for(static_cast<Errc>(v));
    return 1;
}

cd_status cd_run(const char* command, const char* config_json, const char* overrides_json,
                 cd_report** out) {
    if (out) *out = nullptr;
    if (!command || !*command || !config_json || !out)
        return set_error(CD_ERR_BAD_ARGUMENT, "cd_run needs a command, config text, and out pointer");
    return run_guarded(command, overrides_json, out,
                       [config_json] { return parse_text(config_json); });
}

cd_status cd_run_file(const char* command, const char* config_path, const char* overrides_json,
                      cd_report** out) {
    if (out) *out = nullptr;
    if (!command || !*command || !config_path || !out)
        return set_error(CD_ERR_BAD_ARGUMENT,
                         "cd_run_file needs a command, config path, and out pointer");
    return run_guarded(command, overrides_json, out,
                       [config_path] { return read_doc(config_path); });
}

const char* cd_report_text(const cd_report* r) { return r ? r->text.c_str() : ""; }

int cd_report_exit_code(const cd_report* r) { return r ? r->exit_code : 4; }

void cd_report_free(cd_report* r) { delete r; }

const char* cd_last_error(void) { return g_last_error.c_str(); }

const char* cd_version(void) { return "0.1.0"; }

}  // extern "C"
