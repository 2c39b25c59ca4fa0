// Command-line front end. Everything flows through the C API in
// include/cantordist/capi.h: the CLI parses flags, forwards the config, and
// relays the report text and exit code.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cantordist/capi.h"

namespace {

struct Flags {
    std::string config;
    std::string document;  // verify's positional form
    std::string mode;
    std::uint64_t max_depth = 0;
    std::uint64_t max_tasks = 0;
    std::uint64_t threads = 0;
    std::uint64_t seed = 0;
    std::string out;
};

// The C API takes overrides as a tiny JSON object; only flags the user set
// are forwarded.
std::string overrides_json(const CLI::App& sub, const Flags& f) {
    std::string body;
    auto add = [&body](const std::string& piece) {
        if (!body.empty()) body += ", ";
        body += piece;
    };
    if (sub.count("--mode")) add("\"mode\": \"" + f.mode + "\"");
    if (sub.count("--max-depth")) add("\"max_depth\": " + std::to_string(f.max_depth));
    if (sub.count("--max-tasks")) add("\"max_tasks\": " + std::to_string(f.max_tasks));
    if (sub.count("--threads")) add("\"threads\": " + std::to_string(f.threads));
    if (sub.count("--seed")) add("\"seed\": " + std::to_string(f.seed));
    return "{" + body + "}";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cantordist: certified pinned-distance covers over Cantor sets"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("cantordist ") + cd_version());

    Flags f;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"certify", "build and verify one coverage certificate"},
        {"partner", "construct a fat partner set with a certified target interval"},
        {"chain", "certify a chain of pinned links over a base set"},
        {"tree", "certify a distance-labeled tree over a base set"},
        {"metrics", "report dimension and thickness of a set"},
        {"sample", "sample point clouds, pinned distance sets, covers, realizations"},
        {"verify", "recheck a stored certificate or report in exact arithmetic"},
    };

    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        CLI::Option* config = sub->add_option("--config", f.config, "config document (JSON)");
        if (name == "verify")
            sub->add_option("document", f.document, "certificate or report file to recheck");
        else
            config->required();
        sub->add_option("--mode", f.mode, "arithmetic mode")
            ->check(CLI::IsMember({"exact", "fast"}));
        sub->add_option("--max-depth", f.max_depth, "deepest cell pair the search may open");
        sub->add_option("--max-tasks", f.max_tasks, "certificate node budget");
        sub->add_option("--threads", f.threads, "worker count (recorded; engine is sequential)");
        sub->add_option("--seed", f.seed, "seed for randomized sampling inputs");
        sub->add_option("--out", f.out, "also write the report to this file");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    std::string path = f.config;
    if (sub->get_name() == "verify") {
        if (!f.document.empty()) path = f.document;
        if (path.empty()) {
            std::cerr << "verify needs a document: pass a file argument or --config\n";
            return 4;
        }
    }

    cd_report* report = nullptr;
    cd_status status =
        cd_run_file(sub->get_name().c_str(), path.c_str(), overrides_json(*sub, f).c_str(), &report);
    if (status != CD_OK) {
        std::cerr << "cantordist: " << cd_status_name(status) << ": " << cd_last_error() << "\n";
        return cd_status_exit_code(status);
    }

    const std::string text = cd_report_text(report);
    std::cout << text;
    int code = cd_report_exit_code(report);
    cd_report_free(report);

    if (!f.out.empty()) {
        std::ofstream out(f.out, std::ios::binary);
        if (!out || !(out << text).flush()) {
            std::cerr << "cantordist: cannot write report to '" << f.out << "'\n";
            return 4;
        }
    }
    return code;
}
