#pragma once

#include <cstdint>
#include <optional>

#include "docio.hpp"

namespace cantordist {

// Flag-level overrides applied on top of the config document; unset fields
// keep the config's (or the built-in) values.
struct CliOverrides {
    std::optional<ArithMode> mode;
    std::optional<unsigned> max_depth;
    std::optional<std::uint64_t> max_tasks;
    std::optional<unsigned> threads;  // recorded in the report; the engine is single-threaded
    std::optional<std::uint64_t> seed;  // recorded in the report; results never depend on it
};

// One finished run: the full report document plus the process exit code.
// Exit codes: 0 success, 2 search budget exhausted, 3 verification failed,
// 4 malformed config or domain input, 1 internal fault.
struct CmdResult {
    Doc report;
    int exit_code = 0;
};

int exit_code_for(Errc code);

// Every command returns a report rather than throwing: domain failures are
// folded into the report's status section and the exit code. Reports carry
// tool identity, the config hash, the effective mode, the result, and a
// status section; wall-clock timing sits in a final "timing" section that
// report_core strips, and everything outside it is byte-deterministic for
// a fixed config.
CmdResult cmd_certify(const Doc& config, const CliOverrides& o = {});
CmdResult cmd_partner(const Doc& config, const CliOverrides& o = {});
CmdResult cmd_chain(const Doc& config, const CliOverrides& o = {});
CmdResult cmd_tree(const Doc& config, const CliOverrides& o = {});
CmdResult cmd_metrics(const Doc& config, const CliOverrides& o = {});
CmdResult cmd_sample(const Doc& config, const CliOverrides& o = {});

// Re-checks the certificate carried by `doc` in exact arithmetic, whatever
// mode built it. Accepts a bare cover/chain/tree certificate, a partner
// result, or a report from any command above (the embedded payload is
// discovered inside "result").
CmdResult cmd_verify(const Doc& doc);

// Dispatch by subcommand name; "verify" routes to cmd_verify.
CmdResult run_command(const std::string& command, const Doc& config, const CliOverrides& o = {});

// The deterministic part of a report: a copy without the "timing" section.
Doc report_core(const Doc& report);

}  // namespace cantordist
