#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "sessions/cli.hpp"
#include "sessions/infer.hpp"
#include "sessions/oracle.hpp"
#include "sessions/runtime.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {

class InputError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// `name :: signature` lines; blank lines and `--` comments are skipped.
/// An indented line continues the previous signature.
std::vector<std::pair<std::string, std::string>> read_expectations(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const bool indented = !line.empty() && (line[0] == ' ' || line[0] == '\t');
        line = trim(line);
        if (line.empty() || line.starts_with("--")) continue;
        if (indented && !out.empty()) {
            out.back().second += " " + line;
            continue;
        }
        const auto sep = line.find("::");
        if (sep == std::string::npos) throw InputError("expectation line without '::': " + line);
        out.emplace_back(trim(line.substr(0, sep)), trim(line.substr(sep + 2)));
    }
    return out;
}

SessionType close_type(const SessionType& u) {
    using K = SessionKind;
    switch (u.kind()) {
    case K::UVar: return SessionType::end();
    case K::Send: return SessionType::send(u.value(), close_type(u.cont()));
    case K::Recv: return SessionType::recv(u.value(), close_type(u.cont()));
    case K::Rec: return SessionType::rec(u.level(), close_type(u.body()));
    case K::End:
    case K::Bot:
    case K::Close:
    case K::Var: return u;
    default: return SessionType::binary(u.kind(), close_type(u.left()), close_type(u.right()));
    }
}

SessionEnv parse_env(const std::string& text) {
    SessionEnv env;
    VarScope scope;
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    for (const auto& part : parts) {
        if (trim(part).empty()) continue;
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw InputError("environment entry without ':': " + part);
        env.insert_or_assign(trim(part.substr(0, colon)), parse_type(part.substr(colon + 1), scope));
    }
    return env;
}

std::string where(const std::string& path, const std::exception& e) { return path + ":" + e.what(); }

struct Flags {
    std::string path;
    std::string format = "pretty";
    std::string expect;
    std::uint64_t seed = 0;
    std::string script;
    bool unchecked = false;
    std::size_t budget = 10000;
    bool trace = false;
    std::string entry;
    std::string session;
    std::string env;
    std::string type_text;
};

int cmd_infer(const Flags& f, std::ostream& out, std::ostream& err) {
    Program p;
    try {
        p = parse(read_file(f.path));
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitInput;
    }
    InferenceResult r;
    try {
        r = infer_program(p);
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitTypeError;
    }
    if (f.format == "structured")
        out << structured_signatures(r) << "\n";
    else
        for (const auto& name : r.order) out << name << " :: " << print_signature(r.at(name)) << "\n";
    if (f.expect.empty()) return ExitOk;
    std::vector<std::pair<std::string, std::string>> expected;
    try {
        expected = read_expectations(read_file(f.expect));
    } catch (const Error& e) {
        err << where(f.expect, e) << "\n";
        return ExitInput;
    }
    int status = ExitOk;
    for (const auto& [name, text] : expected) {
        auto it = r.signatures.find(name);
        if (it == r.signatures.end()) {
            err << "expected session " << name << " is missing\n";
            status = ExitMismatch;
            continue;
        }
        std::string want;
        try {
            want = canonical_signature(text);
        } catch (const Error& e) {
            err << where(f.expect, e) << "\n";
            return ExitInput;
        }
        const std::string got = print_signature(it->second);
        if (want != got) {
            err << name << ": expected " << want << "\n" << std::string(name.size(), ' ') << "  inferred " << got << "\n";
            status = ExitMismatch;
        }
    }
    return status;
}

std::vector<std::string> read_script(const std::string& path) {
    std::vector<std::string> lines;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err) {
    Program p;
    RunOptions o;
    try {
        p = parse(read_file(f.path));
        if (!f.script.empty()) o.script = read_script(f.script);
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitInput;
    }
    o.seed = f.seed;
    o.unchecked = f.unchecked;
    o.step_budget = f.budget;
    o.trace = f.trace;
    o.entry = f.entry;
    RunResult r;
    try {
        r = run(p, o);
    } catch (const ScriptExhausted& e) {
        err << where(f.path, e) << "\n";
        return ExitInput;
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitTypeError;
    }
    for (const auto& line : r.trace) err << line << "\n";
    out << r.log();
    switch (r.status) {
    case RunStatus::Completed: return ExitOk;
    case RunStatus::Error: return ExitRuntimeError;
    default: return ExitStalled;
    }
}

int cmd_dual(const Flags& f, std::ostream& out, std::ostream& err) {
    SessionType u;
    try {
        u = parse_type(f.type_text);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return ExitInput;
    }
    try {
        out << print_type(dual(u)) << "\n";
    } catch (const Error& e) {
        err << e.what() << "\n";
        return ExitTypeError;
    }
    return ExitOk;
}

int cmd_elaborate(const Flags& f, std::ostream& out, std::ostream& err) {
    Program p;
    try {
        p = parse(read_file(f.path));
        resolve_names(p);
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitInput;
    }
    int status = ExitOk;
    for (const auto& d : p.sessions) {
        if (!f.session.empty() && d.name != f.session) continue;
        try {
            out << d.name << " = " << print_process(*elaborate(d, p)) << "\n";
        } catch (const OutsideFragment& e) {
            if (!f.session.empty()) {
                err << where(f.path, e) << "\n";
                status = ExitTypeError;
            }
        }
    }
    return status;
}

int cmd_check(const Flags& f, std::ostream& out, std::ostream& err) {
    Program p;
    SessionEnv delta;
    try {
        p = parse(read_file(f.path));
        resolve_names(p);
        if (!f.env.empty()) delta = parse_env(f.env);
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitInput;
    }
    const std::string name = f.session.empty() ? p.entry : f.session;
    const SessionDecl* d = p.find_session(name);
    if (!d) {
        err << f.path << ": no session " << name << "\n";
        return ExitInput;
    }
    Sorting gamma;
    try {
        std::optional<SessionSignature> sig;
        std::size_t ci = 0;
        for (const auto& prm : d->params) {
            if (!prm.is_channel()) {
                gamma.insert_or_assign(prm.name, *prm.type);
                continue;
            }
            if (!f.env.empty()) continue;
            if (!sig) sig = infer_session(p, name);
            delta.insert_or_assign(prm.name, close_type(sig->pre.entries.at(ci++)));
        }
        CheckResult r = check(gamma, *elaborate(*d, p), delta, data_table(p));
        if (!r.ok) {
            err << "rejected: " << r.reason << "\n";
            return ExitTypeError;
        }
        out << print_derivation(r.derivation);
    } catch (const Error& e) {
        err << where(f.path, e) << "\n";
        return ExitTypeError;
    }
    return ExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Session type inference, checking and execution for the session DSL"};
    app.require_subcommand(1);
    Flags f;

    auto* infer = app.add_subcommand("infer", "Print the inferred signature of every session");
    infer->add_option("file", f.path)->required();
    infer->add_option("--format", f.format)->check(CLI::IsMember({"pretty", "structured"}));
    infer->add_option("--expect", f.expect, "File of `name :: signature` lines to compare against");

    auto* check_cmd = app.add_subcommand("check", "Check a session's elaboration against the process typing rules");
    check_cmd->add_option("file", f.path)->required();
    check_cmd->add_option("--session", f.session, "Session to check (default: the entry)");
    check_cmd->add_option("--env", f.env, "Channel environment, e.g. \"c: Bot\" (default: the inferred pre row)");

    auto* run_cmd = app.add_subcommand("run", "Execute the entry session");
    run_cmd->add_option("file", f.path)->required();
    run_cmd->add_option("--seed", f.seed);
    run_cmd->add_option("--script", f.script, "Lines returned by readline");
    run_cmd->add_flag("--unchecked", f.unchecked, "Run without type checking");
    run_cmd->add_option("--step-budget", f.budget);
    run_cmd->add_flag("--trace", f.trace, "Print each step to stderr");
    run_cmd->add_option("--entry", f.entry);

    auto* dual_cmd = app.add_subcommand("dual", "Print the dual of a session type");
    dual_cmd->add_option("type", f.type_text)->required();

    auto* elab = app.add_subcommand("elaborate", "Print the process term of each session");
    elab->add_option("file", f.path)->required();
    elab->add_option("--session", f.session);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitOk : ExitInput;
    }
    if (infer->parsed()) return cmd_infer(f, out, err);
    if (check_cmd->parsed()) return cmd_check(f, out, err);
    if (run_cmd->parsed()) return cmd_run(f, out, err);
    if (dual_cmd->parsed()) return cmd_dual(f, out, err);
    return cmd_elaborate(f, out, err);
}

} // namespace sessions
