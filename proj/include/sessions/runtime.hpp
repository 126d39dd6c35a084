#ifndef SESSIONS_RUNTIME_HPP
#define SESSIONS_RUNTIME_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sessions/ast.hpp"

namespace sessions {

class ScriptExhausted : public Error {
public:
    using Error::Error;
};

class UnknownService : public Error {
public:
    using Error::Error;
};

/// Runtime values.
struct Value {
    enum class Kind { Int, Bool, Str, Unit, List, Tagged } kind = Kind::Unit;
    std::int64_t i = 0;
    bool b = false;
    std::string s; // string contents or constructor tag
    std::vector<Value> items;

    friend bool operator==(const Value&, const Value&) = default;
};

/// `show`-style rendering; top-level strings are printed raw.
std::string show_value(const Value& v, bool top = true);

enum class ErrorClass { NonRedexPair, ThreeOrMore };

struct ErrorReport {
    std::string channel;
    std::vector<std::string> actions; // pending action of each engaged process
    ErrorClass classification = ErrorClass::NonRedexPair;
    std::size_t step = 0;
};

const char* class_name(ErrorClass c);

struct Effect {
    std::size_t step = 0;
    std::string text; // serialized line
};

/// A throw/catch rendezvous: which process handed which channel to whom.
struct PassRecord {
    std::size_t step = 0;
    std::string channel;
    unsigned thrower = 0, catcher = 0;
};

enum class RunStatus { Completed, Error, Deadlock, BudgetExhausted };

struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::vector<Effect> effects;
    std::optional<ErrorReport> error;
    std::size_t steps = 0;
    std::vector<PassRecord> passes;
    std::vector<std::string> trace;

    /// Line-oriented log: PRINT/READ/CONNECT lines, then ERROR, DEADLOCK or
    /// BUDGET_EXHAUSTED when the run did not complete.
    std::string log() const;
};

struct RunOptions {
    std::uint64_t seed = 0;
    std::vector<std::string> script; // readline input
    bool unchecked = false;
    std::size_t step_budget = 10000;
    bool trace = false;
    std::string entry; // empty: the program's entry
};

/// Executes the entry session. Unless `unchecked`, the program must infer and
/// the entry be runnable; the corresponding errors propagate.
RunResult run(const Program& program, const RunOptions& options = {});

/// Two pending actions form a redex (Com, Label, Pass, offerN dispatch or close).
bool is_redex(const std::string& a, const std::string& b);

} // namespace sessions

#endif // SESSIONS_RUNTIME_HPP
