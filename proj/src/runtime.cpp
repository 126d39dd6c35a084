#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "sessions/infer.hpp"
#include "sessions/runtime.hpp"

namespace sessions {

std::string show_value(const Value& v, bool top) {
    switch (v.kind) {
    case Value::Kind::Int: return std::to_string(v.i);
    case Value::Kind::Bool: return v.b ? "True" : "False";
    case Value::Kind::Unit: return "()";
    case Value::Kind::Str: {
        if (top) return v.s;
        std::string out = "\"";
        for (char ch : v.s) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + "\"";
    }
    case Value::Kind::List: {
        std::string out = "[";
        for (std::size_t i = 0; i < v.items.size(); ++i) out += (i ? "," : "") + show_value(v.items[i], false);
        return out + "]";
    }
    case Value::Kind::Tagged: {
        std::string out = v.s;
        if (v.items.empty()) return out;
        out += "(";
        for (std::size_t i = 0; i < v.items.size(); ++i) out += (i ? ", " : "") + show_value(v.items[i], false);
        return out + ")";
    }
    }
    return "()";
}

const char* class_name(ErrorClass c) { return c == ErrorClass::ThreeOrMore ? "ThreeOrMore" : "NonRedexPair"; }

std::string RunResult::log() const {
    std::string out;
    for (const auto& e : effects) out += e.text + "\n";
    switch (status) {
    case RunStatus::Completed: break;
    case RunStatus::Error: out += std::string("ERROR ") + class_name(error->classification) + " " + error->channel + "\n"; break;
    case RunStatus::Deadlock: out += "DEADLOCK\n"; break;
    case RunStatus::BudgetExhausted: out += "BUDGET_EXHAUSTED\n"; break;
    }
    return out;
}

bool is_redex(const std::string& a, const std::string& b) {
    auto pair = [&](const char* x, const char* y) { return (a == x && b == y) || (a == y && b == x); };
    return pair("send", "recv") || pair("sel1", "offer") || pair("sel2", "offer") || pair("throw", "catch") ||
           pair("send", "offerN") || pair("close", "close");
}

namespace {

struct Stuck : Error {
    using Error::Error;
};

using Env = std::map<std::string, Value>;

Value make_int(std::int64_t i) {
    Value v;
    v.kind = Value::Kind::Int;
    v.i = i;
    return v;
}

Value make_bool(bool b) {
    Value v;
    v.kind = Value::Kind::Bool;
    v.b = b;
    return v;
}

Value make_str(std::string s) {
    Value v;
    v.kind = Value::Kind::Str;
    v.s = std::move(s);
    return v;
}

// Unchecked runs may evaluate ill-typed expressions; those get stuck.
Value eval(const Expr& e, const Env& env) {
    auto num = [&](const Expr& x) {
        Value v = eval(x, env);
        if (v.kind != Value::Kind::Int) throw Stuck("arithmetic on a non-integer");
        return v.i;
    };
    switch (e.kind) {
    case ExprKind::Int: return make_int(e.int_value);
    case ExprKind::Bool: return make_bool(e.bool_value);
    case ExprKind::Str: return make_str(e.text);
    case ExprKind::Unit: return {};
    case ExprKind::List: {
        Value v;
        v.kind = Value::Kind::List;
        for (const auto& a : e.args) v.items.push_back(eval(a, env));
        return v;
    }
    case ExprKind::Var: {
        auto it = env.find(e.text);
        if (it == env.end()) throw Stuck("unbound variable " + e.text);
        return it->second;
    }
    case ExprKind::Add: return make_int(num(e.args[0]) + num(e.args[1]));
    case ExprKind::Sub: return make_int(num(e.args[0]) - num(e.args[1]));
    case ExprKind::Less: return make_bool(num(e.args[0]) < num(e.args[1]));
    case ExprKind::Equal: return make_bool(eval(e.args[0], env) == eval(e.args[1], env));
    case ExprKind::If: {
        Value c = eval(e.args[0], env);
        if (c.kind != Value::Kind::Bool) throw Stuck("condition is not a boolean");
        return eval(e.args[c.b ? 1 : 2], env);
    }
    case ExprKind::Construct: {
        Value v;
        v.kind = Value::Kind::Tagged;
        v.s = e.text;
        for (const auto& a : e.args) v.items.push_back(eval(a, env));
        return v;
    }
    case ExprKind::Project: {
        Value t = eval(e.args[0], env);
        if (t.kind != Value::Kind::Tagged || e.index >= t.items.size()) throw Stuck("bad projection");
        return t.items[e.index];
    }
    }
    return {};
}

} // namespace

namespace {

struct Frame {
    const Block* block;
    std::size_t pc;
};

struct Proc {
    unsigned id = 0;
    std::vector<Frame> frames;
    Env vals;
    std::map<std::string, std::string> chans;
    bool stuck = false;

    const Stmt* current() const {
        if (frames.empty()) return nullptr;
        const Frame& f = frames.back();
        return &(*f.block)[f.pc];
    }
};

bool engages(StmtKind k) {
    switch (k) {
    case StmtKind::Send:
    case StmtKind::Recv:
    case StmtKind::Sel1:
    case StmtKind::Sel2:
    case StmtKind::Offer:
    case StmtKind::OfferN:
    case StmtKind::Throw:
    case StmtKind::Catch:
    case StmtKind::Close: return true;
    default: return false;
    }
}

std::string action_name(StmtKind k) {
    switch (k) {
    case StmtKind::Send: return "send";
    case StmtKind::Recv: return "recv";
    case StmtKind::Sel1: return "sel1";
    case StmtKind::Sel2: return "sel2";
    case StmtKind::Offer: return "offer";
    case StmtKind::OfferN: return "offerN";
    case StmtKind::Throw: return "throw";
    case StmtKind::Catch: return "catch";
    case StmtKind::Close: return "close";
    default: return "local";
    }
}

std::optional<std::string> head_tag(const Block& b) {
    if (!b.empty() && b[0].kind == StmtKind::Recv && b[0].pattern.kind == Pattern::Kind::Tagged) return b[0].pattern.name;
    return std::nullopt;
}

class Machine {
public:
    Machine(const Program& p, const RunOptions& o, std::map<unsigned, std::string> tags)
        : p_(p), o_(o), rng_(o.seed), tags_(std::move(tags)), script_(o.script.begin(), o.script.end()) {}

    RunResult run(const SessionDecl& entry) {
        spawn(entry, {}, {});
        for (;;) {
            normalize();
            if (detect()) {
                out_.status = RunStatus::Error;
                break;
            }
            if (procs_.empty()) break;
            auto steps = enabled();
            if (steps.empty()) {
                out_.status = RunStatus::Deadlock;
                break;
            }
            if (out_.steps >= o_.step_budget) {
                out_.status = RunStatus::BudgetExhausted;
                break;
            }
            const Step& s = steps[rng_() % steps.size()];
            ++out_.steps;
            fire(s);
        }
        return std::move(out_);
    }

private:
    struct Step {
        std::size_t a, b; // indices into procs_; b == a for local steps
    };

    const Program& p_;
    const RunOptions& o_;
    std::mt19937_64 rng_;
    std::map<unsigned, std::string> tags_;
    std::deque<std::string> script_;
    std::vector<Proc> procs_;
    unsigned next_proc_ = 0, next_chan_ = 0;
    RunResult out_;

    void effect(std::string text) { out_.effects.push_back({out_.steps, std::move(text)}); }
    void trace(const std::string& text) {
        if (o_.trace) out_.trace.push_back("step " + std::to_string(out_.steps) + ": " + text);
    }

    std::string fresh_chan(const std::string& binder) { return binder + "#" + std::to_string(next_chan_++); }

    Proc& spawn(const SessionDecl& d, const std::vector<std::string>& chans, const std::vector<Value>& vals) {
        Proc pr;
        pr.id = next_proc_++;
        pr.frames.push_back({&d.body, 0});
        std::size_t ci = 0, vi = 0;
        for (const auto& prm : d.params) {
            if (prm.is_channel()) {
                if (ci < chans.size()) pr.chans[prm.name] = chans[ci++];
            } else if (vi < vals.size()) {
                pr.vals[prm.name] = vals[vi++];
            }
        }
        procs_.push_back(std::move(pr));
        return procs_.back();
    }

    void normalize() {
        for (auto& pr : procs_) {
            while (!pr.frames.empty() && pr.frames.back().pc >= pr.frames.back().block->size()) {
                pr.frames.pop_back();
            }
        }
        std::erase_if(procs_, [](const Proc& pr) { return pr.frames.empty(); });
    }

    std::string chan_of(const Proc& pr, const std::string& name) const {
        auto it = pr.chans.find(name);
        return it == pr.chans.end() ? "?" + name : it->second;
    }

    std::map<std::string, std::vector<std::size_t>> engaged() const {
        std::map<std::string, std::vector<std::size_t>> by;
        for (std::size_t i = 0; i < procs_.size(); ++i) {
            const Proc& pr = procs_[i];
            const Stmt* st = pr.current();
            if (!pr.stuck && st && engages(st->kind)) by[chan_of(pr, st->chan)].push_back(i);
        }
        return by;
    }

    std::string describe(const Proc& pr) const {
        const Stmt* st = pr.current();
        return action_name(st->kind) + " " + st->chan + " (process " + std::to_string(pr.id) + ")";
    }

    // Branch chosen by an offerN for the value the partner is about to send.
    std::optional<int> offer_branch(const Stmt& offer, const Value& v) const {
        std::optional<std::string> t1 = head_tag(offer.block1), t2 = head_tag(offer.block2);
        auto it = tags_.find(offer.id);
        if (it != tags_.end()) t1 = it->second;
        if (v.kind != Value::Kind::Tagged) return std::nullopt;
        if (t1 && *t1 == v.s) return 1;
        if (t2 ? *t2 == v.s : t1.has_value()) return 2;
        return std::nullopt;
    }

    static bool pattern_accepts(const Pattern& pat, const Value& v) {
        if (pat.kind != Pattern::Kind::Tagged) return true;
        return v.kind == Value::Kind::Tagged && v.s == pat.name && v.items.size() == pat.fields.size();
    }

    // The pair is a redex and its payload fits the receiving side.
    bool fits(const Proc& x, const Proc& y) {
        const Stmt& a = *x.current();
        const Stmt& b = *y.current();
        if (!is_redex(action_name(a.kind), action_name(b.kind))) return false;
        const Proc& sender = a.kind == StmtKind::Send ? x : y;
        const Proc& other = a.kind == StmtKind::Send ? y : x;
        if (sender.current()->kind != StmtKind::Send) return true;
        Value v;
        try {
            v = eval(sender.current()->expr, sender.vals);
        } catch (const Stuck&) {
            return true; // the sender is stuck, reported elsewhere
        }
        const Stmt& o = *other.current();
        if (o.kind == StmtKind::OfferN) return offer_branch(o, v).has_value();
        return pattern_accepts(o.pattern, v);
    }

    bool detect() {
        for (const auto& [chan, ps] : engaged()) {
            if (ps.size() < 2) continue;
            ErrorClass cls;
            if (ps.size() >= 3)
                cls = ErrorClass::ThreeOrMore;
            else if (!fits(procs_[ps[0]], procs_[ps[1]]))
                cls = ErrorClass::NonRedexPair;
            else
                continue;
            ErrorReport r;
            r.channel = chan;
            r.classification = cls;
            r.step = out_.steps;
            for (std::size_t i : ps) r.actions.push_back(describe(procs_[i]));
            out_.error = r;
            return true;
        }
        return false;
    }

    std::vector<Step> enabled() {
        std::vector<Step> steps;
        for (std::size_t i = 0; i < procs_.size(); ++i) {
            const Stmt* st = procs_[i].current();
            if (!procs_[i].stuck && !engages(st->kind)) steps.push_back({i, i});
        }
        for (const auto& [chan, ps] : engaged())
            if (ps.size() == 2) steps.push_back({ps[0], ps[1]});
        return steps;
    }

    Value value(Proc& pr, const Expr& e) {
        try {
            return eval(e, pr.vals);
        } catch (const Stuck&) {
            pr.stuck = true;
            throw;
        }
    }

    static void bind(Proc& pr, const Pattern& pat, const Value& v) {
        if (pat.kind == Pattern::Kind::Name) pr.vals[pat.name] = v;
        if (pat.kind != Pattern::Kind::Tagged) return;
        for (std::size_t i = 0; i < pat.fields.size() && i < v.items.size(); ++i)
            if (pat.fields[i] != "_") pr.vals[pat.fields[i]] = v.items[i];
    }

    static void advance(Proc& pr) { ++pr.frames.back().pc; }

    static void enter(Proc& pr, const Block& b) {
        advance(pr);
        pr.frames.push_back({&b, 0});
    }

    void fire(const Step& s) {
        try {
            if (s.a == s.b)
                local(s.a);
            else
                pair(s.a, s.b);
        } catch (const Stuck& e) {
            trace(std::string("stuck: ") + e.what());
        }
    }

    void local(std::size_t i) {
        Proc& pr = procs_[i];
        const Stmt& st = *pr.current();
        switch (st.kind) {
        case StmtKind::New: {
            const std::string id = fresh_chan(st.bind);
            pr.chans[st.bind] = id;
            trace("new " + id);
            advance(pr);
            return;
        }
        case StmtKind::Io:
            if (st.io == IoKind::Print) {
                const std::string text = show_value(value(pr, st.expr));
                effect("PRINT " + text);
                trace("print " + text);
            } else {
                if (script_.empty()) throw ScriptExhausted("readline with an empty script");
                std::string line = script_.front();
                script_.pop_front();
                effect("READ " + line);
                trace("read " + line);
                if (!st.bind.empty()) pr.vals[st.bind] = make_str(line);
            }
            advance(pr);
            return;
        case StmtKind::Fork: {
            if (st.inline_fork) {
                Proc child;
                child.id = next_proc_++;
                child.vals = pr.vals;
                child.chans = pr.chans;
                child.frames.push_back({&st.block1, 0});
                advance(pr);
                trace("fork process " + std::to_string(child.id));
                procs_.push_back(std::move(child));
                return;
            }
            const SessionDecl* d = p_.find_session(st.target);
            if (!d) throw Stuck("unknown session " + st.target);
            std::vector<std::string> chans;
            std::vector<Value> vals;
            for (std::size_t k = 0; k < st.args.size() && k < d->params.size(); ++k) {
                if (d->params[k].is_channel())
                    chans.push_back(chan_of(pr, st.args[k].text));
                else
                    vals.push_back(value(pr, st.args[k]));
            }
            advance(pr);
            const unsigned id = spawn(*d, chans, vals).id;
            trace("fork " + st.target + " as process " + std::to_string(id));
            return;
        }
        case StmtKind::Recur1: {
            const SessionDecl* d = p_.find_session(st.target);
            if (!d) throw Stuck("unknown session " + st.target);
            const std::string c = chan_of(pr, st.chan);
            pr.vals.clear();
            pr.chans.clear();
            for (const auto& prm : d->params)
                if (prm.is_channel()) {
                    pr.chans[prm.name] = c;
                    break;
                }
            pr.frames.assign(1, {&d->body, 0});
            trace("recur " + st.target);
            return;
        }
        case StmtKind::Connect: {
            const ServiceDecl* svc = p_.find_service(st.target);
            const SessionDecl* server = svc && svc->server ? p_.find_session(*svc->server) : nullptr;
            if (!server) throw UnknownService("no server for service " + st.target);
            const std::string id = fresh_chan(st.bind);
            pr.chans[st.bind] = id;
            advance(pr);
            effect("CONNECT " + st.target);
            trace("connect " + st.target + " on " + id);
            spawn(*server, {id}, {});
            return;
        }
        default: advance(pr); return; // return, unwind, sel1N, sel2N
        }
    }

    void pair(std::size_t i, std::size_t j) {
        // Order the pair as (active, passive): sender, selector, thrower, closer.
        auto rank = [&](std::size_t k) {
            switch (procs_[k].current()->kind) {
            case StmtKind::Send:
            case StmtKind::Sel1:
            case StmtKind::Sel2:
            case StmtKind::Throw:
            case StmtKind::Close: return 0;
            default: return 1;
            }
        };
        if (rank(i) > rank(j)) std::swap(i, j);
        Proc& x = procs_[i];
        Proc& y = procs_[j];
        const Stmt& a = *x.current();
        const Stmt& b = *y.current();
        const std::string chan = chan_of(x, a.chan);
        switch (a.kind) {
        case StmtKind::Send: {
            Value v = value(x, a.expr);
            if (b.kind == StmtKind::OfferN) {
                const int branch = *offer_branch(b, v);
                trace("offerN " + chan + " takes branch " + std::to_string(branch));
                enter(y, branch == 1 ? b.block1 : b.block2);
                return;
            }
            trace("com " + chan + " " + show_value(v, false));
            bind(y, b.pattern, v);
            advance(x);
            advance(y);
            return;
        }
        case StmtKind::Sel1:
        case StmtKind::Sel2:
            trace(std::string("label ") + chan + (a.kind == StmtKind::Sel1 ? " 1" : " 2"));
            advance(x);
            enter(y, a.kind == StmtKind::Sel1 ? b.block1 : b.block2);
            return;
        case StmtKind::Throw: {
            const std::string passed = chan_of(x, a.chan2);
            trace("pass " + passed + " over " + chan);
            y.chans[b.bind] = passed;
            out_.passes.push_back({out_.steps, passed, x.id, y.id});
            advance(x);
            advance(y);
            return;
        }
        case StmtKind::Close:
            trace("close " + chan);
            advance(x);
            advance(y);
            return;
        default: return;
        }
    }
};

} // namespace

RunResult run(const Program& program, const RunOptions& options) {
    const std::string entry = options.entry.empty() ? program.entry : options.entry;
    std::map<unsigned, std::string> tags;
    if (options.unchecked) {
        try {
            tags = infer_program(program).offer_tags;
        } catch (const Error&) {
        }
    } else {
        InferenceResult r = infer_program(program);
        check_runnable(program, r, entry);
        tags = r.offer_tags;
    }
    const SessionDecl* d = program.find_session(entry);
    if (!d) throw Error("no entry session " + entry);
    Machine m(program, options, std::move(tags));
    return m.run(*d);
}
} // namespace sessions
