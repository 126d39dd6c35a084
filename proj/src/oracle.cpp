#include <algorithm>
#include <set>

#include "sessions/oracle.hpp"
#include "sessions/surface.hpp"
#include "sessions/type_syntax.hpp"

namespace sessions {

namespace {
ProcessPtr make(Process p) { return std::make_shared<const Process>(std::move(p)); }
} // namespace

ProcessPtr Process::inact() { return make({}); }

ProcessPtr Process::send(std::string c, Expr e, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::Send;
    p.chan = std::move(c);
    p.expr = std::move(e);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::recv(std::string c, Pattern x, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::Recv;
    p.chan = std::move(c);
    p.pattern = std::move(x);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::sel(int which, std::string c, ProcessPtr k) {
    Process p;
    p.kind = which == 1 ? ProcKind::Sel1 : ProcKind::Sel2;
    p.chan = std::move(c);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::offer(std::string c, ProcessPtr p1, ProcessPtr p2) {
    Process p;
    p.kind = ProcKind::Offer;
    p.chan = std::move(c);
    p.p = std::move(p1);
    p.q = std::move(p2);
    return make(std::move(p));
}

ProcessPtr Process::send_s(std::string c, std::string d, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::SendS;
    p.chan = std::move(c);
    p.name = std::move(d);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::recv_s(std::string c, std::string d, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::RecvS;
    p.chan = std::move(c);
    p.name = std::move(d);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::par(ProcessPtr p1, ProcessPtr p2) {
    Process p;
    p.kind = ProcKind::Par;
    p.p = std::move(p1);
    p.q = std::move(p2);
    return make(std::move(p));
}

ProcessPtr Process::new_(std::string d, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::New;
    p.name = std::move(d);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::print(Expr e, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::Io;
    p.io = IoKind::Print;
    p.expr = std::move(e);
    p.p = std::move(k);
    return make(std::move(p));
}

ProcessPtr Process::readline(std::string x, ProcessPtr k) {
    Process p;
    p.kind = ProcKind::Io;
    p.io = IoKind::ReadLine;
    p.name = std::move(x);
    p.p = std::move(k);
    return make(std::move(p));
}

bool operator==(const Process& a, const Process& b) {
    if (a.kind != b.kind || a.chan != b.chan || a.name != b.name || !(a.pattern == b.pattern) ||
        !(a.expr == b.expr) || a.io != b.io)
        return false;
    auto same = [](const ProcessPtr& x, const ProcessPtr& y) { return x == y || (x && y && *x == *y); };
    return same(a.p, b.p) && same(a.q, b.q);
}

namespace {

std::string pattern_text(const Pattern& p) {
    switch (p.kind) {
    case Pattern::Kind::Wildcard: return "_";
    case Pattern::Kind::Name: return p.name;
    case Pattern::Kind::Tagged: {
        std::string s = p.name;
        if (p.fields.empty()) return s;
        s += "(";
        for (std::size_t i = 0; i < p.fields.size(); ++i) s += (i ? ", " : "") + p.fields[i];
        return s + ")";
    }
    }
    return "_";
}

} // namespace

std::string print_process(const Process& p) {
    switch (p.kind) {
    case ProcKind::Inact: return "Inact";
    case ProcKind::Send: return "SendP(" + p.chan + ", " + print_expr(p.expr) + ", " + print_process(*p.p) + ")";
    case ProcKind::Recv: return "RecvP(" + p.chan + ", " + pattern_text(p.pattern) + ", " + print_process(*p.p) + ")";
    case ProcKind::Sel1: return "Sel1P(" + p.chan + ", " + print_process(*p.p) + ")";
    case ProcKind::Sel2: return "Sel2P(" + p.chan + ", " + print_process(*p.p) + ")";
    case ProcKind::Offer:
        return "OfferP(" + p.chan + ", " + print_process(*p.p) + ", " + print_process(*p.q) + ")";
    case ProcKind::SendS: return "SendSP(" + p.chan + ", " + p.name + ", " + print_process(*p.p) + ")";
    case ProcKind::RecvS: return "RecvSP(" + p.chan + ", " + p.name + ", " + print_process(*p.p) + ")";
    case ProcKind::Par: return "Par(" + print_process(*p.p) + ", " + print_process(*p.q) + ")";
    case ProcKind::New: return "NewP(" + p.name + ", " + print_process(*p.p) + ")";
    case ProcKind::Io:
        if (p.io == IoKind::Print) return "IoP(print " + print_expr(p.expr) + ", " + print_process(*p.p) + ")";
        return "IoP(readline " + p.name + ", " + print_process(*p.p) + ")";
    }
    return "Inact";
}

namespace {

void collect_free(const Process& p, std::set<std::string>& bound, std::vector<std::string>& out) {
    auto use = [&](const std::string& c) {
        if (!bound.count(c) && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    };
    auto under = [&](const std::string& b, const Process& k) {
        const bool had = bound.count(b) > 0;
        bound.insert(b);
        collect_free(k, bound, out);
        if (!had) bound.erase(b);
    };
    switch (p.kind) {
    case ProcKind::Inact: return;
    case ProcKind::Send:
    case ProcKind::Recv:
    case ProcKind::Sel1:
    case ProcKind::Sel2:
        use(p.chan);
        collect_free(*p.p, bound, out);
        return;
    case ProcKind::Offer:
        use(p.chan);
        collect_free(*p.p, bound, out);
        collect_free(*p.q, bound, out);
        return;
    case ProcKind::SendS:
        use(p.chan);
        use(p.name);
        collect_free(*p.p, bound, out);
        return;
    case ProcKind::RecvS:
        use(p.chan);
        under(p.name, *p.p);
        return;
    case ProcKind::Par:
        collect_free(*p.p, bound, out);
        collect_free(*p.q, bound, out);
        return;
    case ProcKind::New: under(p.name, *p.p); return;
    case ProcKind::Io: collect_free(*p.p, bound, out); return;
    }
}

} // namespace

std::vector<std::string> free_channels(const Process& p) {
    std::set<std::string> bound;
    std::vector<std::string> out;
    collect_free(p, bound, out);
    return out;
}

std::size_t parallel_width(const Process& p) {
    switch (p.kind) {
    case ProcKind::Inact: return 1;
    case ProcKind::Par: return parallel_width(*p.p) + parallel_width(*p.q);
    case ProcKind::Offer: return std::max(parallel_width(*p.p), parallel_width(*p.q));
    default: return parallel_width(*p.p);
    }
}

} // namespace sessions
