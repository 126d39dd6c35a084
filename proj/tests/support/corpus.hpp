#ifndef SESSIONS_TESTS_CORPUS_HPP
#define SESSIONS_TESTS_CORPUS_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace corpus {

inline std::filesystem::path dir() { return SESSIONS_CORPUS_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// Stems of the *.pi files in a directory, sorted.
inline std::vector<std::string> programs(const std::filesystem::path& d = dir()) {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(d))
        if (e.path().extension() == ".pi") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string source(const std::string& stem) { return slurp(dir() / (stem + ".pi")); }

inline std::vector<std::string> script(const std::string& stem) {
    const auto p = dir() / (stem + ".script");
    return std::filesystem::exists(p) ? lines(slurp(p)) : std::vector<std::string>{};
}

// Programs without recursion, services or offerN.
inline const std::vector<std::string>& fragment() {
    static const std::vector<std::string> names = {
        "addition", "branches", "calc",  "callback",   "delegate", "double_throw", "echo",
        "fig6",     "fig7",     "inline_fork", "lists", "nested_offer", "pingpong", "point",
        "pq",       "projection", "readline", "relay", "swap", "two_servers",
    };
    return names;
}

} // namespace corpus

#endif // SESSIONS_TESTS_CORPUS_HPP
