#include "reach/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace reach {

namespace {

[[noreturn]] void syntax(std::size_t line, std::string msg) {
    throw SyntaxError({{ErrorKind::Syntax, std::move(msg), line}});
}

std::vector<std::string_view> tokenize(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::int64_t parse_id(std::string_view tok, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() ||
        v > static_cast<std::uint64_t>(INT64_MAX))
        syntax(line, "expected a state id, got '" + std::string(tok) + "'");
    return static_cast<std::int64_t>(v);
}

double parse_probability(std::string_view tok, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        syntax(line, "expected a probability, got '" + std::string(tok) + "'");
    return v;
}

}  // namespace

RawModel parse_raw_model(std::string_view text) {
    RawModel raw;
    bool seen_header = false;
    bool seen_states = false;
    bool in_actions = false;
    RawAction* current = nullptr;

    auto close_block = [&](std::size_t line) {
        if (current && current->successors.empty())
            syntax(line, "action '" + current->label + "' has no successor lines");
    };

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) {
            if (nl == text.size()) break;
            continue;
        }

        if (!seen_header) {
            if (toks.size() != 1 || toks[0] != "mdp") syntax(lineno, "file must start with 'mdp'");
            seen_header = true;
            continue;
        }

        const auto kw = toks[0];
        if (kw == "states" || kw == "init" || kw == "goal" || kw == "sink") {
            if (in_actions) syntax(lineno, "'" + std::string(kw) + "' after the first action block");
            if (toks.size() != 2) syntax(lineno, "'" + std::string(kw) + "' takes one argument");
            const auto v = parse_id(toks[1], lineno);
            if (kw == "states") {
                if (seen_states) syntax(lineno, "duplicate 'states'");
                if (v == 0) syntax(lineno, "state count must be positive");
                seen_states = true;
                raw.num_states = v;
            } else {
                auto& slot = kw == "init" ? raw.init : kw == "goal" ? raw.goal : raw.sink;
                if (slot) syntax(lineno, "duplicate '" + std::string(kw) + "'");
                slot = v;
            }
        } else if (kw == "action") {
            if (!seen_states) syntax(lineno, "'states' must precede actions");
            if (toks.size() != 3) syntax(lineno, "expected 'action <state> <label>'");
            close_block(lineno);
            in_actions = true;
            RawAction a;
            a.state = parse_id(toks[1], lineno);
            a.label = std::string(toks[2]);
            a.line = lineno;
            raw.actions.push_back(std::move(a));
            current = &raw.actions.back();
        } else {
            if (!current) syntax(lineno, "unexpected '" + std::string(kw) + "'");
            if (toks.size() != 2) syntax(lineno, "expected '<successor> <probability>'");
            current->successors.push_back(
                {parse_id(toks[0], lineno), parse_probability(toks[1], lineno), lineno});
        }
        if (nl == text.size()) break;
    }
    if (!seen_header) syntax(lineno == 0 ? 1 : lineno, "empty model");
    if (!seen_states) syntax(lineno, "missing 'states'");
    if (!raw.init) syntax(lineno, "missing 'init'");
    if (!raw.goal) syntax(lineno, "missing 'goal'");
    close_block(lineno);
    return raw;
}

Mdp parse_model(std::string_view text) { return validate(parse_raw_model(text)); }

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

namespace {

std::string format_probability(double p) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

}  // namespace

std::string serialize_model(const Mdp& mdp) {
    std::string out;
    out.reserve(64 + mdp.num_transitions() * 24);
    out += "mdp\nstates " + std::to_string(mdp.num_states()) + "\n";
    out += "init " + std::to_string(mdp.init()) + "\n";
    out += "goal " + std::to_string(mdp.goal()) + "\n";
    out += "sink " + std::to_string(mdp.sink()) + "\n";
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (ActionId a : mdp.actions(s)) {
            out += "action " + std::to_string(s) + " " + mdp.label(a) + "\n";
            for (const auto& t : mdp.successors(a)) {
                out += std::to_string(t.target);
                out += ' ';
                out += format_probability(t.probability);
                out += '\n';
            }
        }
    return out;
}

Mdp read_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

void write_model_file(const std::filesystem::path& path, const Mdp& mdp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out << serialize_model(mdp);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace reach
