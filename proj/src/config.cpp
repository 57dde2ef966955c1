#include "eoslab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace eoslab {

namespace {

struct Token {
    std::string text;
    int line, col;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::string cur;
    int tl = 0, tc = 0;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back({cur, tl, tc});
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '#') {
            flush();
            while (i < text.size() && text[i] != '\n') ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == '\n') {
            flush();
            out.push_back({"\n", line, col});
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            flush();
            ++col;
            continue;
        }
        if (c == '{' || c == '}' || c == '=') {
            flush();
            out.push_back({std::string(1, c), line, col});
            ++col;
            continue;
        }
        if (cur.empty()) {
            tl = line;
            tc = col;
        }
        cur += c;
        ++col;
    }
    flush();
    return out;
}

[[noreturn]] void fail(const std::string& origin, int line, int col, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": " << msg;
    throw ConfigError(os.str());
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    auto tokens = tokenize(text);
    std::size_t pos = 0;

    struct Parser {
        const std::vector<Token>& t;
        const std::string& origin;
        std::size_t& pos;

        Config parse_body(bool top) {
            Config cfg;
            cfg.origin_ = origin;
            while (pos < t.size()) {
                if (t[pos].text == "\n") {
                    ++pos;
                    continue;
                }
                if (t[pos].text == "}") {
                    if (top) fail(origin, t[pos].line, t[pos].col, "unmatched '}'");
                    ++pos;
                    return cfg;
                }
                Token key = t[pos];
                if (key.text == "=" || key.text == "{")
                    fail(origin, key.line, key.col, "expected a key");
                ++pos;
                while (pos < t.size() && t[pos].text == "\n") ++pos;
                if (pos >= t.size())
                    fail(origin, key.line, key.col, "key without value or block");
                if (t[pos].text == "{") {
                    ++pos;
                    Config::Block blk;
                    blk.name = key.text;
                    blk.line = key.line;
                    blk.col = key.col;
                    blk.body = std::make_shared<Config>(parse_body(false));
                    cfg.blocks_.push_back(std::move(blk));
                } else if (t[pos].text == "=") {
                    ++pos;
                    Config::Entry e;
                    e.key = key.text;
                    e.line = key.line;
                    e.col = key.col;
                    while (pos < t.size() && t[pos].text != "\n" && t[pos].text != "}") {
                        if (t[pos].text == "=" || t[pos].text == "{")
                            fail(origin, t[pos].line, t[pos].col, "unexpected delimiter in value");
                        e.tokens.push_back(t[pos].text);
                        ++pos;
                    }
                    if (e.tokens.empty())
                        fail(origin, key.line, key.col, "empty value for key '" + key.text + "'");
                    cfg.entries_.push_back(std::move(e));
                } else {
                    fail(origin, t[pos].line, t[pos].col,
                         "expected '=' or '{' after key '" + key.text + "'");
                }
            }
            if (!top) fail(origin, t.empty() ? 0 : t.back().line, 0, "missing closing '}'");
            return cfg;
        }
    };
    Parser p{tokens, origin, pos};
    return p.parse_body(true);
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

const Config::Entry* Config::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

void Config::missing(const std::string& key) const {
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

std::size_t Config::block_count(const std::string& name) const {
    std::size_t n = 0;
    for (const auto& b : blocks_)
        if (b.name == name) ++n;
    return n;
}

const Config& Config::block(const std::string& name, std::size_t index) const {
    std::size_t n = 0;
    for (const auto& b : blocks_) {
        if (b.name == name && n++ == index) return *b.body;
    }
    throw ConfigError(origin_ + ": missing block '" + name + "'");
}

std::string Config::get_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    return e->tokens[0];
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->tokens[0] : fallback;
}

double Config::get_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    try {
        std::size_t used = 0;
        double v = std::stod(e->tokens[0], &used);
        if (used != e->tokens[0].size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(origin_, e->line, e->col, "'" + e->tokens[0] + "' is not a real number");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    try {
        std::size_t used = 0;
        long long v = std::stoll(e->tokens[0], &used);
        if (used != e->tokens[0].size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(origin_, e->line, e->col, "'" + e->tokens[0] + "' is not an integer");
    }
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::complex<double> Config::parse_complex(const std::string& tok, int line, int col) {
    // forms: "a", "bi", "a+bi", "a-bi"
    std::string s = tok;
    try {
        if (s.empty()) throw std::invalid_argument("empty");
        if (s.back() == 'i' || s.back() == 'I') {
            s.pop_back();
            // split at the last +/- that is not an exponent sign or leading sign
            std::size_t split = std::string::npos;
            for (std::size_t k = s.size(); k-- > 1;) {
                if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                    split = k;
                    break;
                }
            }
            if (split == std::string::npos) {
                if (s.empty() || s == "+") return {0.0, 1.0};
                if (s == "-") return {0.0, -1.0};
                return {0.0, std::stod(s)};
            }
            double re = std::stod(s.substr(0, split));
            std::string ims = s.substr(split);
            double im = (ims == "+") ? 1.0 : (ims == "-") ? -1.0 : std::stod(ims);
            return {re, im};
        }
        std::size_t used = 0;
        double re = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return {re, 0.0};
    } catch (const std::exception&) {
        std::ostringstream os;
        os << "'" << tok << "' is not a complex literal (expected forms: a, bi, a+bi)";
        if (line > 0) {
            std::ostringstream loc;
            loc << line << ":" << col << ": " << os.str();
            throw ConfigError(loc.str());
        }
        throw ConfigError(os.str());
    }
}

std::complex<double> Config::get_complex(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    return parse_complex(e->tokens[0], e->line, e->col);
}

std::complex<double> Config::get_complex(const std::string& key,
                                         std::complex<double> fallback) const {
    return has(key) ? get_complex(key) : fallback;
}

std::vector<std::string> Config::get_tokens(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    return e->tokens;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    std::vector<double> out;
    for (const auto& t : e->tokens) {
        try {
            out.push_back(std::stod(t));
        } catch (const std::exception&) {
            fail(origin_, e->line, e->col, "'" + t + "' is not a real number");
        }
    }
    return out;
}

std::vector<long long> Config::get_ints(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) missing(key);
    std::vector<long long> out;
    for (const auto& t : e->tokens) {
        try {
            out.push_back(std::stoll(t));
        } catch (const std::exception&) {
            fail(origin_, e->line, e->col, "'" + t + "' is not an integer");
        }
    }
    return out;
}

}  // namespace eoslab
