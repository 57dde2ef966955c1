#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "eoslab/errors.hpp"

namespace eoslab {

// Nested key-value configuration:
//   key = value tokens...
//   block { ... }
// Comments start with '#'. Complex literals are "a+bi" strings.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::size_t block_count(const std::string& name) const;
    const Config& block(const std::string& name, std::size_t index = 0) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::complex<double> get_complex(const std::string& key) const;
    std::complex<double> get_complex(const std::string& key,
                                     std::complex<double> fallback) const;
    std::vector<std::string> get_tokens(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<long long> get_ints(const std::string& key) const;

    struct Entry {
        std::string key;
        std::vector<std::string> tokens;
        int line = 0, col = 0;
    };
    struct Block {
        std::string name;
        std::shared_ptr<Config> body;
        int line = 0, col = 0;
    };
    const std::vector<Entry>& entries() const { return entries_; }
    const std::vector<Block>& blocks() const { return blocks_; }

    static std::complex<double> parse_complex(const std::string& tok, int line = 0, int col = 0);

private:
    const Entry* find(const std::string& key) const;
    [[noreturn]] void missing(const std::string& key) const;

    std::string origin_;
    std::vector<Entry> entries_;
    std::vector<Block> blocks_;
};

}  // namespace eoslab
