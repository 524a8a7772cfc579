// Deterministic CSV/number formatting and the resolved-config header shared
// by all subcommands.

#ifndef FHENON_TOOLS_CSV_IO_HPP
#define FHENON_TOOLS_CSV_IO_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fhenon::cli {

/// Shortest round-trip decimal form; identical input bits give identical
/// strings, which is what keeps repeated runs byte-identical.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Resolved, payload-affecting configuration of one run. Keys are logged in
/// insertion order; the FNV-1a hash of the canonical string heads every
/// output CSV so identical hashes imply identical payloads.
struct ConfigLog {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
    }
    void add(std::string key, const char* value) {
        entries.emplace_back(std::move(key), std::string(value));
    }
    void add(std::string key, double v) { add(std::move(key), format_double(v)); }
    void add(std::string key, int v) { add(std::move(key), std::to_string(v)); }
    void add(std::string key, std::uint64_t v) {
        add(std::move(key), std::to_string(v));
    }

    std::string canonical() const {
        std::string s;
        for (const auto& [k, v] : entries) {
            if (!s.empty()) s += ' ';
            s += k;
            s += '=';
            s += v;
        }
        return s;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : canonical()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    void write_header(std::ostream& os) const {
        std::array<char, 17> hex{};
        std::snprintf(hex.data(), hex.size(), "%016llx",
                      static_cast<unsigned long long>(hash()));
        os << "# config_hash=" << hex.data() << "\n";
        os << "# config: " << canonical() << "\n";
    }
};

}  // namespace fhenon::cli

#endif
