#pragma once
// On-disk cache for expensive precomputations (prime tables, mod-p series
// tables). Entries live under content-addressed keys: the key encodes every
// parameter that determines the artifact, so a hit can be trusted as far as
// file integrity goes — and integrity itself is enforced with a checksummed
// header. Any anomaly (missing file, short read, bad magic, bad checksum,
// malformed body) falls back to a rebuild; a rebuilt value is re-stored via
// an atomic temp-file-then-rename write so readers never observe a partial
// entry. IO failures degrade the cache to a no-op with a warning, never an
// error: the cache is an accelerator, not a dependency.
//
// Entry layout: one ASCII header line "llcache1 <fnv1a64-hex> <byte-count>"
// followed by the raw payload. Payloads use native-endian 64-bit words, so
// entries are machine-local (delete the directory when moving between
// architectures; the checksum does not attempt cross-platform portability).

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "ladderlab/modforms.hpp"

namespace ladderlab {

class DiskCache {
  public:
    using Warn = std::function<void(const std::string&)>;

    DiskCache() = default; // disabled: get misses, put is a no-op

    explicit DiskCache(std::filesystem::path dir, Warn warn = {})
        : dir_(std::move(dir)), warn_(std::move(warn)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        enabled_ = !ec && std::filesystem::is_directory(dir_, ec);
        if (!enabled_) say("cache disabled: cannot use directory " + dir_.string());
    }

    bool enabled() const { return enabled_; }
    const std::filesystem::path& dir() const { return dir_; }

    static std::uint64_t checksum(const std::string& s) {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a 64
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    std::optional<std::string> get(const std::string& key) const {
        if (!enabled_) return std::nullopt;
        std::ifstream in(path_for(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::string header;
        if (!std::getline(in, header)) return std::nullopt;
        std::istringstream hs(header);
        std::string magic, sum_hex;
        std::uint64_t size = 0;
        if (!(hs >> magic >> sum_hex >> size) || magic != "llcache1") return std::nullopt;
        std::string payload(size, '\0');
        in.read(payload.data(), static_cast<std::streamsize>(size));
        if (static_cast<std::uint64_t>(in.gcount()) != size) return std::nullopt;
        if (in.get() != std::ifstream::traits_type::eof()) return std::nullopt; // trailing junk
        std::uint64_t want = 0;
        std::istringstream ss(sum_hex);
        if (!(ss >> std::hex >> want) || checksum(payload) != want) return std::nullopt;
        return payload;
    }

    bool put(const std::string& key, const std::string& payload) const {
        if (!enabled_) return false;
        const std::filesystem::path final_path = path_for(key);
        const std::filesystem::path tmp_path =
            dir_ / (key + ".tmp-" + std::to_string(::getpid()));
        {
            std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
            if (!out) {
                say("cache write skipped: cannot create " + tmp_path.string());
                return false;
            }
            std::ostringstream header;
            header << "llcache1 " << std::hex << checksum(payload) << std::dec << ' '
                   << payload.size() << '\n';
            out << header.str() << payload;
            out.flush();
            if (!out) {
                say("cache write skipped: short write to " + tmp_path.string());
                std::error_code ec;
                std::filesystem::remove(tmp_path, ec);
                return false;
            }
        }
        std::error_code ec;
        std::filesystem::rename(tmp_path, final_path, ec);
        if (ec) {
            say("cache write skipped: cannot rename into " + final_path.string());
            std::filesystem::remove(tmp_path, ec);
            return false;
        }
        return true;
    }

  private:
    std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".bin"); }

    void say(const std::string& msg) const {
        if (warn_) warn_(msg);
    }

    std::filesystem::path dir_;
    Warn warn_;
    bool enabled_ = false;
};

// Fetch-or-compute: a validated hit deserializes and returns; otherwise the
// value is built and stored (best effort). `de` returns nullopt on malformed
// payloads, which count as misses.
template <typename T, typename Build, typename Ser, typename De>
T cache_get_or_build(const DiskCache& cache, const std::string& key, Build build, Ser ser,
                     De de) {
    if (cache.enabled()) {
        if (std::optional<std::string> blob = cache.get(key)) {
            if (std::optional<T> val = de(*blob)) return std::move(*val);
        }
    }
    T val = build();
    if (cache.enabled()) cache.put(key, ser(val));
    return val;
}

// ------------------------------------------------------- payload encodings --

inline std::string pack_u64s(const std::vector<std::uint64_t>& v) {
    std::string out(v.size() * sizeof(std::uint64_t), '\0');
    if (!v.empty()) std::memcpy(out.data(), v.data(), out.size());
    return out;
}

inline std::optional<std::vector<std::uint64_t>> unpack_u64s(const std::string& s) {
    if (s.size() % sizeof(std::uint64_t) != 0) return std::nullopt;
    std::vector<std::uint64_t> v(s.size() / sizeof(std::uint64_t));
    if (!v.empty()) std::memcpy(v.data(), s.data(), s.size());
    return v;
}

inline std::string primes_cache_key(std::uint64_t limit) {
    return "primes-" + std::to_string(limit);
}

inline std::string fp_tables_cache_key(std::uint64_t p, std::size_t prec, unsigned jmax,
                                       std::uint64_t amax) {
    return "fptables-p" + std::to_string(p) + "-n" + std::to_string(prec) + "-j" +
           std::to_string(jmax) + "-a" + std::to_string(amax);
}

// Series tables as flat words: p, prec, #delta rows, #e4 rows, e6 length,
// then each row's prec words, then the e6 row.
inline std::string pack_fp_tables(const modforms::FpSeriesTables& t) {
    std::vector<std::uint64_t> w;
    w.reserve(5 + (t.delta_pow.size() + t.e4_pow.size()) * t.prec + t.e6.size());
    w.push_back(t.p);
    w.push_back(t.prec);
    w.push_back(t.delta_pow.size());
    w.push_back(t.e4_pow.size());
    w.push_back(t.e6.size());
    for (const auto& row : t.delta_pow) w.insert(w.end(), row.begin(), row.end());
    for (const auto& row : t.e4_pow) w.insert(w.end(), row.begin(), row.end());
    w.insert(w.end(), t.e6.begin(), t.e6.end());
    return pack_u64s(w);
}

inline std::optional<modforms::FpSeriesTables> unpack_fp_tables(const std::string& s) {
    auto wopt = unpack_u64s(s);
    if (!wopt || wopt->size() < 5) return std::nullopt;
    const std::vector<std::uint64_t>& w = *wopt;
    modforms::FpSeriesTables t;
    t.p = w[0];
    t.prec = static_cast<std::size_t>(w[1]);
    const std::uint64_t nd = w[2], ne = w[3], n6 = w[4];
    // implausible dimensions would overflow the size arithmetic below
    if (t.prec > (1u << 28) || nd > (1u << 20) || ne > (1u << 20) || n6 > (1u << 28))
        return std::nullopt;
    if (w.size() != 5 + (nd + ne) * t.prec + n6) return std::nullopt;
    std::size_t at = 5;
    t.delta_pow.resize(nd);
    for (auto& row : t.delta_pow) {
        row.assign(w.begin() + at, w.begin() + at + t.prec);
        at += t.prec;
    }
    t.e4_pow.resize(ne);
    for (auto& row : t.e4_pow) {
        row.assign(w.begin() + at, w.begin() + at + t.prec);
        at += t.prec;
    }
    t.e6.assign(w.begin() + at, w.begin() + at + n6);
    return t;
}

} // namespace ladderlab
