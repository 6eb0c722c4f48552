// Disk cache behavior: checksummed round-trips, corruption recovery, the
// get-or-build flow, payload packers, and the cache-related CLI contract
// (hits are byte-identical, corrupt entries heal, --no-cache changes nothing).
#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ladderlab/cache.hpp"
#include "ladderlab/modforms.hpp"

#include "cli_run.hpp"

using namespace ladderlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& tag) { return cli::fresh_dir(tag); }

// Flip one byte in the middle of a cache file.
void corrupt_file(const fs::path& file) {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekg(0, std::ios::end);
    const auto size = static_cast<std::streamoff>(f.tellg());
    REQUIRE(size > 0);
    f.seekg(size / 2);
    char c = 0;
    f.read(&c, 1);
    f.seekp(size / 2);
    c = static_cast<char>(c ^ 0x5a);
    f.write(&c, 1);
}

} // namespace

TEST_CASE("disk cache round-trips payloads under checksummed keys") {
    const fs::path dir = scratch("roundtrip");
    const DiskCache cache(dir);
    REQUIRE(cache.enabled());

    CHECK_FALSE(cache.get("absent").has_value());

    std::string payload = "arbitrary bytes ";
    payload += '\0';
    payload += '\x01';
    payload += '\xff';
    payload += " with nul";
    REQUIRE(cache.put("some-key", payload));
    const auto back = cache.get("some-key");
    REQUIRE(back.has_value());
    CHECK(*back == payload);

    // Overwrite is atomic and visible.
    REQUIRE(cache.put("some-key", "v2"));
    CHECK(cache.get("some-key") == std::optional<std::string>("v2"));
}

TEST_CASE("corrupt or truncated entries read as misses") {
    const fs::path dir = scratch("corrupt");
    const DiskCache cache(dir);
    REQUIRE(cache.put("k", std::string(1000, 'x')));
    const fs::path file = dir / "k.bin";
    REQUIRE(fs::exists(file));

    SECTION("bit flip") {
        corrupt_file(file);
        CHECK_FALSE(cache.get("k").has_value());
    }
    SECTION("truncation") {
        fs::resize_file(file, 20);
        CHECK_FALSE(cache.get("k").has_value());
    }
    SECTION("trailing junk") {
        std::ofstream(file, std::ios::app | std::ios::binary) << "extra";
        CHECK_FALSE(cache.get("k").has_value());
    }
    SECTION("empty file") {
        fs::resize_file(file, 0);
        CHECK_FALSE(cache.get("k").has_value());
    }
}

TEST_CASE("get-or-build builds once, then serves hits, and heals corruption") {
    const fs::path dir = scratch("gob");
    const DiskCache cache(dir);
    int builds = 0;
    const auto build = [&] {
        ++builds;
        return std::vector<std::uint64_t>{2, 3, 5, 7};
    };
    const auto de = [](const std::string& blob) { return unpack_u64s(blob); };

    const auto a = cache_get_or_build<std::vector<std::uint64_t>>(cache, "v", build, pack_u64s, de);
    CHECK(builds == 1);
    const auto b = cache_get_or_build<std::vector<std::uint64_t>>(cache, "v", build, pack_u64s, de);
    CHECK(builds == 1); // served from disk
    CHECK(a == b);

    corrupt_file(dir / "v.bin");
    const auto c = cache_get_or_build<std::vector<std::uint64_t>>(cache, "v", build, pack_u64s, de);
    CHECK(builds == 2); // miss on corruption, rebuilt
    CHECK(c == a);
    // ... and the entry is healthy again.
    const auto d = cache_get_or_build<std::vector<std::uint64_t>>(cache, "v", build, pack_u64s, de);
    CHECK(builds == 2);
    CHECK(d == a);
}

TEST_CASE("a disabled cache never touches the filesystem") {
    const DiskCache cache; // default: disabled
    CHECK_FALSE(cache.enabled());
    CHECK_FALSE(cache.put("k", "v"));
    CHECK_FALSE(cache.get("k").has_value());

    int builds = 0;
    const auto build = [&] {
        ++builds;
        return std::vector<std::uint64_t>{1};
    };
    const auto de = [](const std::string& blob) { return unpack_u64s(blob); };
    cache_get_or_build<std::vector<std::uint64_t>>(cache, "k", build, pack_u64s, de);
    cache_get_or_build<std::vector<std::uint64_t>>(cache, "k", build, pack_u64s, de);
    CHECK(builds == 2); // every call rebuilds
}

TEST_CASE("u64 packing round-trips and rejects ragged sizes") {
    const std::vector<std::uint64_t> v{0, 1, 0xffffffffffffffffULL, 42};
    const auto back = unpack_u64s(pack_u64s(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);

    CHECK(unpack_u64s(std::string(7, 'x')) == std::nullopt);
    const auto empty = unpack_u64s("");
    REQUIRE(empty.has_value());
    CHECK(empty->empty());
}

TEST_CASE("series tables pack exactly and reject implausible headers") {
    const auto t = modforms::FpSeriesTables::build(23, 40, 2, 1);
    const std::string blob = pack_fp_tables(t);
    const auto back = unpack_fp_tables(blob);
    REQUIRE(back.has_value());
    CHECK(back->p == t.p);
    CHECK(back->prec == t.prec);
    CHECK(back->delta_pow == t.delta_pow);
    CHECK(back->e4_pow == t.e4_pow);
    CHECK(back->e6 == t.e6);

    CHECK_FALSE(unpack_fp_tables("").has_value());
    CHECK_FALSE(unpack_fp_tables(blob.substr(0, blob.size() - 8)).has_value());
    // A header whose dimensions cannot belong to a real table.
    std::vector<std::uint64_t> lie{23, ~0ULL, ~0ULL, 1, 1};
    CHECK_FALSE(unpack_fp_tables(pack_u64s(lie)).has_value());
}

TEST_CASE("cache keys encode every determining parameter") {
    CHECK(primes_cache_key(100) != primes_cache_key(101));
    CHECK(fp_tables_cache_key(13, 24, 1, 0) != fp_tables_cache_key(13, 25, 1, 0));
    CHECK(fp_tables_cache_key(13, 24, 1, 0) != fp_tables_cache_key(17, 24, 1, 0));
    CHECK(fp_tables_cache_key(13, 24, 1, 0) != fp_tables_cache_key(13, 24, 2, 0));
    CHECK(fp_tables_cache_key(13, 24, 1, 0) != fp_tables_cache_key(13, 24, 1, 1));
}

TEST_CASE("cli census caches its series tables and survives cache corruption") {
    const fs::path dir = scratch("cli_census");
    const std::string flags = " --cache-dir " + dir.string();

    const auto cold = cli::run("census --p 13" + flags);
    REQUIRE(cold.exit_code == 0);
    std::size_t files = 0;
    fs::path table_file;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++files;
        table_file = e.path();
    }
    REQUIRE(files == 1); // the packed series tables

    const auto warm = cli::run("census --p 13" + flags);
    REQUIRE(warm.exit_code == 0);
    CHECK(cli::payload_bytes(warm.out) == cli::payload_bytes(cold.out));

    corrupt_file(table_file);
    const auto healed = cli::run("census --p 13" + flags);
    REQUIRE(healed.exit_code == 0);
    CHECK(cli::payload_bytes(healed.out) == cli::payload_bytes(cold.out));

    const auto uncached = cli::run("census --p 13 --no-cache");
    REQUIRE(uncached.exit_code == 0);
    CHECK(cli::payload_bytes(uncached.out) == cli::payload_bytes(cold.out));
}

TEST_CASE("cli sieve cache is shared across subcommands and via the environment") {
    const fs::path dir = scratch("cli_sieve");

    const auto pi = cli::run("cheb pi --x 200000", "LADDERLAB_CACHE_DIR=" + dir.string());
    REQUIRE(pi.exit_code == 0);
    CHECK(cli::payloads(pi.out)[0].at("pi") == 17984);
    REQUIRE(fs::exists(dir / "primes-200000.bin"));

    // A verify run over the same range reuses the table (and --cache-dir
    // takes priority over the environment variable).
    const auto v1 = cli::run("ladder verify --from 31 --to 99999 --cache-dir " + dir.string(),
                             "LADDERLAB_CACHE_DIR=/nonexistent-and-unused");
    REQUIRE(v1.exit_code == 0);
    const auto v2 = cli::run("ladder verify --from 31 --to 99999 --no-cache");
    REQUIRE(v2.exit_code == 0);
    CHECK(cli::payload_bytes(v1.out) == cli::payload_bytes(v2.out));
}
