// Command-line front end. Subcommands emit json-lines (default) or csv
// records wrapped in a {schema_version, command, payload, elapsed_ms}
// envelope; see README for the per-command schemas.
//
// Exit codes: 0 success, 1 a verification reported failures, 2 usage or
// configuration error (diagnosis on stderr).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ladderlab/cache.hpp"
#include "ladderlab/census.hpp"
#include "ladderlab/cheb.hpp"
#include "ladderlab/error.hpp"
#include "ladderlab/ladder.hpp"
#include "ladderlab/numth.hpp"
#include "ladderlab/parallel.hpp"
#include "ladderlab/serialize.hpp"
#include "ladderlab/weights.hpp"

namespace {

using namespace ladderlab;
using ser::ojson;
using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

struct Config {
    ser::Format format = ser::Format::json_lines;
    unsigned threads = 1;
    std::uint64_t sieve_limit = kDefaultSieveLimit;
    DiskCache cache;
};

// "n/d" or "n" with unbounded integers; den must be positive.
Rational parse_rational(const std::string& text, const std::string& flag) {
    try {
        const auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(mpz_class(text), mpz_class(1));
        const mpz_class num(text.substr(0, slash));
        const mpz_class den(text.substr(slash + 1));
        if (den <= 0) throw std::invalid_argument("nonpositive denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument(flag + " expects a fraction n/d, got '" + text + "'");
    }
}

DiskCache make_cache(bool no_cache, const std::string& dir_flag) {
    if (no_cache) return DiskCache{};
    std::filesystem::path dir;
    if (!dir_flag.empty())
        dir = dir_flag;
    else if (const char* env = std::getenv("LADDERLAB_CACHE_DIR"))
        dir = env;
    else if (const char* xdg = std::getenv("XDG_CACHE_HOME"))
        dir = std::filesystem::path(xdg) / "ladderlab";
    else if (const char* home = std::getenv("HOME"))
        dir = std::filesystem::path(home) / ".cache" / "ladderlab";
    else
        return DiskCache{};
    return DiskCache(dir, [](const std::string& m) { std::cerr << "warning: " << m << '\n'; });
}

// Prime table backed by the cache. Tiny sieves are cheaper to rebuild than
// to store, so only larger tables hit the disk.
Sieve cached_sieve(const Config& cfg, std::uint64_t limit) {
    if (limit < 2) limit = 2;
    if (!cfg.cache.enabled() || limit < 65536) return Sieve(limit);
    auto primes = cache_get_or_build<std::vector<std::uint64_t>>(
        cfg.cache, primes_cache_key(limit), [&] { return segmented_primes(limit); }, pack_u64s,
        [&](const std::string& blob) -> std::optional<std::vector<std::uint64_t>> {
            auto v = unpack_u64s(blob);
            if (!v || v->empty() || v->back() > limit || !std::is_sorted(v->begin(), v->end()))
                return std::nullopt;
            return v;
        });
    return Sieve(limit, std::move(primes));
}

// --------------------------------------------------------------- handlers --

int cmd_ladder_cert(const Config& cfg, std::uint64_t p) {
    ser::Emitter em(cfg.format, std::cout);
    if (!is_prime(p)) throw std::invalid_argument("ladder cert: p must be prime");
    if (p > cfg.sieve_limit / 2)
        throw limit_exceeded("ladder cert: 2*p exceeds the sieve limit");
    const auto t0 = Clock::now();
    std::optional<Certificate> cert;
    try {
        cert = find_certificate(p, cfg.sieve_limit);
    } catch (const no_certificate&) {
    }
    em.begin("ladder cert", {});
    if (!cert) {
        em.emit(ser::no_certificate_payload(p), ms_since(t0));
        std::cerr << "ladder cert: no certificate exists for p=" << p << '\n';
        return 1;
    }
    em.emit(ser::certificate_payload(*cert), ms_since(t0));
    return 0;
}

// Certificate stream plus the per-weight invariant checks of verify_range;
// any failed check becomes its own record and flips the exit code.
int cmd_ladder_verify(const Config& cfg, std::uint64_t from, std::uint64_t to) {
    ser::Emitter em(cfg.format, std::cout);
    em.begin("ladder verify", {}); // json-only: reject csv before sieving
    if (from > to) throw std::invalid_argument("ladder verify: need --from <= --to");
    if (to > cfg.sieve_limit / 2)
        throw limit_exceeded("ladder verify: 2*to exceeds the sieve limit");
    const Sieve sieve = cached_sieve(cfg, 2 * to + 2);
    const auto& ps = sieve.primes();
    const auto first = std::lower_bound(ps.begin(), ps.end(), from);
    const auto last = std::upper_bound(ps.begin(), ps.end(), to);
    const std::vector<std::uint64_t> targets(first, last);

    struct Slot {
        std::string payload; // dumped certificate payload, empty on failure
        std::vector<VerifyFailure> fails;
        std::int64_t ms = 0;
        std::uint64_t weights = 0;
    };
    std::vector<Slot> slots(targets.size());
    parallel_for(targets.size(), cfg.threads, [&](std::size_t i) {
        const auto t0 = Clock::now();
        const std::uint64_t p = targets[i];
        Slot& slot = slots[i];
        const auto cert = find_certificate(p, sieve);
        if (!cert) {
            slot.fails.push_back({p, 0, "no_certificate"});
            slot.ms = ms_since(t0);
            return;
        }
        std::uint64_t k0 = p + 2;
        if (k0 % 2 != 0) ++k0;
        for (std::uint64_t k = k0; k <= cert->P + 1; k += 2) {
            const NebentypeChoice ch = select_nebentype(k, cert->P, cert->ell, cert->r);
            ++slot.weights;
            if (!(ch.j > ch.window_lo && ch.j <= ch.window_hi) || ch.j % 2 != 0 ||
                ch.j % ch.s != (k - 2) % ch.s) {
                slot.fails.push_back({p, k, "selection_invariant"});
                continue;
            }
            if (!(ch.weights[0] >= 2 && ch.weights[0] <= p + 1 && ch.weights[1] >= 2 &&
                  ch.weights[1] <= p + 1))
                slot.fails.push_back({p, k, "weight_out_of_range"});
        }
        slot.payload = ser::certificate_payload(*cert).dump();
        slot.ms = ms_since(t0);
    });

    std::uint64_t weights_checked = 0;
    std::size_t failures = 0;
    for (const Slot& slot : slots) {
        if (!slot.payload.empty()) em.emit_raw(slot.payload, slot.ms);
        for (const VerifyFailure& f : slot.fails) em.emit(ser::verify_failure_payload(f), slot.ms);
        weights_checked += slot.weights;
        failures += slot.fails.size();
    }
    std::cerr << "ladder verify: " << targets.size() << " primes, " << weights_checked
              << " weights checked, " << failures << " failures\n";
    return failures == 0 ? 0 : 1;
}

int cmd_ladder_chain(const Config& cfg, std::uint64_t start, std::uint64_t limit) {
    ser::Emitter em(cfg.format, std::cout);
    em.begin("ladder chain", {}); // json-only: reject csv before sieving
    if (!is_prime(start)) throw std::invalid_argument("ladder chain: start must be prime");
    const std::uint64_t top = limit < start ? start : limit;
    if (top > cfg.sieve_limit / 2)
        throw limit_exceeded("ladder chain: 2*limit exceeds the sieve limit");
    const Sieve sieve = cached_sieve(cfg, 2 * top + 2);
    std::uint64_t p = start;
    while (p <= limit) {
        const auto t0 = Clock::now();
        const auto cert = find_certificate(p, sieve);
        if (!cert) {
            em.emit(ser::no_certificate_payload(p), ms_since(t0));
            std::cerr << "ladder chain: stuck at p=" << p << '\n';
            return 1;
        }
        em.emit(ser::certificate_payload(*cert), ms_since(t0));
        p = cert->P;
    }
    return 0;
}

int cmd_ladder_paper_table(const Config& cfg, bool strict) {
    ser::Emitter em(cfg.format, std::cout);
    const auto t0 = Clock::now();
    const auto rows = published_choice_table();
    const auto ms = ms_since(t0);
    em.begin("ladder paper-table", {});
    bool any_flagged = false;
    for (const PublishedChoice& row : rows) {
        em.emit(ser::published_choice_payload(row), ms);
        any_flagged = any_flagged || row.flagged;
    }
    return (strict && any_flagged) ? 1 : 0;
}

int cmd_neben(const Config& cfg, std::uint64_t P, std::uint64_t pn, std::uint64_t k) {
    ser::Emitter em(cfg.format, std::cout);
    if (!is_prime(P) || !is_prime(pn)) throw std::invalid_argument("neben: --P and --pn must be prime");
    if (pn >= P) throw std::invalid_argument("neben: need --pn < --P");
    if (k % 2 != 0 || k < 2 || k > P + 1)
        throw std::invalid_argument("neben: --k must be even with 2 <= k <= P+1");
    const auto t0 = Clock::now();
    // Block size l^r: the largest exact odd prime-power divisor of P-1 that
    // passes the step inequality, falling back to the largest overall (the
    // window selection is defined either way).
    const auto pps = exact_odd_prime_power_divisors(P - 1);
    if (pps.empty()) {
        ojson payload;
        payload["P"] = P;
        payload["status"] = "no_odd_prime_power_block";
        em.begin("neben", {});
        em.emit(payload, ms_since(t0));
        std::cerr << "neben: P-1 has no odd prime-power divisor (P is a Fermat prime)\n";
        return 1;
    }
    const PrimePower* pick = nullptr;
    for (const PrimePower& pp : pps)
        if (check_inequality(P, pn, (pp.value - 1) / 2)) pick = &pp; // ascending: keep largest
    if (!pick) pick = &pps.back();
    const NebentypeChoice ch = nebentype_choice(k, P, pn, pick->ell, pick->r);
    em.begin("neben", {});
    em.emit(ser::nebentype_payload(ch, pick->ell, pick->r), ms_since(t0));
    return 0;
}

int cmd_cheb_pi(const Config& cfg, std::uint64_t x) {
    ser::Emitter em(cfg.format, std::cout);
    if (x > cfg.sieve_limit) throw limit_exceeded("cheb pi: x exceeds the sieve limit");
    const auto t0 = Clock::now();
    const Sieve sieve = cached_sieve(cfg, x);
    em.begin("cheb pi", {"x", "pi"});
    em.emit(ser::pi_point_payload(x, sieve.pi(x)), ms_since(t0));
    return 0;
}

int cmd_cheb_audit(const Config& cfg, std::uint64_t X, const std::string& a_text,
                   const std::string& b_text) {
    ser::Emitter em(cfg.format, std::cout);
    const Rational A = parse_rational(a_text, "--A");
    const Rational B = parse_rational(b_text, "--B");
    if (X > cfg.sieve_limit) throw limit_exceeded("cheb audit: --max exceeds the sieve limit");
    if (A.raw() <= 0 || B.raw() <= 0)
        throw std::invalid_argument("cheb audit: --A and --B must be positive");
    const auto t0 = Clock::now();
    const Sieve sieve = cached_sieve(cfg, X);
    const auto records = audit_pi_bounds(X, A, B, cfg.threads, cfg.sieve_limit, &sieve);
    const auto ms = ms_since(t0);
    em.begin("cheb audit", {"x", "pi_x", "lower_ok", "upper_ok"});
    bool any_fail = false;
    for (const PiAuditRecord& rec : records) {
        em.emit(ser::pi_audit_payload(rec), ms);
        any_fail = any_fail || rec.lower_ok == TriState::fails || rec.upper_ok == TriState::fails;
    }
    std::cerr << "cheb audit: " << records.size() << " non-holding points in (30, " << X << "]\n";
    return any_fail ? 1 : 0;
}

int cmd_cheb_gaps(const Config& cfg, const std::string& a_text, std::uint64_t lo,
                  std::uint64_t hi) {
    ser::Emitter em(cfg.format, std::cout);
    const Rational a = parse_rational(a_text, "--a");
    if (lo < 2) throw std::invalid_argument("cheb gaps: need --lo >= 2");
    if (a.raw() <= 0) throw std::invalid_argument("cheb gaps: --a must be positive");
    if (hi > cfg.sieve_limit) throw limit_exceeded("cheb gaps: --hi exceeds the sieve limit");
    const auto t0 = Clock::now();
    // +512 places the next prime after hi inside the table for every hi here.
    const Sieve sieve = cached_sieve(cfg, hi + 512);
    const GapAuditResult res = audit_gap_ratio(a, lo, hi, cfg.sieve_limit, &sieve);
    const auto ms = ms_since(t0);
    em.begin("cheb gaps", {"role", "p", "p_next", "bound_num", "bound_den", "violated"});
    em.emit(ser::gap_audit_payload(res.max_ratio_pair, "max-ratio"), ms);
    for (const GapAuditRecord& rec : res.violations)
        em.emit(ser::gap_audit_payload(rec, "violation"), ms);
    std::cerr << "cheb gaps: " << res.violations.size() << " violations in [" << lo << ", " << hi
              << "]\n";
    return res.violations.empty() ? 0 : 1;
}

int cmd_weights_twist(const Config& cfg, std::uint64_t k, std::uint64_t p,
                      const std::string& shape) {
    const auto t0 = Clock::now();
    // The twist maps validate their own domain (throwing for k, p out of
    // range), so run them before any output is produced.
    const TwistResult t = shape == "irreducible" ? twist_irreducible(k, p) : twist_split(k, p);
    ser::Emitter em(cfg.format, std::cout);
    em.begin("weights twist", {"p", "k", "shape", "twist_exponent", "new_weight"});
    em.emit(ser::twist_payload(k, p, shape, t), ms_since(t0));
    return 0;
}

int cmd_weights_dihedral(const Config& cfg, std::uint64_t p) {
    const auto t0 = Clock::now();
    const DihedralReport rep = dihedral_semistable(p);
    ser::Emitter em(cfg.format, std::cout);
    em.begin("weights dihedral", {"p", "exists", "weight", "class_number"});
    em.emit(ser::dihedral_payload(rep), ms_since(t0));
    return 0;
}

int cmd_census(const Config& cfg, std::uint64_t p, std::uint64_t L) {
    const auto t0 = Clock::now();
    CensusOptions opts;
    opts.separator_override = L;
    opts.threads = cfg.threads;
    // Mirror the library's own argument checks so nothing is printed (and no
    // table is built) on a doomed run.
    if (!is_prime(p)) throw std::invalid_argument("census: --p must be prime");
    if (p > opts.max_p)
        throw resource_limit("census: --p exceeds the resource bound " +
                             std::to_string(opts.max_p));
    if (L == 1) throw std::invalid_argument("census: --L must be at least 2");

    // The series tables dominate setup cost; fetch them through the cache.
    modforms::FpSeriesTables tables;
    if (cfg.cache.enabled()) {
        const std::uint64_t bound = L ? L : census_separator_bound(p);
        const auto seps = census_separator_primes(p, bound);
        if (!seps.empty()) {
            const CensusGeometry geom = census_geometry(p, seps.back());
            if (!geom.klist.empty()) {
                tables = cache_get_or_build<modforms::FpSeriesTables>(
                    cfg.cache, fp_tables_cache_key(p, geom.prec, geom.jmax, geom.amax),
                    [&] { return modforms::FpSeriesTables::build(p, geom.prec, geom.jmax, geom.amax); },
                    pack_fp_tables,
                    [&](const std::string& blob) -> std::optional<modforms::FpSeriesTables> {
                        auto t = unpack_fp_tables(blob);
                        if (!t || t->p != p || t->prec != geom.prec ||
                            t->delta_pow.size() != geom.jmax + 1 ||
                            t->e4_pow.size() != geom.amax + 1 || t->e6.size() != geom.prec)
                            return std::nullopt;
                        return t;
                    });
                opts.tables = &tables;
            }
        }
    }

    const CensusReport rep = census(p, opts);
    ser::Emitter em(cfg.format, std::cout);
    em.begin("census", ser::census_csv_columns());
    em.emit(ser::census_payload(rep), ms_since(t0));
    std::cerr << "census: p=" << rep.p << " N_total=" << rep.n_total << " orbits="
              << rep.orbit_count << " max_e=" << rep.max_e << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);

    CLI::App app{"prime-ladder certificates, bound audits, weight calculus, eigensystem census"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "json-lines";
    std::string cache_dir;
    bool no_cache = false;
    unsigned threads = 1;
    std::uint64_t sieve_limit = kDefaultSieveLimit;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json-lines", "csv"}))
        ->capture_default_str();
    app.add_option("--cache-dir", cache_dir, "cache directory (default: $LADDERLAB_CACHE_DIR or ~/.cache/ladderlab)");
    app.add_flag("--no-cache", no_cache, "disable the on-disk cache");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--sieve-limit", sieve_limit, "largest admissible sieve bound")
        ->check(CLI::PositiveNumber);

    const auto make_cfg = [&]() -> Config {
        Config cfg;
        cfg.format = *ser::parse_format(format); // membership already checked
        cfg.threads = threads;
        cfg.sieve_limit = sieve_limit;
        cfg.cache = make_cache(no_cache, cache_dir);
        return cfg;
    };

    int rc = 0;

    // ladder
    auto* ladder_cmd = app.add_subcommand("ladder", "induction-step certificates");
    ladder_cmd->require_subcommand(1);
    ladder_cmd->fallthrough();

    std::uint64_t cert_p = 0;
    auto* cert_cmd = ladder_cmd->add_subcommand("cert", "certificate for one base prime");
    cert_cmd->fallthrough();
    cert_cmd->add_option("p", cert_p, "base prime")->required();
    cert_cmd->callback([&] { rc = cmd_ladder_cert(make_cfg(), cert_p); });

    std::uint64_t verify_from = 0, verify_to = 0;
    auto* verify_cmd = ladder_cmd->add_subcommand("verify", "certificates for every prime in a range");
    verify_cmd->fallthrough();
    verify_cmd->add_option("--from", verify_from, "range start")->required();
    verify_cmd->add_option("--to", verify_to, "range end")->required();
    verify_cmd->callback([&] { rc = cmd_ladder_verify(make_cfg(), verify_from, verify_to); });

    std::uint64_t chain_start = 0, chain_limit = 0;
    auto* chain_cmd = ladder_cmd->add_subcommand("chain", "iterate certificates from a start prime");
    chain_cmd->fallthrough();
    chain_cmd->add_option("--start", chain_start, "starting prime")->required();
    chain_cmd->add_option("--limit", chain_limit, "stop once the step prime exceeds this")->required();
    chain_cmd->callback([&] { rc = cmd_ladder_chain(make_cfg(), chain_start, chain_limit); });

    bool strict = false;
    auto* table_cmd = ladder_cmd->add_subcommand("paper-table", "audit the published nebentype choices");
    table_cmd->fallthrough();
    table_cmd->add_flag("--strict", strict, "exit 1 when any row is flagged");
    table_cmd->callback([&] { rc = cmd_ladder_paper_table(make_cfg(), strict); });

    // neben
    std::uint64_t neben_P = 0, neben_pn = 0, neben_k = 0;
    auto* neben_cmd = app.add_subcommand("neben", "nebentype window selection for one weight");
    neben_cmd->fallthrough();
    neben_cmd->add_option("--P", neben_P, "step prime")->required();
    neben_cmd->add_option("--pn", neben_pn, "base prime")->required();
    neben_cmd->add_option("--k", neben_k, "weight")->required();
    neben_cmd->callback([&] { rc = cmd_neben(make_cfg(), neben_P, neben_pn, neben_k); });

    // cheb
    auto* cheb_cmd = app.add_subcommand("cheb", "prime-counting and prime-gap audits");
    cheb_cmd->require_subcommand(1);
    cheb_cmd->fallthrough();

    std::uint64_t pi_x = 0;
    auto* pi_cmd = cheb_cmd->add_subcommand("pi", "exact prime count");
    pi_cmd->fallthrough();
    pi_cmd->add_option("--x", pi_x, "count primes <= x")->required();
    pi_cmd->callback([&] { rc = cmd_cheb_pi(make_cfg(), pi_x); });

    std::uint64_t audit_max = 0;
    std::string audit_A = "921/1000", audit_B = "5526/5000";
    auto* audit_cmd = cheb_cmd->add_subcommand("audit", "audit A*x <= pi(x)*ln x <= B*x");
    audit_cmd->fallthrough();
    audit_cmd->add_option("--max", audit_max, "audit integers x in (30, max]")->required();
    audit_cmd->add_option("--A", audit_A, "lower coefficient n/d")->capture_default_str();
    audit_cmd->add_option("--B", audit_B, "upper coefficient n/d")->capture_default_str();
    audit_cmd->callback([&] { rc = cmd_cheb_audit(make_cfg(), audit_max, audit_A, audit_B); });

    std::string gaps_a;
    std::uint64_t gaps_lo = 0, gaps_hi = 0;
    auto* gaps_cmd = cheb_cmd->add_subcommand("gaps", "audit p_next <= a*p over a prime range");
    gaps_cmd->fallthrough();
    gaps_cmd->add_option("--a", gaps_a, "ratio bound n/d")->required();
    gaps_cmd->add_option("--lo", gaps_lo, "range start")->required();
    gaps_cmd->add_option("--hi", gaps_hi, "range end")->required();
    gaps_cmd->callback([&] { rc = cmd_cheb_gaps(make_cfg(), gaps_a, gaps_lo, gaps_hi); });

    // weights
    auto* weights_cmd = app.add_subcommand("weights", "Serre-weight twist calculus");
    weights_cmd->require_subcommand(1);
    weights_cmd->fallthrough();

    std::uint64_t twist_k = 0, twist_p = 0;
    std::string twist_shape;
    auto* twist_cmd = weights_cmd->add_subcommand("twist", "weight of the twisted representation");
    twist_cmd->fallthrough();
    twist_cmd->add_option("--k", twist_k, "weight")->required();
    twist_cmd->add_option("--p", twist_p, "characteristic")->required();
    twist_cmd->add_option("--shape", twist_shape, "local shape")
        ->required()
        ->check(CLI::IsMember({"irreducible", "split"}));
    twist_cmd->callback([&] { rc = cmd_weights_twist(make_cfg(), twist_k, twist_p, twist_shape); });

    std::uint64_t dihedral_p = 0;
    auto* dihedral_cmd = weights_cmd->add_subcommand("dihedral", "semistable dihedral criterion");
    dihedral_cmd->fallthrough();
    dihedral_cmd->add_option("--p", dihedral_p, "odd prime")->required();
    dihedral_cmd->callback([&] { rc = cmd_weights_dihedral(make_cfg(), dihedral_p); });

    // census
    std::uint64_t census_p = 0, census_L = 0;
    auto* census_cmd = app.add_subcommand("census", "mod-p eigensystem census");
    census_cmd->fallthrough();
    census_cmd->add_option("--p", census_p, "prime characteristic")->required();
    census_cmd->add_option("--L", census_L, "separator bound override");
    census_cmd->callback([&] { rc = cmd_census(make_cfg(), census_p, census_L); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const no_certificate& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const limit_exceeded& e) {
        std::cerr << "limit error: " << e.what() << '\n';
        return 2;
    } catch (const resource_limit& e) {
        std::cerr << "limit error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
