#pragma once
// Record serialization for the command-line tools: every emitted document is
// an envelope {schema_version, command, payload, elapsed_ms} around a
// command-specific payload. Two formats:
//
//   json-lines  one envelope object per line, keys in documented order
//   csv         header row then one row per record, RFC-4180 quoting;
//               only available for flat payloads (each column a scalar)
//
// Payloads carry no floating point: values are exact integers, exact
// numerator/denominator pairs, booleans, or strings. elapsed_ms is the only
// field excluded from the determinism contract.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladderlab/cheb.hpp"
#include "ladderlab/census.hpp"
#include "ladderlab/ladder.hpp"
#include "ladderlab/rational.hpp"
#include "ladderlab/weights.hpp"

namespace ladderlab::ser {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// Exact integer as JSON: a number while it fits in 64 bits, else a decimal
// string (keeps arbitrary-precision values exact without float round-trips).
inline ojson exact_int(const mpz_class& z) {
    if (z.fits_ulong_p()) return static_cast<std::uint64_t>(z.get_ui());
    if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
    return z.get_str();
}

// ---------------------------------------------------------------------------
// payload builders
// ---------------------------------------------------------------------------

// One per-weight row of a certificate: the coset data and residual weights
// select_nebentype derives for weight k, plus whether both residual weights
// land in [2, p_n+1].
inline ojson certificate_weight_entry(const NebentypeChoice& ch, std::uint64_t p_n) {
    ojson e;
    e["k"] = ch.k;
    e["c"] = ch.c;
    e["j"] = ch.j;
    e["weights"] = ojson::array({ch.weights[0], ch.weights[1]});
    const bool contained = ch.weights[0] >= 2 && ch.weights[0] <= p_n + 1 &&
                           ch.weights[1] >= 2 && ch.weights[1] <= p_n + 1;
    e["contained"] = contained;
    return e;
}

inline ojson certificate_payload(const Certificate& cert) {
    ojson p;
    p["p_n"] = cert.p_n;
    p["P"] = cert.P;
    p["ell"] = cert.ell;
    p["r"] = cert.r;
    p["m"] = cert.m;
    p["s"] = cert.s;
    p["inequality_lhs"] = (cert.m + 1) * cert.P;
    p["inequality_rhs"] = (2 * cert.m + 1) * cert.p_n - cert.m;
    ojson weights = ojson::array();
    std::uint64_t k0 = cert.p_n + 2;
    if (k0 % 2 != 0) ++k0;
    for (std::uint64_t k = k0; k <= cert.P + 1; k += 2)
        weights.push_back(
            certificate_weight_entry(select_nebentype(k, cert.P, cert.ell, cert.r), cert.p_n));
    p["weights"] = std::move(weights);
    return p;
}

inline ojson no_certificate_payload(std::uint64_t p_n) {
    ojson p;
    p["p_n"] = p_n;
    p["status"] = "no_certificate";
    return p;
}

inline ojson verify_failure_payload(const VerifyFailure& f) {
    ojson p;
    p["p_n"] = f.p_n;
    if (f.k != 0) p["k"] = f.k;
    p["status"] = f.reason;
    return p;
}

inline ojson nebentype_payload(const NebentypeChoice& ch, std::uint64_t ell, unsigned r) {
    ojson p;
    p["P"] = ch.P;
    p["p_n"] = ch.p_n;
    p["k"] = ch.k;
    p["ell"] = ell;
    p["r"] = r;
    p["c"] = ch.c;
    p["s"] = ch.s;
    p["window_lo"] = ch.window_lo;
    p["window_hi"] = ch.window_hi;
    p["j"] = ch.j;
    p["weights"] = ojson::array({ch.weights[0], ch.weights[1]});
    p["contained"] = ch.contained;
    p["admissible"] = ch.admissible;
    return p;
}

inline ojson published_choice_payload(const PublishedChoice& pc) {
    ojson p;
    p["p_n"] = pc.p_n;
    p["P"] = pc.P;
    p["k"] = pc.k;
    p["published_exponents"] = pc.published_exponents;
    p["admissible"] = pc.admissible;
    p["model_j"] = pc.model_j;
    p["published_in_admissible"] = pc.published_in_admissible;
    p["published_contained"] = pc.published_contained;
    p["flagged"] = pc.flagged;
    return p;
}

inline ojson pi_point_payload(std::uint64_t x, std::uint64_t pi_x) {
    ojson p;
    p["x"] = x;
    p["pi"] = pi_x;
    return p;
}

inline ojson pi_audit_payload(const PiAuditRecord& rec) {
    ojson p;
    p["x"] = rec.x;
    p["pi_x"] = rec.pi_x;
    p["lower_ok"] = to_string(rec.lower_ok);
    p["upper_ok"] = to_string(rec.upper_ok);
    return p;
}

// role: "max-ratio" for the extremal pair, "violation" for each failing pair
inline ojson gap_audit_payload(const GapAuditRecord& rec, const std::string& role) {
    ojson p;
    p["role"] = role;
    p["p"] = rec.p;
    p["p_next"] = rec.p_next;
    p["bound_num"] = exact_int(rec.bound.num());
    p["bound_den"] = exact_int(rec.bound.den());
    p["violated"] = rec.violated;
    return p;
}

inline ojson twist_payload(std::uint64_t k, std::uint64_t p_, const std::string& shape,
                           const TwistResult& t) {
    ojson p;
    p["p"] = p_;
    p["k"] = k;
    p["shape"] = shape;
    p["twist_exponent"] = t.twist_exponent;
    p["new_weight"] = t.new_weight;
    return p;
}

inline ojson dihedral_payload(const DihedralReport& rep) {
    ojson p;
    p["p"] = rep.p;
    p["exists"] = rep.exists;
    p["weight"] = rep.weight ? ojson(*rep.weight) : ojson(nullptr);
    p["class_number"] = rep.class_number ? ojson(*rep.class_number) : ojson(nullptr);
    return p;
}

inline ojson census_payload(const CensusReport& rep) {
    ojson p;
    p["p"] = rep.p;
    p["separator"] = rep.separator;
    p["N_irred"] = rep.n_irreducible;
    p["N_red"] = rep.n_reducible;
    p["N_total"] = rep.n_total;
    p["max_e"] = rep.max_e;
    p["ratio_num"] = exact_int(rep.ratio.num());
    p["ratio_den"] = exact_int(rep.ratio.den());
    p["orbit_count"] = rep.orbit_count;
    p["near_collisions"] = rep.near_collisions;
    ojson orbits = ojson::array();
    for (const OrbitSummary& o : rep.orbits) {
        ojson e;
        e["e"] = o.e;
        e["orbit_size"] = o.orbit_size;
        e["weights"] = o.weights;
        orbits.push_back(std::move(e));
    }
    p["orbits"] = std::move(orbits);
    if (!rep.anomalies.empty()) p["anomalies"] = rep.anomalies;
    return p;
}

// The flat projection used for csv output: everything except the per-orbit
// lists (csv columns must be scalars).
inline const std::vector<std::string>& census_csv_columns() {
    static const std::vector<std::string> cols = {
        "p",         "separator", "N_irred",     "N_red",       "N_total",
        "max_e",     "ratio_num", "ratio_den",   "orbit_count", "near_collisions"};
    return cols;
}

// ---------------------------------------------------------------------------
// emitter
// ---------------------------------------------------------------------------

enum class Format { json_lines, csv };

inline std::optional<Format> parse_format(const std::string& s) {
    if (s == "json-lines") return Format::json_lines;
    if (s == "csv") return Format::csv;
    return std::nullopt;
}

// RFC-4180 field quoting: quote when the value contains a comma, a quote, or
// a line break; embedded quotes double.
inline std::string csv_quote(const std::string& v) {
    if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_cell(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return csv_quote(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number() ) return v.dump();
    throw std::invalid_argument("csv output requires scalar fields");
}

// Streams one command's records. json-lines wraps each payload in the
// envelope; csv writes the header up front (so an empty report still yields
// a header-only document) and projects each payload onto the declared
// columns. Commands whose payloads have no flat projection pass empty
// columns and must be rejected before any record is emitted.
class Emitter {
  public:
    Emitter(Format fmt, std::ostream& out) : fmt_(fmt), out_(out) {}

    bool csv_capable(const std::vector<std::string>& csv_columns) const {
        return fmt_ != Format::csv || !csv_columns.empty();
    }

    void begin(const std::string& command, const std::vector<std::string>& csv_columns) {
        command_ = command;
        columns_ = csv_columns;
        if (fmt_ == Format::csv) {
            if (columns_.empty())
                throw std::invalid_argument("csv format is not available for " + command +
                                            " (nested payload); use json-lines");
            out_ << "schema_version,command";
            for (const std::string& c : columns_) out_ << ',' << csv_quote(c);
            out_ << ",elapsed_ms\n";
        }
    }

    void emit(const ojson& payload, std::int64_t elapsed_ms) {
        if (fmt_ == Format::json_lines) {
            emit_raw(payload.dump(), elapsed_ms);
            return;
        }
        out_ << kSchemaVersion << ',' << csv_quote(command_);
        for (const std::string& c : columns_) {
            auto it = payload.find(c);
            out_ << ',' << (it == payload.end() ? "" : csv_cell(*it));
        }
        out_ << ',' << elapsed_ms << '\n';
    }

    // json-lines fast path for bulk streams: the payload is already a dumped
    // JSON document (command names are plain ASCII, so the envelope needs no
    // escaping).
    void emit_raw(const std::string& payload_json, std::int64_t elapsed_ms) {
        if (fmt_ != Format::json_lines)
            throw std::logic_error("emit_raw requires json-lines format");
        out_ << "{\"schema_version\":\"" << kSchemaVersion << "\",\"command\":\"" << command_
             << "\",\"payload\":" << payload_json << ",\"elapsed_ms\":" << elapsed_ms << "}\n";
    }

  private:
    Format fmt_;
    std::ostream& out_;
    std::string command_;
    std::vector<std::string> columns_;
};

} // namespace ladderlab::ser
