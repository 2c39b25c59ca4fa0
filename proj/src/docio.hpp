#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "certify.hpp"
#include "construct.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "sampler.hpp"

namespace cantordist {

// Canonical document form: ordered JSON whose exact numbers are "p/q"
// strings. Writers below fix the field order, so canonical_text is
// byte-stable across runs, and every from_doc is a strict inverse of the
// matching doc_from (round trips compare equal). Malformed input raises
// Errc::ConfigError naming the offending field.
using Doc = nlohmann::ordered_json;

// --- checked field access ----------------------------------------------------
// Each raises Errc::ConfigError naming the field when it is absent or of the
// wrong type.

const Doc& doc_field(const Doc& d, const char* key);
std::string doc_str(const Doc& d, const char* key);
std::uint64_t doc_uint(const Doc& d, const char* key);
bool doc_bool(const Doc& d, const char* key);
const Doc& doc_array(const Doc& d, const char* key);
double doc_num(const Doc& d, const char* key);  // accepts any JSON number

// --- scalar and geometry encodings -----------------------------------------

Doc doc_from_rat(const Rat& r);               // "p/q" string
Rat rat_from_doc(const Doc& d);               // accepts "p/q" strings and integers
Doc doc_from_iv(const Iv& v);                 // {"lo","hi"}
Iv iv_from_doc(const Doc& d);
Doc doc_from_pt(const Pt2& p);                // {"x","y"} rationals
Pt2 pt_from_doc(const Doc& d);
Doc doc_from_box(const Box2& b);              // {"x","y"} intervals
Box2 box_from_doc(const Doc& d);

Doc doc_from_phi(const PhiSpec& phi);         // {"kind","p"?}
PhiSpec phi_from_doc(const Doc& d);
std::string mode_to_string(ArithMode m);      // "exact" / "fast"
ArithMode mode_from_string(const std::string& s);
Doc doc_from_budget(const SearchBudget& b);   // {"max_depth","max_tasks","wall_clock_ms"}
SearchBudget budget_from_doc(const Doc& d);   // all fields optional, defaults kept

// Tagged set model: {"kind":"ifs","hull","maps":[{"ratio","offset"}...]},
// {"kind":"gaps","hull","g","rho","feasible_depth"}, or
// {"kind":"union","parts":[...]}.
Doc doc_from_set(const CantorSet& s);
CantorSet set_from_doc(const Doc& d);

// Tree shape as {"<label>": child_count} in layout order.
Doc doc_from_tree(const LabeledTree& t);
LabeledTree tree_from_doc(const Doc& d);

// --- certificates and reports -----------------------------------------------

Doc doc_from_certificate(const CoverageCertificate& c);   // "certificate_kind":"cover"
CoverageCertificate certificate_from_doc(const Doc& d);
Doc doc_from_partner(const PartnerResult& p);             // "result_kind":"partner"
PartnerResult partner_from_doc(const Doc& d);
Doc doc_from_chain(const ChainCertificate& c);            // "certificate_kind":"chain"
ChainCertificate chain_from_doc(const Doc& d);
Doc doc_from_tree_certificate(const TreeCertificate& c);  // "certificate_kind":"tree"
TreeCertificate tree_certificate_from_doc(const Doc& d);

Doc doc_from_verify(const VerifyReport& r);
Doc doc_from_dimension(const DimensionReport& r);
Doc doc_from_thickness(const ThicknessReport& r);
Doc doc_from_cover_report(const CoverReport& r);

// --- canonical text, hashing, files ----------------------------------------

// Two-space indentation plus a trailing newline; the byte form all
// determinism guarantees are stated against.
std::string canonical_text(const Doc& d);

// FNV-1a (64-bit) of the canonical text, rendered "fnv64:<16 hex digits>".
std::string doc_hash(const Doc& d);

Doc parse_text(const std::string& text);   // ConfigError on malformed JSON
Doc read_doc(const std::string& path);     // ConfigError on unreadable file
void write_text(const std::string& path, const std::string& text);

}  // namespace cantordist
