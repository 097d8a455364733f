// mss: decide and count moment-constrained k-subsets of evaluation sets over
// GF(q), report exact value-set sizes and Dickson fibers, audit the
// character-sum bounds, and self-test.
//
// Every run echoes its fully-resolved configuration (canonical field
// descriptor with modulus, defaulted budgets, seed) into the output header;
// identical configurations produce byte-identical output.  Exit codes:
// 0 computed answer, 1 usage or parse error, 2 budget exceeded.

#include "CLI11.hpp"
#include "json.hpp"

#include "mss/charsum.hpp"
#include "mss/counting.hpp"
#include "mss/errors.hpp"
#include "mss/evalset.hpp"
#include "mss/field.hpp"
#include "mss/moment_space.hpp"
#include "mss/regimes.hpp"
#include "mss/selftest.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace mss;

struct Opts {
  std::string field_text, set_text;
  uint32_t m = 1;
  std::vector<std::string> b_text;
  uint64_t k = 0;
  std::string format = "text";
  std::string engine = "dp";
  std::string family;
  std::string x0_text;
  uint64_t budget = 1'000'000'000;
  uint64_t memory = 2ull << 30;
  uint64_t brute_cap = 10'000'000;
  uint64_t search_budget = 200'000;
  uint64_t enum_cap = 1ull << 24;
  uint64_t max_list = 64;
  uint64_t samples = 0;  // 0 = exhaustive audit
  uint64_t seed = 0;
  uint32_t threads = 1;
  bool emit_all = false;
};

uint64_t env_budget(uint64_t fallback) {
  const char* v = std::getenv("MSS_BUDGET");
  if (!v || !*v) return fallback;
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v, &end, 10);
  if (errno || end == v || *end)
    throw std::invalid_argument("MSS_BUDGET is not a decimal integer");
  return x;
}

EngineLimits limits_of(const Opts& o) {
  return EngineLimits{o.budget, o.memory, o.brute_cap};
}

DecideOptions decide_opts(const Opts& o) {
  DecideOptions d;
  d.limits = limits_of(o);
  d.search_budget = o.search_budget;
  d.enum_cap = o.enum_cap;
  return d;
}

MomentTarget parse_targets(const Field& f, const Opts& o) {
  if (o.b_text.size() != o.m)
    throw std::invalid_argument("--b lists " + std::to_string(o.b_text.size()) +
                                " targets but --m is " + std::to_string(o.m));
  MomentTarget t;
  for (const std::string& s : o.b_text) t.b.push_back(parse_elem(f, s));
  return t;
}

void put_engine_config(json& cfg, const Opts& o) {
  cfg["budget"] = o.budget;
  cfg["memory"] = o.memory;
  cfg["brute_cap"] = o.brute_cap;
  cfg["search_budget"] = o.search_budget;
  cfg["enum_cap"] = o.enum_cap;
  cfg["seed"] = o.seed;
  cfg["threads"] = o.threads;
  cfg["format"] = o.format;
}

void text_header(std::ostream& os, const json& cfg) {
  for (const auto& [key, v] : cfg.items()) {
    os << "# " << key << ": ";
    if (v.is_string())
      os << v.get<std::string>();
    else if (v.is_array()) {
      bool first = true;
      for (const auto& e : v) {
        if (!first) os << ",";
        first = false;
        os << e.dump();
      }
    } else
      os << v.dump();
    os << "\n";
  }
}

std::string join_elems(const std::vector<Elem>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

// Exact regimes certify YES through a count; the certificate is more useful
// with a concrete subset attached, so reconstruct one when the boolean table
// fits the budget.  A failed reconstruction leaves the answer intact.
void attach_witness(const Field& f, const EvalSetDesc& d, const MomentTarget& t,
                    uint64_t k, const DecideOptions& dop, DecisionOutcome& out) {
  try {
    ReducedTarget red = reduce_targets(f, t);
    if (!red.consistent) return;
    if (k == 0) {
      out.cert.witness = std::vector<Elem>{};
      return;
    }
    ImageSet im = image_set(f, d, dop.enum_cap);
    if (k > im.size()) return;
    MomentSpace ms = MomentSpace::make(f, red.m_p);
    auto w = find_witness(f, im.elements, ms, red.active, k, ms.pack(red.b),
                          dop.limits);
    if (!w) return;
    for (uint32_t j = 1; j <= t.m(); ++j) {
      Elem sum = 0;
      for (Elem x : *w) sum = f.add(sum, f.pow(x, j));
      if (sum != t.b[j - 1])
        throw std::logic_error("reconstructed witness fails the moments");
    }
    out.cert.witness = std::move(*w);
  } catch (const BudgetExceeded&) {
    // witness omitted; the regime's own certificate stands
  }
}

int run_decide(const Opts& o) {
  Field f = parse_field(o.field_text);
  EvalSetDesc d = parse_set(f, o.set_text);
  MomentTarget t = parse_targets(f, o);

  json cfg;
  cfg["subcommand"] = "decide";
  cfg["field"] = f.descriptor();
  cfg["set"] = d.text();
  cfg["m"] = o.m;
  cfg["b"] = t.b;
  cfg["k"] = o.k;
  put_engine_config(cfg, o);

  DecideOptions dop = decide_opts(o);
  DecisionOutcome out = decide(f, d, t, o.k, dop);
  if (out.yes && !out.cert.witness) attach_witness(f, d, t, o.k, dop, out);

  if (o.format == "json") {
    json j;
    j["config"] = cfg;
    j["answer"] = out.yes ? "YES" : "NO";
    j["regime"] = out.regime;
    j["duality_applied"] = out.duality_applied;
    json cert = json::object();
    if (!out.cert.checks.empty()) {
      json hyps = json::array();
      for (const HypothesisCheck& c : out.cert.checks)
        hyps.push_back(json{{"name", c.name},
                            {"lhs", c.lhs},
                            {"rhs", c.rhs},
                            {"holds", c.holds}});
      cert["hypotheses"] = hyps;
    }
    if (out.cert.witness) cert["witness"] = *out.cert.witness;
    if (out.cert.count) cert["count"] = out.cert.count->str();
    j["certificate"] = cert;
    std::cout << j.dump(2) << "\n";
  } else {
    text_header(std::cout, cfg);
    std::cout << "answer: " << (out.yes ? "YES" : "NO") << "\n";
    std::cout << "regime: " << out.regime << "\n";
    std::cout << "duality: " << (out.duality_applied ? "yes" : "no") << "\n";
    if (out.cert.count) std::cout << "count: " << out.cert.count->str() << "\n";
    if (out.cert.witness)
      std::cout << "witness: "
                << (out.cert.witness->empty() ? "(empty)"
                                              : join_elems(*out.cert.witness))
                << "\n";
    for (const HypothesisCheck& c : out.cert.checks)
      std::cout << "hypothesis: " << c.name << " | lhs " << c.lhs << " | rhs "
                << c.rhs << " | " << (c.holds ? "holds" : "FAILS") << "\n";
  }
  return 0;
}

int run_count(const Opts& o) {
  Field f = parse_field(o.field_text);
  EvalSetDesc d = parse_set(f, o.set_text);
  MomentTarget t = parse_targets(f, o);

  json cfg;
  cfg["subcommand"] = "count";
  cfg["field"] = f.descriptor();
  cfg["set"] = d.text();
  cfg["m"] = o.m;
  cfg["b"] = t.b;
  cfg["k"] = o.k;
  cfg["engine"] = o.engine;
  put_engine_config(cfg, o);

  ReducedTarget red = reduce_targets(f, t);
  json j;
  j["config"] = cfg;

  if (o.engine == "bool") {
    bool reach = false;
    if (red.consistent) {
      ImageSet im = image_set(f, d, o.enum_cap);
      if (o.k <= im.size()) {
        MomentSpace ms = MomentSpace::make(f, red.m_p);
        ReachTable rt =
            reach_table(f, im.elements, ms, red.active, o.k, limits_of(o));
        reach = rt.at(o.k, ms.pack(red.b));
      }
    }
    j["reachable"] = reach;
    if (o.format == "json")
      std::cout << j.dump(2) << "\n";
    else {
      text_header(std::cout, cfg);
      std::cout << "reachable: " << (reach ? "yes" : "no") << "\n";
    }
    return 0;
  }

  BigInt c = 0;
  ImageSet im = image_set(f, d, o.enum_cap);
  if (o.engine == "brute")
    c = count_brute(f, im, t, o.k, limits_of(o));
  else if (red.consistent)
    c = count_exact_dp(f, im, red, o.k, limits_of(o));
  j["count"] = c.str();
  if (o.format == "json")
    std::cout << j.dump(2) << "\n";
  else {
    text_header(std::cout, cfg);
    std::cout << "count: " << c.str() << "\n";
  }
  return 0;
}

int run_valueset(const Opts& o) {
  Field f = parse_field(o.field_text);
  EvalSetDesc d = parse_set(f, o.set_text);

  json cfg;
  cfg["subcommand"] = "valueset";
  cfg["field"] = f.descriptor();
  cfg["set"] = d.text();
  cfg["enum_cap"] = o.enum_cap;
  cfg["max_list"] = o.max_list;
  cfg["seed"] = o.seed;
  cfg["threads"] = o.threads;
  cfg["format"] = o.format;

  ValueSetSize v = value_set_size(f, d, o.enum_cap);
  std::optional<std::vector<Elem>> elems;
  if (v.size <= o.max_list) {
    try {
      elems = image_set(f, d, o.enum_cap).elements;
    } catch (const BudgetExceeded&) {
      // size came from a closed formula; listing would enumerate past the cap
    }
  }

  if (o.format == "json") {
    json j;
    j["config"] = cfg;
    j["size"] = v.size;
    j["source"] = v.enumerated ? "enumeration" : "formula";
    if (elems) j["elements"] = *elems;
    std::cout << j.dump(2) << "\n";
  } else {
    text_header(std::cout, cfg);
    std::cout << "size: " << v.size << "\n";
    std::cout << "source: " << (v.enumerated ? "enumeration" : "formula")
              << "\n";
    if (elems) std::cout << "elements: " << join_elems(*elems) << "\n";
  }
  return 0;
}

int run_preimage(const Opts& o) {
  Field f = parse_field(o.field_text);
  EvalSetDesc d = parse_set(f, o.set_text);
  if (d.kind != EvalSetDesc::Kind::Dickson)
    throw std::invalid_argument("preimage requires a dickson set");
  Elem x0 = parse_elem(f, o.x0_text);

  json cfg;
  cfg["subcommand"] = "preimage";
  cfg["field"] = f.descriptor();
  cfg["set"] = d.text();
  cfg["x0"] = x0;
  cfg["seed"] = o.seed;
  cfg["threads"] = o.threads;
  cfg["format"] = o.format;

  Elem value = dickson_eval(f, d.n, d.a, x0);
  uint64_t fiber = preimage_count(f, d.n, d.a, x0);

  if (o.format == "json") {
    json j;
    j["config"] = cfg;
    j["value"] = value;
    j["preimages"] = fiber;
    std::cout << j.dump(2) << "\n";
  } else {
    text_header(std::cout, cfg);
    std::cout << "value: " << value << "\n";
    std::cout << "preimages: " << fiber << "\n";
  }
  return 0;
}

SumFamily parse_family(const std::string& name) {
  for (SumFamily fam :
       {SumFamily::CompleteField, SumFamily::MonomialImage,
        SumFamily::DicksonImage, SumFamily::DicksonFullDomain,
        SumFamily::DicksonEtaTwist, SumFamily::DicksonInverseTwist})
    if (name == family_name(fam)) return fam;
  throw std::invalid_argument("unknown sum family: " + name);
}

json record_json(const AuditRecord& r) {
  json j;
  j["type"] = "test";
  j["family"] = family_name(r.family);
  j["field"] = r.field;
  j["set"] = r.set;
  j["m"] = r.m;
  j["coeffs"] = r.coeffs;
  j["abs_sum"] = r.abs_sum;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["pass"] = r.pass;
  j["twin_gap"] = r.twin_gap;
  j["seed"] = r.seed;
  return j;
}

int run_audit(const Opts& o) {
  Field f = parse_field(o.field_text);
  EvalSetDesc d = parse_set(f, o.set_text);

  json cfg;
  cfg["type"] = "config";
  cfg["subcommand"] = "audit";
  cfg["field"] = f.descriptor();
  cfg["set"] = d.text();
  cfg["m"] = o.m;
  cfg["family"] = o.family.empty() ? "all" : o.family;
  cfg["coverage"] = o.samples ? "sampled" : "exhaustive";
  cfg["samples"] = o.samples;
  cfg["seed"] = o.seed;
  cfg["emit_all"] = o.emit_all;
  cfg["threads"] = o.threads;
  cfg["format"] = "ldjson";
  std::cout << cfg.dump() << "\n";

  Coverage cov;
  cov.exhaustive = o.samples == 0;
  cov.samples = o.samples;
  cov.seed = o.seed;
  cov.emit_all = o.emit_all;
  AuditSink sink = [](const AuditRecord& r) {
    std::cout << record_json(r).dump() << "\n";
  };

  AuditSummary sum = o.family.empty()
                         ? weil_audit(f, d, o.m, cov, sink)
                         : weil_audit_family(f, parse_family(o.family), d, o.m,
                                             cov, sink);

  json s;
  s["type"] = "summary";
  s["tested"] = sum.tested;
  s["violations"] = sum.violations;
  s["min_margin"] = sum.min_margin;
  s["max_twin_gap"] = sum.max_twin_gap;
  if (sum.tested > 0) {
    json w = record_json(sum.worst);
    w.erase("type");
    s["worst"] = w;
  }
  std::cout << s.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Opts o;
  try {
    o.budget = env_budget(o.budget);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{
      "decide, count, and certify moment-constrained k-subsets of monomial "
      "and Dickson value sets over GF(q)"};
  app.require_subcommand(1);

  auto add_field_set = [&](CLI::App* c) {
    c->add_option("--field", o.field_text,
                  "field: p | p^s | p^s:modulus=c0,..,cs | a prime power")
        ->required();
    c->add_option("--set", o.set_text,
                  "set: monomial:n=N | dickson:n=N,a=E | explicit:e1,e2,..")
        ->required();
  };
  auto add_instance = [&](CLI::App* c) {
    add_field_set(c);
    c->add_option("--m", o.m, "number of moment constraints")->required();
    c->add_option("--b", o.b_text,
                  "targets b_1..b_m; each an encoding or poly:c0,c1,..")
        ->required()
        ->expected(-1);
    c->add_option("--k", o.k, "subset size")->required();
  };
  auto add_engine = [&](CLI::App* c) {
    c->add_option("--budget", o.budget,
                  "transition budget (default: MSS_BUDGET env or 1e9)")
        ->capture_default_str();
    c->add_option("--memory", o.memory, "table memory budget, bytes")
        ->capture_default_str();
    c->add_option("--brute-cap", o.brute_cap, "max enumerated subsets")
        ->capture_default_str();
    c->add_option("--search-budget", o.search_budget, "small-k search nodes")
        ->capture_default_str();
    c->add_option("--enum-cap", o.enum_cap, "image materialization cap")
        ->capture_default_str();
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "sampling seed (echoed in the header)")
        ->capture_default_str();
    c->add_option("--threads", o.threads,
                  "worker count (engines currently run one worker)")
        ->check(CLI::Range(1u, 1u << 16))
        ->capture_default_str();
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "text | json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
  };

  CLI::App* cmd_decide =
      app.add_subcommand("decide", "is some k-subset on-target? (YES/NO)");
  add_instance(cmd_decide);
  add_engine(cmd_decide);
  add_common(cmd_decide);
  add_format(cmd_decide);

  CLI::App* cmd_count =
      app.add_subcommand("count", "exact number of on-target k-subsets");
  add_instance(cmd_count);
  cmd_count->add_option("--engine", o.engine, "dp | brute | bool")
      ->check(CLI::IsMember({"dp", "brute", "bool"}))
      ->capture_default_str();
  add_engine(cmd_count);
  add_common(cmd_count);
  add_format(cmd_count);

  CLI::App* cmd_valueset =
      app.add_subcommand("valueset", "exact size (and small listing) of the set");
  add_field_set(cmd_valueset);
  cmd_valueset
      ->add_option("--enum-cap", o.enum_cap, "image materialization cap")
      ->capture_default_str();
  cmd_valueset
      ->add_option("--max-list", o.max_list, "list elements up to this size")
      ->capture_default_str();
  add_common(cmd_valueset);
  add_format(cmd_valueset);

  CLI::App* cmd_preimage = app.add_subcommand(
      "preimage", "Dickson fiber size |D_n(.,a)^-1(D_n(x0,a))|");
  add_field_set(cmd_preimage);
  cmd_preimage->add_option("--x0", o.x0_text, "fiber base point")->required();
  add_common(cmd_preimage);
  add_format(cmd_preimage);

  CLI::App* cmd_audit = app.add_subcommand(
      "audit", "character-sum bound audit, one ldjson record per line");
  add_field_set(cmd_audit);
  cmd_audit->add_option("--m", o.m, "sweep coefficient degree cap")->required();
  cmd_audit
      ->add_option("--family", o.family,
                   "restrict to one sum family (default: all applicable)")
      ->check(CLI::IsMember({"complete-field", "monomial-image",
                             "dickson-image", "dickson-full-domain",
                             "dickson-eta-twist", "dickson-inverse-twist"}));
  cmd_audit->add_option("--samples", o.samples,
                        "sample this many coefficient vectors (0 = exhaustive)")
      ->capture_default_str();
  cmd_audit->add_flag("--emit-all", o.emit_all,
                      "emit every exhaustive record, not just violations");
  add_common(cmd_audit);

  CLI::App* cmd_selftest =
      app.add_subcommand("selftest", "run the built-in oracle suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_decide->parsed()) return run_decide(o);
    if (cmd_count->parsed()) return run_count(o);
    if (cmd_valueset->parsed()) return run_valueset(o);
    if (cmd_preimage->parsed()) return run_preimage(o);
    if (cmd_audit->parsed()) return run_audit(o);
    if (cmd_selftest->parsed()) {
      std::cout << "# subcommand: selftest\n";
      return run_selftest(std::cout).ok() ? 0 : 1;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
