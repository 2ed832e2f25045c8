#pragma once

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordist/cli/cache.hpp"
#include "ordist/cohomology.hpp"
#include "ordist/distribution.hpp"

namespace ordist::cli {

using nlohmann::json;

inline constexpr const char* kReportSchema = "ordist.report/1";

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_hypothesis = 2, exit_oracle = 3 };

/* Above this ray class group order the number-field commands need --slow. */
inline constexpr long kDefaultOrderBudget = 5000;

struct RunConfig {
  long d = 0;
  std::string modulus;
  std::vector<std::string> primes;
  long norm_bound = 100;
  long artin_bound = 0;
  std::uint64_t residue_bound = kResidueBound;
  std::string cache_dir;
  bool no_cache = false;
  std::string format = "json";
  int verbosity = 0;
  bool slow = false;
  long ell = 2;
  long max_m = 4;
  int max_r = -1;
};

/* Exact integers stay numbers while they fit in 64 bits, and become decimal
   strings beyond that. */
inline json jint(const Int& x) {
  if (x.fits_slong_p()) return json(x.get_si());
  return json(x.get_str());
}

inline json jinvariants(const AbGroup& A) {
  json out = json::array();
  for (const auto& d : A.invariants())
    if (d != 0) out.push_back(jint(d));
  return out;
}

inline json jgroup(const AbGroup& A) {
  json g{{"invariants", jinvariants(A)}, {"free_rank", A.rank()}};
  if (auto o = A.order()) g["order"] = jint(*o);
  return g;
}

inline std::string level_spec(const RayClassTower& T, const Level& e) { return T.level_modulus(e).spec(); }

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"ordist: ray class towers, distribution relations and their torsion"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kCodeVersion);
    add_common(app);

    auto* field = app.add_subcommand("field", "class group and roots of unity of Q(sqrt(-d))");
    add_field(field);

    auto* rayclass = app.add_subcommand("rayclass", "ray class group of a modulus, with inertia and Frobenius");
    add_field(rayclass);
    rayclass->add_option("-m,--modulus", cfg_.modulus, "modulus spec, e.g. p:7,p:11:0,p:23:0")->required();
    rayclass->add_option("--artin-bound", cfg_.artin_bound, "also list Artin images of primes of norm up to this")
        ->check(CLI::NonNegativeNumber);

    auto* torsion = app.add_subcommand("torsion", "torsion of the level group modulo the distribution relations");
    add_field(torsion);
    torsion->add_option("-m,--modulus", cfg_.modulus, "modulus spec")->required();

    auto* certify = app.add_subcommand("certify", "torsion certificate for three principal primes of norm 3 mod 4");
    add_field(certify);
    certify->add_option("-p,--prime", cfg_.primes, "prime: a rational prime or an ideal spec")->required()->expected(1, 3);

    auto* search = app.add_subcommand("search", "prime triples admissible for the torsion certificate");
    add_field(search);
    search->add_option("--norm-bound", cfg_.norm_bound, "largest prime norm")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("toralg-sweep", "synthetic frames: torsion parity law and Tor = H^2");
    sweep->add_option("--ell", cfg_.ell, "prime ell")->check(CLI::PositiveNumber);
    sweep->add_option("--max-m", cfg_.max_m, "largest frame length")->check(CLI::Range(1, 6));
    sweep->add_option("--max-r", cfg_.max_r, "largest r (default 2 for ell = 2, else 1)")->check(CLI::Range(0, 4));

    std::vector<const char*> argv{"ordist"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return exit_ok;
    } catch (const CLI::CallForVersion&) {
      out_ << kCodeVersion << "\n";
      return exit_ok;
    } catch (const CLI::ParseError& e) {
      err_ << e.what() << "\n";
      return exit_usage;
    }
    if (cfg_.format != "json" && cfg_.format != "text") {
      err_ << "--format must be json or text\n";
      return exit_usage;
    }

    std::string name = app.get_subcommands().front()->get_name();
    json report{{"schema", kReportSchema}, {"version", kCodeVersion}};
    report["command"] = echo(name);
    auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
      cache_ = Cache::open(cfg_.cache_dir, cfg_.no_cache);
      if (name == "field") code = cmd_field(report);
      if (name == "rayclass") code = cmd_rayclass(report);
      if (name == "torsion") code = cmd_torsion(report);
      if (name == "certify") code = cmd_certify(report);
      if (name == "search") code = cmd_search(report);
      if (name == "toralg-sweep") code = cmd_toralg_sweep(report);
    } catch (const Error& e) {
      code = e.code() == Errc::hypothesis_failed || e.code() == Errc::not_coprime_to_w ? exit_hypothesis
             : e.code() == Errc::oracle_mismatch                                       ? exit_oracle
                                                                                       : exit_usage;
      report["status"] = code == exit_hypothesis ? "hypothesis_failed" : code == exit_oracle ? "oracle_mismatch" : "error";
      report["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
      err_ << e.what() << "\n";
    }
    if (!report.contains("status")) report["status"] = code == exit_ok ? "ok" : code == exit_oracle ? "oracle_mismatch" : "failed";
    report["timing_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    emit(report);
    return code;
  }

 private:
  void add_common(CLI::App& app) {
    app.add_option("--cache", cfg_.cache_dir, "cache directory (default $ORDIST_CACHE, then ~/.cache/ordist)");
    app.add_flag("--no-cache", cfg_.no_cache, "do not read or write the cache");
    app.add_option("--format", cfg_.format, "json or text");
    app.add_flag("-v,--verbose", cfg_.verbosity, "progress on standard error");
    app.add_flag("--slow", cfg_.slow, "allow ray class groups beyond the default size budget");
    app.add_option("--residue-bound", cfg_.residue_bound, "largest residue ring to enumerate")->check(CLI::PositiveNumber);
  }

  void add_field(CLI::App* sub) {
    sub->add_option("-d", cfg_.d, "the field Q(sqrt(-d)), d squarefree")->required()->check(CLI::PositiveNumber);
  }

  json echo(const std::string& name) const {
    json args = json::object();
    if (name != "toralg-sweep") args["d"] = cfg_.d;
    if (name == "rayclass" || name == "torsion") args["modulus"] = cfg_.modulus;
    if (name == "rayclass") args["artin_bound"] = cfg_.artin_bound;
    if (name == "certify") args["primes"] = cfg_.primes;
    if (name == "search") args["norm_bound"] = cfg_.norm_bound;
    if (name == "toralg-sweep") {
      args["ell"] = cfg_.ell;
      args["max_m"] = cfg_.max_m;
      args["max_r"] = default_max_r();
    }
    return {{"name", name}, {"args", args}};
  }

  int default_max_r() const { return cfg_.max_r >= 0 ? cfg_.max_r : cfg_.ell == 2 ? 2 : 1; }

  void log(const std::string& msg) const {
    if (cfg_.verbosity > 0) err_ << "ordist: " << msg << "\n";
  }

  void emit(const json& report) {
    if (cfg_.format == "json") {
      out_ << report.dump(2) << "\n";
      return;
    }
    for (const auto& [k, v] : report.items()) out_ << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }

  void check_budget(const QuadField& K, const Modulus& m) const {
    Int order = ray_class_order_formula(K, m);
    if (!cfg_.slow && order > kDefaultOrderBudget)
      throw Error(Errc::modulus_too_large, "ray class group of order " + order.get_str() + " exceeds the default budget of " +
                                               std::to_string(kDefaultOrderBudget) + "; pass --slow");
  }

  int cmd_field(json& r) {
    auto K = make_field(cfg_.d);
    r["d"] = K.d();
    r["disc"] = K.disc();
    r["w"] = K.w();
    r["h"] = K.h();
    r["class_group"] = jinvariants(K.class_group());
    return exit_ok;
  }

  json rayclass_data(const QuadField& K, const Modulus& m) const {
    RayClassTower T(RayClassGroup(K, m, cfg_.residue_bound), cfg_.residue_bound);
    const auto& G = T.top();
    const Level top = T.top_level();
    json d{{"group", jgroup(G.group())}, {"order_formula", jint(ray_class_order_formula(K, m))}};
    json primes = json::array();
    for (std::size_t i = 0; i < T.num_primes(); ++i) {
      const auto& I = T.inertia(top, i);
      auto fr = T.frobenius(top, i);
      json dlog = json::array();
      for (long c : G.elements().decode(fr.representative)) dlog.push_back(c);
      primes.push_back({{"prime", T.prime(i).spec()},
                        {"norm", jint(T.prime(i).norm())},
                        {"exponent", top[i]},
                        {"inertia", jgroup(I.structure)},
                        {"frobenius", {{"dlog", dlog}, {"coset", fr.coset}}}});
    }
    d["primes"] = primes;
    json artin = json::array();
    if (cfg_.artin_bound > 0)
      for (const auto& [P, e] : G.artin_table(cfg_.artin_bound)) {
        json dlog = json::array();
        for (long c : G.elements().decode(e)) dlog.push_back(c);
        artin.push_back({{"prime", P.spec()}, {"dlog", dlog}});
      }
    d["artin"] = artin;
    return d;
  }

  int cmd_rayclass(json& r) {
    auto K = make_field(cfg_.d);
    auto m = parse_modulus(K, cfg_.modulus);
    check_budget(K, m);
    const std::string section = "rayclass.artin" + std::to_string(cfg_.artin_bound);
    json data;
    if (auto hit = cache_ ? cache_->load(K.d(), m.spec(), section) : std::nullopt) {
      log("cache hit " + section);
      data = hit->data;
    } else {
      data = rayclass_data(K, m);
      if (cache_) cache_->store(K.d(), m.spec(), section, data);
    }
    r["modulus"] = m.spec();
    for (auto& [k, v] : data.items()) r[k] = v;
    return exit_ok;
  }

  int cmd_torsion(json& r) {
    auto K = make_field(cfg_.d);
    auto m = parse_modulus(K, cfg_.modulus);
    check_budget(K, m);
    json data;
    IntMatrix relations, F;
    if (auto hit = cache_ ? cache_->load(K.d(), m.spec(), "presentation") : std::nullopt;
        hit && hit->matrices.count("relations") && hit->matrices.count("iwasawa")) {
      log("cache hit presentation");
      data = hit->data;
      relations = std::move(hit->matrices.at("relations"));
      F = std::move(hit->matrices.at("iwasawa"));
    } else {
      auto P = build_presentation(K, m, cfg_.residue_bound);
      log("presentation: " + std::to_string(P.num_generators()) + " generators, " +
          std::to_string(P.relations().rows()) + " relations");
      auto I = iwasawa_matrix(P);
      auto b = torsion_bound(P);
      json z = json::array();
      for (const auto& [u, zu] : b.z) z.push_back({{"level", level_spec(P.tower(), u)}, {"z", jint(zu)}});
      json levels = json::array();
      for (const auto& e : P.levels())
        levels.push_back({{"level", level_spec(P.tower(), e)}, {"order", P.tower().group(e).order()}});
      data = {{"generators", P.num_generators()},
              {"top_order", P.tower().top().order()},
              {"levels", levels},
              {"z", z},
              {"product_bound", jint(b.product_bound)},
              {"iwasawa_scale", jint(I.scale)}};
      relations = P.relations();
      F = I.F;
      if (cache_) cache_->store(K.d(), m.spec(), "presentation", data, {{"relations", &relations}, {"iwasawa", &F}});
    }
    const std::size_t gens = data["generators"].get<std::size_t>();
    auto o = torsion_oracles(relations, gens, F);
    check_oracles(o);
    TorsionBound b;
    for (const auto& z : data["z"]) b.product_bound *= z["z"].is_string() ? Int(z["z"].get<std::string>()) : Int(z["z"].get<long>());
    std::optional<Int> bn;
    if (gcd(m.norm(), Int(K.w())) == 1) bn = borne(K, m);
    b.borne = bn;
    check_torsion_bounds(b, o.by_relations);

    r["modulus"] = m.spec();
    r["generators"] = gens;
    r["relations"] = relations.rows();
    r["rank"] = o.rank;
    r["top_order"] = data["top_order"];
    r["torsion_invariants"] = jinvariants(o.by_relations);
    r["oracles"] = {{"relation_cokernel", jinvariants(o.by_relations)}, {"kernel_quotient", jinvariants(o.by_kernel)}};
    r["levels"] = data["levels"];
    r["z"] = data["z"];
    r["product_bound"] = data["product_bound"];
    r["borne"] = bn ? jint(*bn) : json(nullptr);
    r["iwasawa_scale"] = data["iwasawa_scale"];
    if (o.rank != data["top_order"].get<std::size_t>())
      throw Error(Errc::oracle_mismatch, "rank " + std::to_string(o.rank) + " differs from #G_m");
    return exit_ok;
  }

  static PrimeIdeal parse_prime_arg(const QuadField& K, const std::string& s) {
    bool digits = !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!digits) return parse_prime(K, s);
    long p = std::stol(s);
    if (!is_prime(p)) throw Error(Errc::not_prime, s + " is not prime");
    return prime_ideal(K, p, 0);
  }

  int cmd_certify(json& r) {
    auto K = make_field(cfg_.d);
    if (cfg_.primes.size() != 3) throw Error(Errc::invalid_argument, "certify needs exactly three primes");
    std::array<PrimeIdeal, 3> p{parse_prime_arg(K, cfg_.primes[0]), parse_prime_arg(K, cfg_.primes[1]),
                                parse_prime_arg(K, cfg_.primes[2])};
    std::sort(p.begin(), p.end());
    r["primes"] = {p[0].spec(), p[1].spec(), p[2].spec()};
    try {
      check_torsex_hypotheses(K, p);
    } catch (const Error& e) {
      r["status"] = "hypothesis_failed";
      r["hypothesis"] = e.what();
      return exit_hypothesis;
    }
    check_budget(K, Modulus(K, {{p[0], 1}, {p[1], 1}, {p[2], 1}}));
    auto c = torsex_certificate(K, p, cfg_.residue_bound);
    std::size_t support = 0;
    for (const auto& x : c.R)
      if (x != 0) ++support;
    json parity = json::array();
    for (const auto& pc : c.nu_parity_of_U.cases)
      parity.push_back({{"prime", pc.prime.spec()},
                        {"kind", pc.kind == RelationKind::ramified ? "ramified" : "unramified"},
                        {"degree_at_one", jint(pc.degree_at_one)},
                        {"holds", pc.holds}});
    r["modulus"] = Modulus(K, {{p[0], 1}, {p[1], 1}, {p[2], 1}}).spec();
    r["in_kernel"] = c.in_kernel;
    r["nu"] = jint(c.nu_R);
    r["support"] = support;
    r["relations_with_odd_nu"] = c.relations_with_odd_nu.size();
    r["nu_parity"] = {{"holds", c.nu_parity_of_U.holds}, {"cases", parity}};
    r["conclusion"] = c.conclusion;
    return c.conclusion ? exit_ok : exit_oracle;
  }

  int cmd_search(json& r) {
    auto K = make_field(cfg_.d);
    json triples = json::array();
    for (const auto& t : search_torsex(K, cfg_.norm_bound)) triples.push_back({t[0].spec(), t[1].spec(), t[2].spec()});
    r["w"] = K.w();
    r["count"] = triples.size();
    r["triples"] = triples;
    return exit_ok;
  }

  int cmd_toralg_sweep(json& r) {
    if (!is_prime(cfg_.ell)) throw Error(Errc::not_prime, std::to_string(cfg_.ell) + " is not prime");
    json rows = json::array();
    bool all = true;
    for (const auto& row : frame_torsion_sweep(cfg_.ell, static_cast<std::size_t>(cfg_.max_m), default_max_r())) {
      std::size_t agree = 0;
      for (const auto& t : row.tor_h2) agree += t.holds;
      rows.push_back({{"m", row.m},
                      {"g", row.g},
                      {"r", row.r},
                      {"torsion_invariants", jinvariants(row.torsion)},
                      {"expected", jinvariants(row.expected)},
                      {"top_degree", jinvariants(row.top_degree)},
                      {"tor_h2", {{"checked", row.tor_h2.size()}, {"agree", agree}}},
                      {"verdict", row.holds ? "ok" : "fail"}});
      all = all && row.holds;
    }
    r["ell"] = cfg_.ell;
    r["rows"] = rows;
    r["all_hold"] = all;
    return all ? exit_ok : exit_oracle;
  }

  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;
  std::optional<Cache> cache_;
};

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return App(out, err).run(args);
}

}  // namespace ordist::cli
