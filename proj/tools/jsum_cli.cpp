// Batch experiment runner over the jsum library: J-convexity upper bounds
// and certified enclosures (jn), factorization-quality search (sn), the
// witness -> factorization pipeline (thm1), the factorization -> witness
// extraction (thm2), and tower/Ramsey utilities (ramsey).
//
// Exit codes: 0 success, 1 usage, 2 internal assertion failure, 3 budget
// exhausted.  Every command is deterministic for a fixed --seed.

#include "jsum/extraction.hpp"
#include "jsum/jconvexity.hpp"
#include "jsum/json_io.hpp"
#include "jsum/near_triangular.hpp"
#include "jsum/operators.hpp"
#include "jsum/ramsey.hpp"
#include "jsum/tower.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace jsum;

struct Range {
  int lo = 0, hi = 0;
};

Range parse_range(const std::string& s) {
  auto pos = s.find("..");
  Range r;
  try {
    if (pos == std::string::npos) {
      r.lo = r.hi = std::stoi(s);
    } else {
      r.lo = std::stoi(s.substr(0, pos));
      r.hi = std::stoi(s.substr(pos + 2));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad range '" + s + "' (expected k or a..b)");
  }
  if (r.lo < 1 || r.hi < r.lo) throw std::invalid_argument("bad range '" + s + "'");
  return r;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
      out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.size(); ++i)
        out << row[i] << (i + 1 < row.size() ? "," : "\n");
    return out.str();
  }

  std::string to_json() const {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
  }
};

void emit(const Table& t, const std::string& out_path, const std::string& format) {
  std::string text = format == "json" ? t.to_json() : t.to_csv();
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << text;
  }
}

int run_jn(const std::string& space_spec, const std::string& n_range, std::uint64_t seed,
           int restarts, int iters, bool certify, double step, long long budget,
           const std::string& out, const std::string& format) {
  Space space = Space::parse(space_spec);
  Range r = parse_range(n_range);
  Table t;
  t.header = {"space", "n", "margin_best", "J_upper"};
  if (certify) {
    t.header.push_back("J_lo");
    t.header.push_back("J_hi");
  }
  for (int n = r.lo; n <= r.hi; ++n) {
    JWitness w = j_upper_search(space, n, seed, restarts, iters);
    std::vector<std::string> row{space.spec(), std::to_string(n), format_double(w.margin),
                                 format_double(1.0 - w.margin)};
    if (certify) {
      MarginEnclosure enc = j_certify_grid(space, n, step, budget);
      row.push_back(format_double(1.0 - enc.hi));
      row.push_back(format_double(1.0 - enc.lo));
    }
    t.rows.push_back(std::move(row));
  }
  emit(t, out, format);
  return 0;
}

int run_sn(const std::string& space_spec, const std::string& n_range, std::uint64_t seed,
           int restarts, int iters, const std::string& out, const std::string& format) {
  Space space = Space::parse(space_spec);
  Range r = parse_range(n_range);
  Table t;
  t.header = {"space", "n", "sigma_best", "defect"};
  for (int n = r.lo; n <= r.hi; ++n) {
    Factorization f = search_factorization(space, n, seed, restarts, iters);
    t.rows.push_back({space.spec(), std::to_string(n), format_double(f.sigma),
                      format_double(f.defect)});
  }
  emit(t, out, format);
  return 0;
}

int run_thm1(int n, const std::string& witness_path, const std::string& out,
             const std::string& format) {
  JWitness w = witness_path.empty() ? lq_example_witness(Exponent::inf(), n)
                                    : witness_from_json(read_json_file(witness_path));
  Factorization f = factorization_from_witness(w.space, w);
  double budget = 1.0 + 2.0 * w.n * w.n * (1.0 - w.margin);
  Table t;
  t.header = {"space", "n", "margin", "sigma", "sigma_budget", "defect"};
  t.rows.push_back({w.space.spec(), std::to_string(w.n), format_double(w.margin),
                    format_double(f.sigma), format_double(budget), format_double(f.defect)});
  emit(t, "", format);
  if (!out.empty()) write_json_file(out, factorization_to_json(f));
  return 0;
}

int run_thm2(const std::string& fact_path, const std::string& canonical, int big_n, int n,
             double eps, std::uint64_t seed, long long budget, const std::string& out,
             const std::string& format) {
  std::optional<Factorization> f;
  if (!fact_path.empty()) {
    f = factorization_from_json(read_json_file(fact_path));
  } else if (canonical == "l1") {
    f = canonical_l1_factorization(big_n);
  } else if (canonical == "linf") {
    f = canonical_linf_factorization(big_n);
  } else {
    throw std::invalid_argument("thm2: give --fact FILE or --canonical {l1,linf}");
  }
  ExtractionOptions opt;
  opt.seed = seed;
  opt.coloring_budget = budget;
  ExtractionReport rep = extract_witness(*f, n, eps, opt);
  Table t;
  t.header = {"space",  "N",    "n",     "eps",   "m",          "j0",
              "i0",     "mode", "margin", "slack", "worst_case_N"};
  t.rows.push_back({f->a.codomain.spec(), std::to_string(f->n), std::to_string(n),
                    format_double(eps), std::to_string(rep.m), std::to_string(rep.j0),
                    std::to_string(rep.i0), rep.direct_mode ? "direct" : "ramsey",
                    format_double(rep.witness.margin), format_double(rep.slack),
                    rep.ground_bound});
  emit(t, "", format);
  if (!out.empty()) write_json_file(out, report_to_json(rep));
  return 0;
}

int run_ramsey_search(int big_n, int k, int r, int target, std::uint64_t seed,
                      long long budget) {
  // Deterministic pseudo-random coloring derived from the seed.
  Coloring f = [seed, r](const std::vector<int>& subset) {
    std::uint64_t h = seed;
    for (int v : subset) h = derive_seed(h, static_cast<std::uint64_t>(v));
    return 1 + static_cast<int>(h % static_cast<std::uint64_t>(r));
  };
  MonoResult res = monochromatic_search(big_n, k, r, f, target, budget);
  switch (res.status) {
    case MonoStatus::Found: {
      std::cout << "found color=" << res.color << " subset=";
      for (std::size_t i = 0; i < res.subset.size(); ++i)
        std::cout << (i ? "," : "") << res.subset[i];
      std::cout << " evals=" << res.evals << "\n";
      return 0;
    }
    case MonoStatus::NoneExists:
      std::cout << "exhausted, none exists (evals=" << res.evals << ")\n";
      return 0;
    case MonoStatus::BudgetExhausted:
      std::cout << "budget exhausted (evals=" << res.evals << ")\n";
      return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"J-convexity and summation-operator factorization toolkit"};
  app.require_subcommand(1);

  std::string space_spec, n_range, out_path, format = "csv", witness_path, fact_path, canonical;
  std::uint64_t seed = 1;
  int restarts = 24, iters = 400, n = 2, big_n = 21, k = 2, r = 2, target = 3, g = 0;
  long long budget = 50'000'000, lvalue = 1, cvalue = 2, m_base = 0;
  double step = 0.02, eps = 0.5;
  bool certify = false;

  auto* jn = app.add_subcommand("jn", "J-convexity margins and upper bounds");
  jn->add_option("--space", space_spec, "space spec, e.g. lp:2:8 or l2sum:2:(lp:1:4)")->required();
  jn->add_option("--n", n_range, "n or inclusive range a..b")->required();
  jn->add_option("--seed", seed);
  jn->add_option("--restarts", restarts);
  jn->add_option("--iters", iters);
  jn->add_flag("--certify", certify, "add a certified grid enclosure (small dim only)");
  jn->add_option("--step", step, "grid step for --certify");
  jn->add_option("--budget", budget, "grid evaluation budget");
  jn->add_option("--out", out_path);
  jn->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* sn = app.add_subcommand("sn", "factorization quality upper bounds");
  sn->add_option("--space", space_spec)->required();
  sn->add_option("--n", n_range)->required();
  sn->add_option("--seed", seed);
  sn->add_option("--restarts", restarts)->default_val(16);
  sn->add_option("--iters", iters)->default_val(600);
  sn->add_option("--out", out_path);
  sn->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* thm1 = app.add_subcommand("thm1", "witness -> factorization pipeline");
  thm1->add_option("--n", n, "witness length when constructing the default witness");
  thm1->add_option("--witness", witness_path, "witness JSON file");
  thm1->add_option("--out", out_path, "write the factorization JSON here");
  thm1->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* thm2 = app.add_subcommand("thm2", "factorization -> witness extraction");
  thm2->add_option("--fact", fact_path, "factorization JSON file");
  thm2->add_option("--canonical", canonical, "build the canonical factorization: l1 or linf");
  thm2->add_option("--N", big_n, "ground size for --canonical");
  thm2->add_option("--n", n, "witness length");
  thm2->add_option("--eps", eps);
  thm2->add_option("--seed", seed);
  long long thm2_budget = 20000;
  thm2->add_option("--budget", thm2_budget, "coloring evaluation budget");
  thm2->add_option("--out", out_path, "write the extraction report JSON here");
  thm2->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* ramsey = app.add_subcommand("ramsey", "tower and Ramsey utilities");
  ramsey->require_subcommand(1);
  auto* tower_cmd = ramsey->add_subcommand("tower", "print P_g(m)");
  tower_cmd->add_option("--g", g)->required();
  tower_cmd->add_option("--m", m_base)->required();
  auto* bound_cmd = ramsey->add_subcommand("bound", "print the bound P_k(c*l) on R_k(l,r)");
  bound_cmd->add_option("--k", k)->required();
  bound_cmd->add_option("--l", lvalue)->required();
  bound_cmd->add_option("--r", r)->required();
  bound_cmd->add_option("--c", cvalue)->default_val(2);
  auto* search_cmd = ramsey->add_subcommand("search", "monochromatic search on a seeded coloring");
  search_cmd->add_option("--N", big_n)->required();
  search_cmd->add_option("--target", target)->required();
  search_cmd->add_option("--k", k)->default_val(2);
  search_cmd->add_option("--r", r)->default_val(2);
  search_cmd->add_option("--seed", seed);
  search_cmd->add_option("--budget", budget)->default_val(2'000'000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(jn))
      return run_jn(space_spec, n_range, seed, restarts, iters, certify, step, budget, out_path,
                    format);
    if (app.got_subcommand(sn))
      return run_sn(space_spec, n_range, seed, restarts, iters, out_path, format);
    if (app.got_subcommand(thm1)) return run_thm1(n, witness_path, out_path, format);
    if (app.got_subcommand(thm2))
      return run_thm2(fact_path, canonical, big_n, n, eps, seed, thm2_budget, out_path, format);
    if (app.got_subcommand(ramsey)) {
      if (ramsey->got_subcommand(tower_cmd)) {
        std::cout << jsum::tower(g, jsum::BigInt(m_base)).str() << "\n";
        return 0;
      }
      if (ramsey->got_subcommand(bound_cmd)) {
        std::cout << ramsey_upper(k, jsum::BigInt(lvalue), r, jsum::BigInt(cvalue)).str() << "\n";
        return 0;
      }
      if (ramsey->got_subcommand(search_cmd))
        return run_ramsey_search(big_n, k, r, target, seed, budget);
    }
    std::cerr << "no command selected\n";
    return 1;
  } catch (const budget_exhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const check_failed& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
