#include "jsum/json_io.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace jsum;
using Catch::Approx;

TEST_CASE("factorization artifacts round trip") {
  Factorization f = search_factorization(Space::lp(2.0, 4), 3, 5, 4, 120);
  Json j = factorization_to_json(f);
  CHECK(j.at("space") == "lp:2:4");
  CHECK(j.at("n") == 3);
  Factorization g = factorization_from_json(j);
  CHECK(g.a.matrix.isApprox(f.a.matrix, 1e-15));
  CHECK(g.b.matrix.isApprox(f.b.matrix, 1e-15));
  CHECK(g.sigma == Approx(f.sigma).margin(1e-12));
  CHECK(g.valid);

  // Stored quality must match the matrices.
  Json tampered = j;
  tampered["sigma"] = 99.0;
  CHECK_THROWS_AS(factorization_from_json(tampered), std::invalid_argument);
}

TEST_CASE("witness artifacts round trip, certified margins included") {
  for (int n : {2, 5}) {
    JWitness w = lq_example_witness(Exponent::finite(2.0), n);
    JWitness back = witness_from_json(witness_to_json(w));
    CHECK(back.space == w.space);
    CHECK(back.n == w.n);
    CHECK(back.margin == w.margin);
    for (int h = 0; h < n; ++h) CHECK(back.z[h] == w.z[h]);
  }

  // A stored margin above the evaluated one is rejected on load.
  JWitness w = lq_example_witness(Exponent::inf(), 3);
  Json j = witness_to_json(w);
  j["margin"] = 1.5;
  CHECK_THROWS_AS(witness_from_json(j), std::invalid_argument);
  Json short_z = witness_to_json(w);
  short_z["z"].erase(2);
  CHECK_THROWS_AS(witness_from_json(short_z), std::invalid_argument);
}

TEST_CASE("extraction reports serialize with all intermediate values") {
  ExtractionReport rep = extract_witness(canonical_l1_factorization(21), 2, 0.5);
  Json j = report_to_json(rep);
  CHECK(j.at("m") == 5);
  CHECK(j.at("j0") == 4);
  CHECK(j.at("i0") == 3);
  CHECK(j.at("direct_mode") == true);
  CHECK(j.at("f_prefix_values").size() == 2);
  CHECK(j.at("e_prefix_values").size() == 2);
  CHECK(j.at("solver_gaps").size() == rep.solver_gaps.size());
  CHECK(j.at("ground_bound_formula") == "R_10(R_10(21,5),5)");
  JWitness w = witness_from_json(j.at("witness"));
  CHECK(w.margin >= 0.5 - 1e-4);

  // Dumps are byte-stable.
  CHECK(j.dump(2) == report_to_json(rep).dump(2));
}
