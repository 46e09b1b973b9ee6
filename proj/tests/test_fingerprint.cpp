#include <catch2/catch_amalgamated.hpp>

#include "bignn/fingerprint.hpp"
#include "bignn/smiles.hpp"
#include "synthetic.hpp"

using namespace bignn;

TEST_CASE("identical graphs give identical fingerprints") {
  RepresentationGraph g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");  // aspirin
  CHECK(ecfp(g) == ecfp(g));
  CHECK(ecfp(g, 3, 128) == ecfp(g, 3, 128));
}

TEST_CASE("fingerprints are invariant under atom permutation, bit-exactly") {
  RngStream rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    RepresentationGraph g = synth::random_molecule(rng, "mol", 10, 10);
    std::vector<std::size_t> perm(g.atoms.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    RepresentationGraph h = synth::permute_atoms(g, perm);
    CHECK(ecfp(g, 2, 64) == ecfp(h, 2, 64));
    CHECK(ecfp_counts(g, 2, 64) == ecfp_counts(h, 2, 64));
  }
}

TEST_CASE("methane and ethane fingerprints differ") {
  CHECK_FALSE(ecfp(parse_smiles("C")) == ecfp(parse_smiles("CC")));
}

TEST_CASE("bit sets grow monotonically with radius") {
  RngStream rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    RepresentationGraph g = synth::random_molecule(rng, "mol");
    for (int r = 0; r < 3; ++r) {
      Fingerprint lo = ecfp(g, r, 64);
      Fingerprint hi = ecfp(g, r + 1, 64);
      for (std::size_t b = 0; b < 64; ++b)
        if (lo.bits[b]) CHECK(hi.bits[b]);
    }
  }
}

TEST_CASE("hex rendering is 16 chars for 64 bits") {
  Fingerprint fp;
  fp.bits.assign(64, 0);
  CHECK(fingerprint_hex(fp) == "0000000000000000");
  fp.bits[0] = 1;
  CHECK(fingerprint_hex(fp) == "0000000000000001");
  fp.bits[63] = 1;
  CHECK(fingerprint_hex(fp) == "8000000000000001");
  CHECK(fingerprint_hex(ecfp(parse_smiles("CC"))).size() == 16);
}

TEST_CASE("feature matrix holds one 0/1 fingerprint row per entity") {
  std::vector<RepresentationGraph> graphs{parse_smiles("CCO"), parse_smiles("c1ccccc1")};
  Matrix f = fingerprint_features(graphs, 2, 64);
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 64);
  bool any = false;
  for (double v : f.data()) {
    CHECK((v == 0.0 || v == 1.0));
    any = any || v == 1.0;
  }
  CHECK(any);
}

TEST_CASE("overlap counts shared bits") {
  Fingerprint a, b;
  a.bits = {1, 1, 0, 1};
  b.bits = {1, 0, 0, 1};
  CHECK(fingerprint_overlap(a, b) == 2.0);
}
