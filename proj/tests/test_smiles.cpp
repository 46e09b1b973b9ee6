#include <catch2/catch_amalgamated.hpp>

#include "bignn/smiles.hpp"

using namespace bignn;

namespace {

std::vector<int> hydrogens(const RepresentationGraph& g) {
  std::vector<int> h;
  for (const auto& a : g.atoms) h.push_back(a.num_hydrogens);
  return h;
}

}  // namespace

TEST_CASE("ethane: two carbons, one bond, three hydrogens each") {
  RepresentationGraph g = parse_smiles("CC");
  REQUIRE(g.atoms.size() == 2);
  REQUIRE(g.bonds.size() == 1);
  CHECK(g.bonds[0].type == BondType::Single);
  CHECK(hydrogens(g) == std::vector<int>{3, 3});
  for (const auto& a : g.atoms) {
    CHECK(a.atomic_number == 6);
    CHECK_FALSE(a.is_aromatic);
    CHECK(a.hybridization == Hybridization::Unspecified);
    CHECK(a.is_donor == TriState::Unspecified);
  }
}

TEST_CASE("benzene: six aromatic carbons, six ring bonds, one hydrogen each") {
  RepresentationGraph g = parse_smiles("c1ccccc1");
  REQUIRE(g.atoms.size() == 6);
  REQUIRE(g.bonds.size() == 6);
  for (const auto& a : g.atoms) {
    CHECK(a.is_aromatic);
    CHECK(a.num_hydrogens == 1);
  }
  for (const auto& b : g.bonds) CHECK(b.type == BondType::Aromatic);
}

TEST_CASE("acetic acid valence arithmetic") {
  RepresentationGraph g = parse_smiles("CC(=O)O");
  REQUIRE(g.atoms.size() == 4);
  REQUIRE(g.bonds.size() == 3);
  CHECK(hydrogens(g) == std::vector<int>{3, 0, 0, 1});
  CHECK(g.bonds[1].type == BondType::Double);
}

TEST_CASE("cyclopropane: three carbons, three bonds, two hydrogens each") {
  RepresentationGraph g = parse_smiles("C1CC1");
  REQUIRE(g.atoms.size() == 3);
  REQUIRE(g.bonds.size() == 3);
  CHECK(hydrogens(g) == std::vector<int>{2, 2, 2});
}

TEST_CASE("pyridine nitrogen carries no hydrogen") {
  RepresentationGraph g = parse_smiles("n1ccccc1");
  REQUIRE(g.atoms.size() == 6);
  CHECK(g.atoms[0].atomic_number == 7);
  CHECK(g.atoms[0].num_hydrogens == 0);
  for (std::size_t i = 1; i < 6; ++i) CHECK(g.atoms[i].num_hydrogens == 1);
}

TEST_CASE("bracket atoms use their explicit hydrogen count") {
  RepresentationGraph ammonium = parse_smiles("[NH4+]");
  REQUIRE(ammonium.atoms.size() == 1);
  CHECK(ammonium.atoms[0].atomic_number == 7);
  CHECK(ammonium.atoms[0].num_hydrogens == 4);

  RepresentationGraph hydroxide = parse_smiles("[O-]C");
  CHECK(hydroxide.atoms[0].num_hydrogens == 0);
  CHECK(hydroxide.atoms[1].num_hydrogens == 3);

  RepresentationGraph pyrrole = parse_smiles("c1cc[nH]c1");
  REQUIRE(pyrrole.atoms.size() == 5);
  CHECK(pyrrole.atoms[3].atomic_number == 7);
  CHECK(pyrrole.atoms[3].num_hydrogens == 1);
  CHECK(pyrrole.atoms[3].is_aromatic);

  RepresentationGraph iron = parse_smiles("[Fe]");
  CHECK(iron.atoms[0].atomic_number == 26);
  CHECK(iron.atoms[0].num_hydrogens == 0);
}

TEST_CASE("two-letter organic atoms and explicit bonds") {
  RepresentationGraph g = parse_smiles("ClC#CBr");
  REQUIRE(g.atoms.size() == 4);
  CHECK(g.atoms[0].atomic_number == 17);
  CHECK(g.atoms[3].atomic_number == 35);
  CHECK(g.bonds[1].type == BondType::Triple);
  CHECK(hydrogens(g) == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("ring closure bond order may be given at either end") {
  RepresentationGraph g = parse_smiles("C=1CCCCC1");
  REQUIRE(g.bonds.size() == 6);
  CHECK(g.bonds.back().type == BondType::Double);
  CHECK_THROWS_AS(parse_smiles("C=1CCCCC#1"), SmilesError);
}

TEST_CASE("branches restore the attachment point") {
  RepresentationGraph g = parse_smiles("CC(C)(C)C");  // neopentane
  REQUIRE(g.atoms.size() == 5);
  REQUIRE(g.bonds.size() == 4);
  int central = 0;
  for (const Bond& b : g.bonds) central += (b.a == 1) + (b.b == 1);
  CHECK(central == 4);
  CHECK(g.atoms[1].num_hydrogens == 0);
}

TEST_CASE("unsupported features are rejected with kind and byte offset") {
  struct Case {
    const char* s;
    std::size_t offset;
    std::string token;
  };
  const Case cases[] = {
      {"C/C=C/C", 1, "/"},
      {"C[C@H](N)O", 3, "@"},
      {"C\\C=C\\C", 1, "\\"},
      {"C*", 1, "*"},
      {"CC.CC", 2, "."},
      {"[13C]", 1, "1"},
  };
  for (const Case& c : cases) {
    INFO(c.s);
    try {
      parse_smiles(c.s);
      FAIL("expected SmilesError");
    } catch (const SmilesError& e) {
      CHECK(e.kind() == SmilesErrorKind::UnsupportedFeature);
      CHECK(e.offset() == c.offset);
      CHECK(e.token() == c.token);
    }
  }
}

TEST_CASE("syntax errors carry offsets, never a crash") {
  struct Case {
    const char* s;
    std::size_t offset;
  };
  const Case cases[] = {
      {"", 0},          // empty
      {"C(C", 1},       // unclosed branch
      {")C", 0},        // unmatched close
      {"C1CC", 1},      // unclosed ring
      {"C=", 1},        // dangling bond
      {"=C", 0},        // leading bond
      {"C==C", 2},      // double bond symbol
      {"C%1C", 1},      // %nn needs two digits
      {"C11", 2},       // ring bond to same atom
      {"[Zz]", 1},      // unknown element
      {"[C", 0},        // unterminated bracket
      {"C(=)O", 3},     // bond then branch close
  };
  for (const Case& c : cases) {
    INFO(c.s);
    try {
      parse_smiles(c.s);
      FAIL("expected SmilesError");
    } catch (const SmilesError& e) {
      CHECK(e.kind() == SmilesErrorKind::Syntax);
      CHECK(e.offset() == c.offset);
    }
  }
}

TEST_CASE("parsing is deterministic and counts follow the token structure") {
  const char* samples[] = {"CCO", "c1ccccc1C(=O)O", "N#N", "C1CCC1CC(Cl)Br",
                           "O=C(O)c1ccccc1", "CC%12CCCC%12"};
  for (const char* s : samples) {
    INFO(s);
    RepresentationGraph a = parse_smiles(s);
    RepresentationGraph b = parse_smiles(s);
    CHECK(a == b);
    a.validate();
  }
  // atom count == atom tokens; bonds == chain adjacencies + ring closures
  CHECK(parse_smiles("CC%12CCCC%12").bonds.size() == 6);
  CHECK(parse_smiles("O=C(O)c1ccccc1").atoms.size() == 9);
  CHECK(parse_smiles("O=C(O)c1ccccc1").bonds.size() == 9);
}
