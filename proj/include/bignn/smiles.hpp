#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bignn/errors.hpp"
#include "bignn/graph.hpp"

namespace bignn {

namespace smiles_detail {

inline const std::map<std::string, int, std::less<>>& element_table() {
  static const std::map<std::string, int, std::less<>> table = {
      {"H", 1},   {"He", 2},  {"Li", 3},  {"Be", 4},  {"B", 5},   {"C", 6},
      {"N", 7},   {"O", 8},   {"F", 9},   {"Ne", 10}, {"Na", 11}, {"Mg", 12},
      {"Al", 13}, {"Si", 14}, {"P", 15},  {"S", 16},  {"Cl", 17}, {"Ar", 18},
      {"K", 19},  {"Ca", 20}, {"Ti", 22}, {"Cr", 24}, {"Mn", 25}, {"Fe", 26},
      {"Co", 27}, {"Ni", 28}, {"Cu", 29}, {"Zn", 30}, {"Ga", 31}, {"Ge", 32},
      {"As", 33}, {"Se", 34}, {"Br", 35}, {"Sr", 38}, {"Mo", 42}, {"Ag", 47},
      {"Cd", 48}, {"Sn", 50}, {"Sb", 51}, {"Te", 52}, {"I", 53},  {"Ba", 56},
      {"Pt", 78}, {"Au", 79}, {"Hg", 80}, {"Pb", 82}, {"Bi", 83}};
  return table;
}

// Default valences driving implicit-hydrogen counts; zero means "no implicit
// hydrogens" (metals, anything exotic must use bracket notation).
inline int default_valence(int atomic_number) {
  switch (atomic_number) {
    case 5: return 3;   // B
    case 6: return 4;   // C
    case 7: return 3;   // N
    case 8: return 2;   // O
    case 15: return 3;  // P
    case 16: return 2;  // S
    case 9:
    case 17:
    case 35:
    case 53: return 1;  // halogens
    default: return 0;
  }
}

inline int bond_order(BondType t) {
  switch (t) {
    case BondType::Single: return 1;
    case BondType::Double: return 2;
    case BondType::Triple: return 3;
    case BondType::Aromatic: return 1;  // aromatic atoms use the neighbor rule instead
  }
  return 1;
}

}  // namespace smiles_detail

// Parser over the SMILES subset used by the dataset format: organic-subset
// atoms (B C N O P S F Cl Br I, aromatic b c n o p s), bracket atoms with
// explicit H count and charge, bonds - = # :, branches, ring closures
// (digit and %nn). Stereo, isotopes, wildcards and multi-component dots are
// rejected as UnsupportedFeature with the byte offset of the token.
class SmilesParser {
public:
  static RepresentationGraph parse(std::string_view s) {
    SmilesParser p(s);
    p.run();
    return std::move(p.graph_);
  }

private:
  struct AtomState {
    bool aromatic = false;
    bool bracket = false;
    int explicit_h = 0;  // only meaningful for bracket atoms
  };
  struct RingEntry {
    int atom = -1;
    std::optional<BondType> bond;
    std::size_t offset = 0;
  };

  explicit SmilesParser(std::string_view s) : s_(s) {}

  std::string_view s_;
  std::size_t pos_ = 0;
  RepresentationGraph graph_;
  std::vector<AtomState> state_;
  int prev_atom_ = -1;
  std::optional<BondType> pending_bond_;
  std::size_t pending_bond_offset_ = 0;
  std::vector<std::pair<int, std::size_t>> branch_stack_;  // (atom, '(' offset)
  std::map<int, RingEntry> open_rings_;

  [[noreturn]] void syntax(std::size_t at, const std::string& token, const std::string& msg) {
    throw SmilesError(SmilesErrorKind::Syntax, at, token, msg);
  }
  [[noreturn]] void unsupported(std::size_t at, const std::string& token) {
    throw SmilesError(SmilesErrorKind::UnsupportedFeature, at, token,
                      "unsupported SMILES feature");
  }

  void run() {
    if (s_.empty()) syntax(0, "", "empty SMILES string");
    while (pos_ < s_.size()) step();
    if (pending_bond_) syntax(pending_bond_offset_, "", "dangling bond at end of input");
    if (!branch_stack_.empty())
      syntax(branch_stack_.back().second, "(", "unclosed branch");
    if (!open_rings_.empty())
      syntax(open_rings_.begin()->second.offset, "", "unclosed ring closure");
    if (graph_.atoms.empty()) syntax(0, "", "no atoms");
    assign_hydrogens();
    graph_.validate();
  }

  void step() {
    const char c = s_[pos_];
    const std::size_t at = pos_;
    switch (c) {
      case '-': set_bond(BondType::Single, at); return;
      case '=': set_bond(BondType::Double, at); return;
      case '#': set_bond(BondType::Triple, at); return;
      case ':': set_bond(BondType::Aromatic, at); return;
      case '/':
      case '\\': unsupported(at, std::string(1, c));
      case '*': unsupported(at, "*");
      case '.': unsupported(at, ".");
      case '@': unsupported(at, "@");
      case '(': {
        if (prev_atom_ < 0) syntax(at, "(", "branch before any atom");
        if (pending_bond_) syntax(at, "(", "bond before branch open");
        branch_stack_.push_back({prev_atom_, at});
        ++pos_;
        return;
      }
      case ')': {
        if (branch_stack_.empty()) syntax(at, ")", "unmatched branch close");
        if (pending_bond_) syntax(at, ")", "dangling bond before branch close");
        prev_atom_ = branch_stack_.back().first;
        branch_stack_.pop_back();
        ++pos_;
        return;
      }
      case '%': {
        if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
          syntax(at, "%", "%nn ring closure needs two digits");
        const int id = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
        pos_ += 3;
        ring_closure(id, at);
        return;
      }
      case '[': parse_bracket_atom(at); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      ring_closure(c - '0', at);
      return;
    }
    parse_organic_atom(at);
  }

  void set_bond(BondType t, std::size_t at) {
    if (prev_atom_ < 0) syntax(at, std::string(1, s_[at]), "bond before any atom");
    if (pending_bond_) syntax(at, std::string(1, s_[at]), "two bond symbols in a row");
    pending_bond_ = t;
    pending_bond_offset_ = at;
    ++pos_;
  }

  void parse_organic_atom(std::size_t at) {
    const char c = s_[pos_];
    int z = 0;
    bool aromatic = false;
    std::string token(1, c);
    if (c == 'C' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
      z = 17;
      token = "Cl";
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
      z = 35;
      token = "Br";
      pos_ += 2;
    } else {
      switch (c) {
        case 'B': z = 5; break;
        case 'C': z = 6; break;
        case 'N': z = 7; break;
        case 'O': z = 8; break;
        case 'P': z = 15; break;
        case 'S': z = 16; break;
        case 'F': z = 9; break;
        case 'I': z = 53; break;
        case 'b': z = 5; aromatic = true; break;
        case 'c': z = 6; aromatic = true; break;
        case 'n': z = 7; aromatic = true; break;
        case 'o': z = 8; aromatic = true; break;
        case 'p': z = 15; aromatic = true; break;
        case 's': z = 16; aromatic = true; break;
        default: syntax(at, token, "unexpected character");
      }
      ++pos_;
    }
    add_atom(z, aromatic, false, 0, at);
  }

  void parse_bracket_atom(std::size_t open_at) {
    ++pos_;  // consume '['
    if (pos_ >= s_.size()) syntax(open_at, "[", "unterminated bracket atom");
    if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) unsupported(pos_, std::string(1, s_[pos_]));
    // element symbol: aromatic lowercase or Uppercase[lowercase]
    int z = 0;
    bool aromatic = false;
    if (s_[pos_] == 'b' || s_[pos_] == 'c' || s_[pos_] == 'n' || s_[pos_] == 'o' ||
        s_[pos_] == 'p' || s_[pos_] == 's') {
      aromatic = true;
      switch (s_[pos_]) {
        case 'b': z = 5; break;
        case 'c': z = 6; break;
        case 'n': z = 7; break;
        case 'o': z = 8; break;
        case 'p': z = 15; break;
        default: z = 16; break;
      }
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(s_[pos_]))) {
      // A bracket holds exactly one atom, so a trailing lowercase letter can
      // only be the second letter of a two-letter symbol.
      std::string sym(1, s_[pos_]);
      ++pos_;
      if (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_]))) {
        std::string two = sym + s_[pos_];
        if (smiles_detail::element_table().count(two)) {
          sym = two;
          ++pos_;
        }
      }
      auto it = smiles_detail::element_table().find(sym);
      if (it == smiles_detail::element_table().end())
        syntax(open_at + 1, sym, "unknown element symbol");
      z = it->second;
    } else {
      const char bad = s_[pos_];
      if (bad == '@' || bad == '*') unsupported(pos_, std::string(1, bad));
      syntax(pos_, std::string(1, bad), "expected element symbol");
    }
    // optional explicit hydrogen count
    int h = 0;
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      h = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        h = s_[pos_] - '0';
        ++pos_;
      }
    }
    // optional charge (stored only to accept the syntax; bracket atoms carry
    // explicit hydrogen counts, so charge does not change H)
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) ++pos_;
      }
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') {
      if (pos_ < s_.size() && s_[pos_] == '@') unsupported(pos_, "@");
      syntax(pos_ < s_.size() ? pos_ : open_at, pos_ < s_.size() ? std::string(1, s_[pos_]) : "[",
             "expected ']'");
    }
    ++pos_;  // consume ']'
    add_atom(z, aromatic, true, h, open_at);
  }

  void add_atom(int z, bool aromatic, bool bracket, int explicit_h, std::size_t at) {
    AtomFeatures a;
    a.atomic_number = z;
    a.is_aromatic = aromatic;
    a.hybridization = Hybridization::Unspecified;
    a.is_donor = TriState::Unspecified;
    a.is_acceptor = TriState::Unspecified;
    graph_.atoms.push_back(a);
    state_.push_back(AtomState{aromatic, bracket, explicit_h});
    const int idx = static_cast<int>(graph_.atoms.size()) - 1;
    if (prev_atom_ >= 0) {
      make_bond(prev_atom_, idx, take_pending_bond(), at);
    } else if (pending_bond_) {
      syntax(pending_bond_offset_, "", "leading bond");
    }
    prev_atom_ = idx;
  }

  std::optional<BondType> take_pending_bond() {
    auto b = pending_bond_;
    pending_bond_.reset();
    return b;
  }

  void ring_closure(int id, std::size_t at) {
    if (prev_atom_ < 0) syntax(at, std::to_string(id), "ring closure before any atom");
    auto bond = take_pending_bond();
    auto it = open_rings_.find(id);
    if (it == open_rings_.end()) {
      open_rings_[id] = RingEntry{prev_atom_, bond, at};
      return;
    }
    RingEntry entry = it->second;
    open_rings_.erase(it);
    if (entry.atom == prev_atom_) syntax(at, std::to_string(id), "ring bond to the same atom");
    if (entry.bond && bond && *entry.bond != *bond)
      syntax(at, std::to_string(id), "conflicting ring bond orders");
    make_bond(entry.atom, prev_atom_, entry.bond ? entry.bond : bond, at);
  }

  void make_bond(int a, int b, std::optional<BondType> t, std::size_t at) {
    BondType type;
    if (t) {
      type = *t;
    } else {
      type = (state_[static_cast<std::size_t>(a)].aromatic &&
              state_[static_cast<std::size_t>(b)].aromatic)
                 ? BondType::Aromatic
                 : BondType::Single;
    }
    for (const Bond& existing : graph_.bonds) {
      if ((existing.a == a && existing.b == b) || (existing.a == b && existing.b == a))
        syntax(at, "", "duplicate bond between atoms " + std::to_string(a) + " and " +
                           std::to_string(b));
    }
    graph_.bonds.push_back(Bond{a, b, type});
    if (type == BondType::Aromatic) {
      graph_.atoms[static_cast<std::size_t>(a)].is_aromatic = true;
      graph_.atoms[static_cast<std::size_t>(b)].is_aromatic = true;
      state_[static_cast<std::size_t>(a)].aromatic = true;
      state_[static_cast<std::size_t>(b)].aromatic = true;
    }
  }

  // Implicit hydrogens once connectivity is complete.
  //   bracket atom:      explicit count
  //   aromatic atom:     default valence - neighbors - 1, floored at 0
  //   non-aromatic atom: default valence - sum of bond orders, floored at 0
  void assign_hydrogens() {
    std::vector<int> order_sum(graph_.atoms.size(), 0);
    std::vector<int> neighbor_count(graph_.atoms.size(), 0);
    for (const Bond& b : graph_.bonds) {
      const int o = smiles_detail::bond_order(b.type);
      order_sum[static_cast<std::size_t>(b.a)] += o;
      order_sum[static_cast<std::size_t>(b.b)] += o;
      neighbor_count[static_cast<std::size_t>(b.a)] += 1;
      neighbor_count[static_cast<std::size_t>(b.b)] += 1;
    }
    for (std::size_t i = 0; i < graph_.atoms.size(); ++i) {
      AtomFeatures& a = graph_.atoms[i];
      if (state_[i].bracket) {
        a.num_hydrogens = state_[i].explicit_h;
        continue;
      }
      const int dv = smiles_detail::default_valence(a.atomic_number);
      const int h = a.is_aromatic ? dv - neighbor_count[i] - 1 : dv - order_sum[i];
      a.num_hydrogens = h > 0 ? h : 0;
    }
  }
};

inline RepresentationGraph parse_smiles(std::string_view s) { return SmilesParser::parse(s); }

}  // namespace bignn
