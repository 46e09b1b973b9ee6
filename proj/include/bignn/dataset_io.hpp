#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bignn/errors.hpp"
#include "bignn/graph.hpp"
#include "bignn/smiles.hpp"

namespace bignn {

using json = nlohmann::json;

namespace io_detail {

inline const char* hyb_name(Hybridization h) {
  switch (h) {
    case Hybridization::Sp: return "sp";
    case Hybridization::Sp2: return "sp2";
    case Hybridization::Sp3: return "sp3";
    case Hybridization::Other: return "other";
    default: return "unspecified";
  }
}

inline Hybridization hyb_from(const std::string& s, const std::string& where) {
  if (s == "sp") return Hybridization::Sp;
  if (s == "sp2") return Hybridization::Sp2;
  if (s == "sp3") return Hybridization::Sp3;
  if (s == "other") return Hybridization::Other;
  if (s == "unspecified") return Hybridization::Unspecified;
  throw DataError(where + ": unknown hybridization '" + s + "'");
}

inline const char* bond_name(BondType t) {
  switch (t) {
    case BondType::Single: return "single";
    case BondType::Double: return "double";
    case BondType::Triple: return "triple";
    default: return "aromatic";
  }
}

inline BondType bond_from(const std::string& s, const std::string& where) {
  if (s == "single") return BondType::Single;
  if (s == "double") return BondType::Double;
  if (s == "triple") return BondType::Triple;
  if (s == "aromatic") return BondType::Aromatic;
  throw DataError(where + ": unknown bond type '" + s + "'");
}

inline json tristate_to_json(TriState t) {
  if (t == TriState::Unspecified) return nullptr;
  return t == TriState::Yes;
}

inline TriState tristate_from(const json& j, const std::string& where) {
  if (j.is_null()) return TriState::Unspecified;
  if (j.is_boolean()) return j.get<bool>() ? TriState::Yes : TriState::No;
  throw DataError(where + ": donor/acceptor must be true, false or null");
}

}  // namespace io_detail

inline json rep_graph_to_json(const RepresentationGraph& g) {
  json atoms = json::array();
  for (const AtomFeatures& a : g.atoms) {
    atoms.push_back({{"z", a.atomic_number},
                     {"h", a.num_hydrogens},
                     {"hyb", io_detail::hyb_name(a.hybridization)},
                     {"donor", io_detail::tristate_to_json(a.is_donor)},
                     {"acceptor", io_detail::tristate_to_json(a.is_acceptor)},
                     {"aromatic", a.is_aromatic}});
  }
  json bonds = json::array();
  for (const Bond& b : g.bonds)
    bonds.push_back(json::array({b.a, b.b, io_detail::bond_name(b.type)}));
  return json{{"atoms", atoms}, {"bonds", bonds}};
}

inline RepresentationGraph rep_graph_from_json(const json& j, const std::string& entity_id,
                                               const std::string& where) {
  RepresentationGraph g;
  g.entity_id = entity_id;
  if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
    throw DataError(where + ": graph needs an 'atoms' array");
  std::size_t ai = 0;
  for (const json& a : j.at("atoms")) {
    const std::string aw = where + ".atoms[" + std::to_string(ai++) + "]";
    if (!a.is_object() || !a.contains("z") || !a.at("z").is_number_integer())
      throw DataError(aw + ": atom needs integer 'z'");
    AtomFeatures f;
    f.atomic_number = a.at("z").get<int>();
    if (f.atomic_number < 1) throw DataError(aw + ": atomic number must be >= 1");
    f.num_hydrogens = a.value("h", 0);
    if (f.num_hydrogens < 0) throw DataError(aw + ": negative hydrogen count");
    f.hybridization = io_detail::hyb_from(a.value("hyb", "unspecified"), aw);
    f.is_donor = io_detail::tristate_from(a.contains("donor") ? a.at("donor") : json(nullptr), aw);
    f.is_acceptor =
        io_detail::tristate_from(a.contains("acceptor") ? a.at("acceptor") : json(nullptr), aw);
    f.is_aromatic = a.value("aromatic", false);
    g.atoms.push_back(f);
  }
  std::size_t bi = 0;
  for (const json& b : j.value("bonds", json::array())) {
    const std::string bw = where + ".bonds[" + std::to_string(bi++) + "]";
    if (!b.is_array() || b.size() != 3)
      throw DataError(bw + ": bond must be [i, j, type]");
    g.bonds.push_back(Bond{b.at(0).get<int>(), b.at(1).get<int>(),
                           io_detail::bond_from(b.at(2).get<std::string>(), bw)});
  }
  g.validate();
  return g;
}

// Parse and validate a dataset document. Every entity carries either a
// SMILES string (delegated to the parser) or an inline graph, never both.
inline BiLevelDataset dataset_from_json(const json& doc) {
  if (!doc.is_object()) throw DataError("dataset root must be a JSON object");
  BiLevelDataset d;
  for (const json& r : doc.value("relations", json::array())) {
    if (!r.is_string()) throw DataError("relations must be strings");
    d.interaction.relations.push_back(r.get<std::string>());
  }
  if (d.interaction.relations.empty()) throw DataError("dataset needs at least one relation");
  {
    std::set<std::string> uniq(d.interaction.relations.begin(), d.interaction.relations.end());
    if (uniq.size() != d.interaction.relations.size())
      throw DataError("duplicate relation name");
  }

  if (!doc.contains("entities") || !doc.at("entities").is_array())
    throw DataError("dataset needs an 'entities' array");
  std::unordered_map<std::string, int> index;
  std::size_t ei = 0;
  for (const json& e : doc.at("entities")) {
    const std::string where = "entities[" + std::to_string(ei++) + "]";
    if (!e.is_object() || !e.contains("id") || !e.at("id").is_string())
      throw DataError(where + ": entity needs a string 'id'");
    const std::string id = e.at("id").get<std::string>();
    if (index.count(id)) throw DataError(where + ": duplicate entity id '" + id + "'");
    const bool has_smiles = e.contains("smiles");
    const bool has_graph = e.contains("graph");
    if (has_smiles == has_graph)
      throw DataError(where + " ('" + id + "'): exactly one of 'smiles' or 'graph' required");
    RepresentationGraph g;
    if (has_smiles) {
      try {
        g = parse_smiles(e.at("smiles").get<std::string>());
      } catch (const SmilesError& err) {
        throw DataError(where + " ('" + id + "'): " + err.what());
      }
      g.entity_id = id;
    } else {
      g = rep_graph_from_json(e.at("graph"), id, where);
    }
    index[id] = static_cast<int>(d.interaction.entity_ids.size());
    d.interaction.entity_ids.push_back(id);
    d.rep_graphs.push_back(std::move(g));
  }

  std::unordered_map<std::string, int> rel_index;
  for (std::size_t r = 0; r < d.interaction.relations.size(); ++r)
    rel_index[d.interaction.relations[r]] = static_cast<int>(r);

  std::size_t ii = 0;
  for (const json& it : doc.value("interactions", json::array())) {
    const std::string where = "interactions[" + std::to_string(ii++) + "]";
    if (!it.is_object() || !it.contains("a") || !it.contains("b") || !it.contains("r"))
      throw DataError(where + ": interaction needs 'a', 'b', 'r'");
    const std::string a = it.at("a").get<std::string>();
    const std::string b = it.at("b").get<std::string>();
    const std::string r = it.at("r").get<std::string>();
    auto ia = index.find(a);
    if (ia == index.end()) throw DataError(where + ": unknown entity id '" + a + "'");
    auto ib = index.find(b);
    if (ib == index.end()) throw DataError(where + ": unknown entity id '" + b + "'");
    auto ir = rel_index.find(r);
    if (ir == rel_index.end()) throw DataError(where + ": unknown relation '" + r + "'");
    try {
      d.interaction.add_edge(ia->second, ib->second, ir->second);
    } catch (const DataError& err) {
      throw DataError(where + ": " + err.what());
    }
  }
  d.splits.assign(d.interaction.edges.size(), Split::Train);
  d.validate();
  return d;
}

inline BiLevelDataset dataset_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  return dataset_from_json(doc);
}

inline BiLevelDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return dataset_from_string(buf.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline json dataset_to_json(const BiLevelDataset& d) {
  json entities = json::array();
  for (std::size_t i = 0; i < d.num_entities(); ++i) {
    entities.push_back({{"id", d.interaction.entity_ids[i]},
                        {"graph", rep_graph_to_json(d.rep_graphs[i])}});
  }
  json interactions = json::array();
  for (const TypedEdge& e : d.interaction.edges) {
    interactions.push_back(
        {{"a", d.interaction.entity_ids[static_cast<std::size_t>(e.a)]},
         {"b", d.interaction.entity_ids[static_cast<std::size_t>(e.b)]},
         {"r", d.interaction.relations[static_cast<std::size_t>(e.relation)]}});
  }
  return json{{"relations", d.interaction.relations},
              {"entities", entities},
              {"interactions", interactions}};
}

inline void save_dataset(const BiLevelDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file '" + path + "'");
  out << dataset_to_json(d).dump(1) << "\n";
}

// Split file: JSON list of {"a", "b", "r", "split"} covering every edge.
inline json splits_to_json(const BiLevelDataset& d) {
  json out = json::array();
  for (std::size_t i = 0; i < d.interaction.edges.size(); ++i) {
    const TypedEdge& e = d.interaction.edges[i];
    out.push_back({{"a", d.interaction.entity_ids[static_cast<std::size_t>(e.a)]},
                   {"b", d.interaction.entity_ids[static_cast<std::size_t>(e.b)]},
                   {"r", d.interaction.relations[static_cast<std::size_t>(e.relation)]},
                   {"split", split_name(d.splits[i])}});
  }
  return out;
}

inline void save_split_file(const BiLevelDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write split file '" + path + "'");
  out << splits_to_json(d).dump(1) << "\n";
}

inline void apply_split_json(BiLevelDataset& d, const json& doc) {
  if (!doc.is_array()) throw DataError("split file must be a JSON array");
  std::map<std::tuple<int, int, int>, Split> assign;
  for (const json& row : doc) {
    const std::string a = row.at("a").get<std::string>();
    const std::string b = row.at("b").get<std::string>();
    const std::string r = row.at("r").get<std::string>();
    const std::string s = row.at("split").get<std::string>();
    int ia = d.interaction.entity_index(a);
    int ib = d.interaction.entity_index(b);
    if (ia < 0) throw DataError("split file names unknown entity '" + a + "'");
    if (ib < 0) throw DataError("split file names unknown entity '" + b + "'");
    if (ia > ib) std::swap(ia, ib);
    int ir = -1;
    for (std::size_t k = 0; k < d.interaction.relations.size(); ++k)
      if (d.interaction.relations[k] == r) ir = static_cast<int>(k);
    if (ir < 0) throw DataError("split file names unknown relation '" + r + "'");
    Split sp;
    if (s == "train") sp = Split::Train;
    else if (s == "val") sp = Split::Val;
    else if (s == "test") sp = Split::Test;
    else throw DataError("split file has unknown split '" + s + "'");
    assign[{ia, ib, ir}] = sp;
  }
  for (std::size_t i = 0; i < d.interaction.edges.size(); ++i) {
    const TypedEdge& e = d.interaction.edges[i];
    auto it = assign.find({e.a, e.b, e.relation});
    if (it == assign.end())
      throw DataError("split file does not cover edge " + std::to_string(e.a) + "-" +
                      std::to_string(e.b));
    d.splits[i] = it->second;
  }
}

inline void load_split_file(BiLevelDataset& d, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": malformed JSON: " + e.what());
  }
  apply_split_json(d, doc);
}

}  // namespace bignn
