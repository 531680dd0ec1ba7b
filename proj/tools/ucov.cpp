// ucov: unitary-group covering toolkit command line.
//
// Subcommands: field, geometry, group, classify, graph, trifree, cover,
// bounds, sigma. Every output file gets a sibling .manifest.json; reruns with
// identical manifests reproduce outputs byte for byte (all randomized paths
// honor --seed). Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "ucov/cover.hpp"
#include "ucov/io.hpp"
#include "ucov/sigma.hpp"

using namespace ucov;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::uint64_t q = 3;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1000000;
  unsigned jobs = 0;  // 0 = all cores
  std::string cache_dir;
  std::string out;
  std::string format = "json";
  bool verbose = false;

  std::filesystem::path cache() const {
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("UCOV_CACHE_DIR")) return env;
    return {};
  }
};

std::string config_line(const std::string& sub, const RunConfig& cfg, const std::string& extra) {
  std::string s = sub + " q=" + std::to_string(cfg.q) + " seed=" + std::to_string(cfg.seed) +
                  " budget=" + std::to_string(cfg.budget) + " jobs=" + std::to_string(cfg.jobs) +
                  " format=" + cfg.format;
  if (!extra.empty()) s += " " + extra;
  return s;
}

void emit(const RunConfig& cfg, const std::string& sub, const ordered_json& doc,
          const std::string& extra = "",
          const std::vector<std::filesystem::path>& inputs = {}) {
  if (cfg.out.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(cfg.out, std::ios::trunc);
  if (!f.good()) throw std::runtime_error("cannot write " + cfg.out);
  f << doc.dump(2) << "\n";
  write_manifest(cfg.out, config_line(sub, cfg, extra), inputs);
}

void emit_text(const RunConfig& cfg, const std::string& sub, const std::string& text,
               const std::string& extra = "") {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::trunc);
  if (!f.good()) throw std::runtime_error("cannot write " + cfg.out);
  f << text;
  write_manifest(cfg.out, config_line(sub, cfg, extra), {});
}

VertexSubset subset_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot read subset file " + path);
  ordered_json j;
  in >> j;
  VertexSubset s;
  for (auto v : j.at("ids")) s.ids.push_back(v.get<std::uint32_t>());
  std::sort(s.ids.begin(), s.ids.end());
  s.verified_trifree = j.value("verified_trifree", false);
  return s;
}

ordered_json subset_to_json(const VertexSubset& s) {
  ordered_json j;
  j["ids"] = s.ids;
  j["size"] = s.ids.size();
  j["verified_trifree"] = s.verified_trifree;
  return j;
}

int cmd_field(const RunConfig& cfg, std::uint64_t p, std::uint32_t k) {
  auto f = Field::make(p, k);
  ordered_json j;
  j["p"] = p;
  j["k"] = k;
  j["cardinality"] = f->size();
  j["modulus"] = f->modulus();
  j["generator"] = f->generator();
  j["exp_log_tables"] = f->has_tables();
  // sample tables over the first few elements
  std::uint32_t limit = static_cast<std::uint32_t>(std::min<std::uint64_t>(f->size(), 8));
  ordered_json add = ordered_json::array(), mul = ordered_json::array();
  for (std::uint32_t a = 0; a < limit; ++a) {
    ordered_json ra = ordered_json::array(), rm = ordered_json::array();
    for (std::uint32_t b = 0; b < limit; ++b) {
      ra.push_back(f->add(a, b));
      rm.push_back(f->mul(a, b));
    }
    add.push_back(ra);
    mul.push_back(rm);
  }
  j["add_sample"] = add;
  j["mul_sample"] = mul;
  emit(cfg, "field", j, "p=" + std::to_string(p) + " k=" + std::to_string(k));
  return 0;
}

int cmd_geometry(const RunConfig& cfg, bool list_absolute, bool census_triangles) {
  UnitaryGeometry geo(PrimePower::parse(cfg.q));
  ordered_json j;
  j["q"] = cfg.q;
  j["points"] = geo.n_points();
  j["absolute"] = geo.n_absolute();
  j["nonabsolute"] = geo.n_points() - geo.n_absolute();
  if (list_absolute) {
    ordered_json pts = ordered_json::array();
    for (auto p : geo.absolute_points()) pts.push_back(ordered_json(geo.coords(p)));
    j["absolute_points"] = pts;
  }
  if (census_triangles) {
    auto tris = geo.self_polar_triangles();
    j["self_polar_triangles"] = tris.size();
  }
  if (cfg.format == "csv") {
    std::string csv = "q,points,absolute,nonabsolute";
    csv += census_triangles ? ",self_polar_triangles\n" : "\n";
    csv += std::to_string(cfg.q) + "," + std::to_string(geo.n_points()) + "," +
           std::to_string(geo.n_absolute()) + "," +
           std::to_string(geo.n_points() - geo.n_absolute());
    if (census_triangles) csv += "," + j["self_polar_triangles"].dump();
    csv += "\n";
    emit_text(cfg, "geometry", csv);
    return 0;
  }
  emit(cfg, "geometry", j);
  return 0;
}

int cmd_group(const RunConfig& cfg, bool rebuild) {
  auto pp = PrimePower::parse(cfg.q);
  auto dir = cfg.cache();
  if (rebuild && !dir.empty()) std::filesystem::remove(cache_path(dir, cfg.q));
  auto t = load_or_build_group(pp, dir, cfg.jobs);
  ordered_json j;
  j["q"] = cfg.q;
  j["order"] = t.order();
  j["su_order"] = GroupTable::expected_su_order(pp);
  j["center_scalars"] = t.n_center_scalars();
  if (!dir.empty()) j["cache"] = cache_path(dir, cfg.q).string();
  std::vector<std::filesystem::path> inputs;
  if (!dir.empty()) inputs.push_back(cache_path(dir, cfg.q));
  emit(cfg, "group", j, "", inputs);
  return 0;
}

int cmd_classify(const RunConfig& cfg) {
  auto pp = PrimePower::parse(cfg.q);
  UnitaryGeometry geo(pp);
  auto t = load_or_build_group(pp, cfg.cache(), cfg.jobs);
  auto census = type_census(t, geo, cfg.jobs);
  ordered_json j;
  j["q"] = cfg.q;
  j["order"] = t.order();
  j["type1"] = census.type1;
  j["type2"] = census.type2;
  j["type3"] = census.type3;
  emit(cfg, "classify", j);
  return 0;
}

int cmd_graph(const RunConfig& cfg, const std::string& dimacs) {
  UnitaryGeometry geo(PrimePower::parse(cfg.q));
  auto g = build_polarity_graph(geo);
  ordered_json j;
  j["q"] = cfg.q;
  j["vertices"] = g.n;
  j["loops"] = geo.n_absolute();
  j["edges"] = g.n_edges();
  j["triangles"] = triangle_census(g);
  if (!dimacs.empty()) {
    write_dimacs(dimacs, g);
    write_manifest(dimacs, config_line("graph", cfg, "dimacs"), {});
    j["dimacs"] = dimacs;
  }
  emit(cfg, "graph", j);
  return 0;
}

int cmd_trifree(const RunConfig& cfg, bool exact, std::uint32_t restarts) {
  UnitaryGeometry geo(PrimePower::parse(cfg.q));
  auto g = build_polarity_graph(geo);
  ordered_json j;
  j["q"] = cfg.q;
  VertexSubset best;
  if (exact) {
    auto res = trifree_exact(g);
    best = res.best;
    j["mode"] = "exact";
    j["proven_optimal"] = res.proven;
    j["nodes"] = res.nodes;
  } else {
    TrifreeSearchParams params;
    params.seed = cfg.seed;
    params.budget = cfg.budget;
    params.restarts = restarts;
    params.jobs = cfg.jobs;
    best = trifree_search(g, params);
    j["mode"] = "search";
  }
  j["size"] = best.ids.size();
  j["m_formula"] = m_formula(PrimePower::parse(cfg.q));
  j["ratio_to_m"] =
      static_cast<double>(best.ids.size()) / static_cast<double>(m_formula(PrimePower::parse(cfg.q)));
  j["subset"] = subset_to_json(best);
  emit(cfg, "trifree", j, exact ? "exact" : "search");
  return 0;
}

int cmd_cover(const RunConfig& cfg, const std::string& trifree_mode, const std::string& s_file,
              bool verify) {
  auto pp = PrimePower::parse(cfg.q);
  UnitaryGeometry geo(pp);
  auto t = load_or_build_group(pp, cfg.cache(), cfg.jobs);
  auto F6 = Field::make(pp.p, 6 * pp.a);
  auto orbit = build_imag_orbit(t, geo, *F6, cfg.jobs);

  VertexSubset S;
  if (trifree_mode == "none") {
    S.verified_trifree = true;
  } else if (trifree_mode == "greedy") {
    auto g = build_polarity_graph(geo);
    TrifreeSearchParams params;
    params.seed = cfg.seed;
    params.budget = cfg.budget;
    params.jobs = cfg.jobs;
    S = trifree_search(g, params);
  } else if (trifree_mode == "exact") {
    auto g = build_polarity_graph(geo);
    S = trifree_exact(g).best;
  } else if (trifree_mode == "file") {
    S = subset_from_json_file(s_file);
  } else {
    throw CLI::ValidationError("--trifree must be none|greedy|exact|file");
  }

  auto spec = build_cover(t, geo, orbit, S);
  ordered_json j;
  j["q"] = cfg.q;
  j["s_size"] = spec.s_ids.size();
  j["absolute_stabilizers"] = spec.n_abs;
  j["nonabsolute_stabilizers"] = spec.n_sprime;
  j["imaginary_triangle_stabilizers"] = spec.n_imag;
  j["declared_size"] = spec.declared_size.str();
  j["subgroups"] = spec.handle_count();
  int rc = 0;
  if (verify) {
    auto cert = verify_cover(spec, t, geo, orbit, cfg.jobs);
    ordered_json c;
    c["ok"] = cert.ok;
    c["covered"] = cert.covered;
    c["total"] = cert.total;
    c["type1"] = cert.type1;
    c["type2"] = cert.type2;
    c["type3"] = cert.type3;
    if (!cert.ok) {
      c["witness_element"] = cert.witness_id;
      c["witness_reason"] = cert.witness_reason;
      rc = 1;
    }
    j["certificate"] = c;
  }
  emit(cfg, "cover", j, "trifree=" + trifree_mode);
  return rc;
}

int cmd_bounds(const RunConfig& cfg, std::uint64_t q_min, std::uint64_t q_max) {
  auto rows = bounds_table(q_min, q_max);
  if (cfg.format == "csv") {
    std::string csv = "q,k,m,T,lower,upper,lower_simple,upper_simple,ratio_lower,ratio_upper\n";
    for (const auto& r : rows) {
      csv += std::to_string(r.q) + "," + r.k.str() + "," + r.m.str() + "," + r.T.str() + "," +
             r.lower.str() + "," + r.upper.str() + "," + r.lower_simple.str() + "," +
             r.upper_simple.str() + "," + std::to_string(r.ratio_lower) + "," +
             std::to_string(r.ratio_upper) + "\n";
    }
    emit_text(cfg, "bounds", csv, "range=" + std::to_string(q_min) + ".." + std::to_string(q_max));
    return 0;
  }
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["q"] = r.q;
    row["theorem_range"] = r.theorem_range;
    row["k"] = r.k.str();
    row["m"] = r.m.str();
    row["T"] = r.T.str();
    row["lower"] = r.lower.str();
    row["upper"] = r.upper.str();
    row["lower_simple"] = r.lower_simple.str();
    row["upper_simple"] = r.upper_simple.str();
    row["ratio_lower"] = r.ratio_lower;
    row["ratio_upper"] = r.ratio_upper;
    j.push_back(row);
  }
  emit(cfg, "bounds", j, "range=" + std::to_string(q_min) + ".." + std::to_string(q_max));
  return 0;
}

int cmd_sigma(const RunConfig& cfg, const std::string& group, bool lp_only,
              const std::string& emit_cover) {
  ordered_json j;
  j["group"] = group;
  std::optional<FiniteGroupModel> model;
  std::optional<MaxSubgroups> maximals;

  if (group == "u3" || group == "su3") {
    auto pp = PrimePower::parse(cfg.q);
    // sigma(SU3(q)) = sigma(U3(q)): the SU route solves the same instance
    UnitaryGeometry geo(pp);
    auto t = std::make_shared<GroupTable>(load_or_build_group(pp, cfg.cache(), cfg.jobs));
    model = FiniteGroupModel::from_unitary(t);
    if (t->order() <= 2000) {
      maximals = all_maximal_subgroups_brute(*model);
    } else {
      auto F6 = Field::make(pp.p, 6 * pp.a);
      auto orbit = build_imag_orbit(*t, geo, *F6, cfg.jobs);
      HarvestParams hp;
      hp.seed = cfg.seed;
      hp.jobs = cfg.jobs;
      maximals = harvest_maximals_u3(*t, geo, *F6, orbit, *model, hp);
    }
    j["q"] = cfg.q;
  } else if (group == "sym3") {
    model = FiniteGroupModel::symmetric3();
  } else if (group == "sl23") {
    model = FiniteGroupModel::special_linear2(3);
  } else if (group == "l23") {
    model = FiniteGroupModel::projective_sl2(3);
  } else if (group == "sl25") {
    model = FiniteGroupModel::special_linear2(5);
  } else if (group == "a5") {
    model = FiniteGroupModel::projective_sl2(5);
  } else if (group == "q8") {
    model = FiniteGroupModel::quaternion8();
  } else {
    throw CLI::ValidationError("--group must be u3|su3|sym3|sl23|l23|sl25|a5|q8");
  }
  if (!maximals) maximals = all_maximal_subgroups_brute(*model);
  if (!maximals->complete) {
    j["error"] = "maximal subgroup list incomplete: " + maximals->notes;
    emit(cfg, "sigma", j);
    return 1;
  }
  auto red = reduce_instance(*model, *maximals);
  j["columns"] = red.inst.n_cols;
  j["universe_items"] = red.inst.item_cols.size();
  j["maximal_cyclic_subgroups"] = red.n_max_cyclic;
  if (lp_only) {
    auto lp = lp_lower_bound(red.inst, cfg.budget);
    j["lp_bound"] = lp.value.str();
    j["lp_bound_ceil"] = lp.value.ceil().str();
    j["lp_optimal"] = lp.optimal;
    emit(cfg, "sigma", j, "lp-only");
    std::cout << "sigma >= " << lp.value.ceil().str() << "\n";
    return 0;
  }
  SolveParams sp;
  sp.node_budget = cfg.budget;
  auto out = sigma_of(*model, *maximals, sp);
  j["exact"] = out.exact;
  j["lower"] = out.result.lower;
  j["upper"] = out.result.upper;
  j["nodes"] = out.result.nodes;
  j["root_bound"] = out.result.root_bound.str();
  j["certificate"] = out.result.cert == CertKind::LpTight
                         ? "lp-tight"
                         : (out.result.cert == CertKind::ClosedTree ? "closed-tree" : "interval");
  if (out.exact) j["sigma"] = out.sigma;
  if (!emit_cover.empty() && out.exact) {
    ordered_json cov = ordered_json::array();
    for (auto c : out.chosen) {
      ordered_json sub;
      sub["label"] = maximals->labels[c];
      sub["order"] = maximals->subs[c].size();
      sub["members"] = maximals->subs[c];
      cov.push_back(sub);
    }
    std::ofstream f(emit_cover, std::ios::trunc);
    f << cov.dump(2) << "\n";
    write_manifest(emit_cover, config_line("sigma", cfg, "emit-cover"), {});
    j["cover_file"] = emit_cover;
  }
  emit(cfg, "sigma", j, "group=" + group);
  if (out.exact) std::cout << out.sigma << "\n";
  else std::cout << "sigma in [" << out.result.lower << ", " << out.result.upper << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unitary-group covering toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--jobs", cfg.jobs, "worker threads (0 = all cores, 1 = serial)");
  app.add_option("--seed", cfg.seed, "seed for all randomized paths");
  app.add_option("--cache-dir", cfg.cache_dir, "group cache directory (or UCOV_CACHE_DIR)");
  app.add_flag("--verbose", cfg.verbose);

  auto add_common = [&](CLI::App* sub, bool with_q = true) {
    if (with_q) sub->add_option("--q", cfg.q, "prime power");
    sub->add_option("--out", cfg.out, "output file (stdout if omitted)");
    sub->add_option("--format", cfg.format, "json|csv");
  };

  std::uint64_t p = 3;
  std::uint32_t k = 2;
  auto* field = app.add_subcommand("field", "finite field construction report");
  field->add_option("--p", p, "characteristic")->required();
  field->add_option("--k", k, "degree")->required();
  add_common(field, false);

  bool list_absolute = false, census_triangles = false;
  auto* geometry = app.add_subcommand("geometry", "hermitian plane censuses");
  geometry->add_flag("--absolute-points", list_absolute);
  geometry->add_flag("--triangles", census_triangles);
  add_common(geometry);

  bool rebuild = false;
  auto* group = app.add_subcommand("group", "build or load the U3(q) table cache");
  group->add_flag("--rebuild", rebuild);
  add_common(group);

  auto* classify = app.add_subcommand("classify", "type census of U3(q)");
  add_common(classify);

  std::string dimacs;
  auto* graph = app.add_subcommand("graph", "polarity graph report and export");
  graph->add_option("--dimacs", dimacs, "write a DIMACS edge list");
  add_common(graph);

  bool tf_exact = false;
  std::uint32_t restarts = 4;
  auto* trifree = app.add_subcommand("trifree", "triangle-free vertex subset search");
  trifree->add_flag("--exact", tf_exact);
  trifree->add_option("--restarts", restarts);
  trifree->add_option("--budget", cfg.budget, "local search move budget");
  add_common(trifree);

  std::string trifree_mode = "none", s_file;
  bool verify = false;
  auto* cover = app.add_subcommand("cover", "build and verify the subgroup cover");
  cover->add_option("--trifree", trifree_mode, "none|greedy|exact|file");
  cover->add_option("--s-file", s_file, "subset JSON for --trifree file");
  cover->add_flag("--verify", verify);
  cover->add_option("--budget", cfg.budget, "search budget for --trifree greedy");
  add_common(cover);

  std::uint64_t q_min = 7, q_max = 32;
  auto* bounds_cmd = app.add_subcommand("bounds", "Theorem-style bound table");
  bounds_cmd->add_option("--q-min", q_min);
  bounds_cmd->add_option("--q-max", q_max);
  add_common(bounds_cmd, false);

  std::string sigma_group = "u3", emit_cover;
  bool lp_only = false;
  auto* sigma = app.add_subcommand("sigma", "exact covering numbers");
  sigma->add_option("--group", sigma_group, "u3|su3|sym3|sl23|l23|sl25|a5|q8");
  sigma->add_flag("--lp-only", lp_only);
  sigma->add_option("--budget", cfg.budget, "branch-and-bound node budget (0 = unlimited)");
  sigma->add_option("--emit-cover", emit_cover, "write the chosen cover as JSON");
  add_common(sigma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*field) return cmd_field(cfg, p, k);
    if (*geometry) return cmd_geometry(cfg, list_absolute, census_triangles);
    if (*group) return cmd_group(cfg, rebuild);
    if (*classify) return cmd_classify(cfg);
    if (*graph) return cmd_graph(cfg, dimacs);
    if (*trifree) return cmd_trifree(cfg, tf_exact, restarts);
    if (*cover) return cmd_cover(cfg, trifree_mode, s_file, verify);
    if (*bounds_cmd) return cmd_bounds(cfg, q_min, q_max);
    if (*sigma) return cmd_sigma(cfg, sigma_group, lp_only, emit_cover);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
