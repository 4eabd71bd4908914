#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergolab/averaging.hpp"
#include "ergolab/geometry.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/random.hpp"
#include "ergolab/space.hpp"
#include "ergolab/verify.hpp"

namespace ergolab::cli {

using nlohmann::json;

enum exit_code : int { ok = 0, validation = 2, guard_violation = 3, degenerate = 4 };

// command -> library operations it reaches
inline const std::map<std::string, std::vector<std::string>> &command_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"rank", {"rank", "relation_kernel", "select_independent", "rotation_to_shift", "convergents"}},
      {"reduce", {"build_reduction", "select_independent"}},
      {"average", {"multi_average", "directional_window_sum", "brute_force_average"}},
      {"maximal", {"discrete_maximal", "brute_force_maximal"}},
      {"weaktype", {"weak_type_sweep", "orlicz_eval", "orlicz_integral", "level_set_measure"}},
      {"converge", {"convergence_probe"}},
      {"extend", {"divergence_extension_check"}},
      {"sharpness", {"sharpness_sweep"}},
      {"geometry-decompose", {"decompose", "support", "membership"}},
      {"geometry-ball", {"inscribed_ball", "membership"}},
      {"geometry-measure", {"sample_mu_R", "verify_domination"}},
  };
  return table;
}

struct RunResult {
  int exit = ok;
  std::string summary;
};

namespace detail {

inline const json &section(const json &cfg, const char *name) {
  if (cfg.contains("system") && cfg["system"].contains(name))
    return cfg["system"][name];
  return cfg.at(name);
}

inline bool has_system_field(const json &cfg, const char *name) {
  return cfg.contains(name) || (cfg.contains("system") && cfg["system"].contains(name));
}

inline bool is_rotation(const json &cfg) { return has_system_field(cfg, "rotation"); }

/// Shift family from generators (+ moduli) or rotation frequencies (+ guard).
inline ShiftFamily build_family(const json &cfg) {
  if (is_rotation(cfg)) {
    std::vector<Rational> freqs;
    std::size_t conv = has_system_field(cfg, "convergent") ? section(cfg, "convergent").get<std::size_t>() : 0;
    for (const auto &item : section(cfg, "rotation")) {
      if (item.is_number()) {
        if (conv == 0)
          throw domain_error("rotation: real frequencies need 'convergent' (index of the approximant)");
        double x = item.get<double>();
        double frac = x - std::floor(x);
        auto cs = convergents(frac, conv);
        Rational r = cs.back();
        r.p += static_cast<std::int64_t>(std::floor(x)) * r.q;
        freqs.push_back(r);
      } else {
        freqs.push_back(parse_rational(item.get<std::string>()));
      }
    }
    index_t guard = has_system_field(cfg, "guard") ? section(cfg, "guard").get<index_t>() : 1;
    return rotation_to_shift(freqs, guard);
  }
  if (!has_system_field(cfg, "generators"))
    throw domain_error("config: system needs 'generators' or 'rotation'");
  auto gens = section(cfg, "generators").get<std::vector<IntVector>>();
  if (gens.empty())
    throw domain_error("config: 'generators' is empty");
  std::vector<index_t> moduli;
  if (has_system_field(cfg, "moduli")) {
    moduli = section(cfg, "moduli").get<std::vector<index_t>>();
  } else {
    // default: 2 max|v| + 1 on every axis
    index_t big = 0;
    for (const auto &v : gens)
      for (auto c : v)
        big = std::max(big, c < 0 ? -c : c);
    moduli.assign(gens.front().size(), std::max<index_t>(2, 2 * big + 1));
  }
  return ShiftFamily(GridSpace(moduli), std::move(gens));
}

inline WrapPolicy wrap_policy(const json &cfg) {
  if (cfg.contains("wrap")) {
    auto w = cfg["wrap"].get<std::string>();
    if (w == "guarded")
      return WrapPolicy::guarded;
    if (w == "cyclic")
      return WrapPolicy::cyclic;
    throw domain_error("config: 'wrap' must be 'guarded' or 'cyclic'");
  }
  return is_rotation(cfg) ? WrapPolicy::cyclic : WrapPolicy::guarded;
}

inline MaximalSpec maximal_spec(const json &cfg) {
  index_t cap = cfg.value("M", index_t{8});
  auto mode = cfg.value("mode", std::string("dyadic"));
  if (mode != "exact" && mode != "dyadic")
    throw domain_error("config: 'mode' must be 'exact' or 'dyadic'");
  return {cap, mode == "exact" ? MaximalMode::exact : MaximalMode::dyadic};
}

inline std::optional<std::uint64_t> seed_of(const json &cfg, std::optional<std::uint64_t> override_seed) {
  if (override_seed)
    return override_seed;
  if (cfg.contains("seed"))
    return cfg["seed"].get<std::uint64_t>();
  return std::nullopt;
}

// Accepts "spike(H, point)", "constant(c)", "random(seed, dist)" or the object forms.
inline json normalize_function_spec(const json &spec) {
  if (!spec.is_string())
    return spec;
  static const std::regex call(R"(\s*(\w+)\s*\(([^)]*)\)\s*)");
  std::smatch m;
  auto text = spec.get<std::string>();
  if (!std::regex_match(text, m, call))
    throw domain_error("function: cannot parse '" + text + "'");
  std::vector<std::string> args;
  std::stringstream ss(m[2].str());
  for (std::string a; std::getline(ss, a, ',');) {
    a.erase(0, a.find_first_not_of(" \t"));
    a.erase(a.find_last_not_of(" \t") + 1);
    if (!a.empty())
      args.push_back(a);
  }
  auto name = m[1].str();
  if (name == "spike") {
    json j{{"height", std::stod(args.at(0))}};
    if (args.size() > 1)
      j["point"] = std::stoll(args[1]);
    return json{{"spike", j}};
  }
  if (name == "constant")
    return json{{"constant", std::stod(args.at(0))}};
  if (name == "random") {
    json j{{"seed", std::stoull(args.at(0))}};
    if (args.size() > 1)
      j["dist"] = args[1];
    return json{{"random", j}};
  }
  throw domain_error("function: unknown generator '" + name + "'");
}

inline bool function_uses_randomness(const json &cfg) {
  if (!cfg.contains("function"))
    return false;
  auto spec = normalize_function_spec(cfg["function"]);
  return spec.contains("random");
}

inline GridFunction build_function(const json &cfg, const GridSpace &space, const std::filesystem::path &base,
                                   std::optional<std::uint64_t> seed) {
  if (!cfg.contains("function"))
    throw domain_error("config: 'function' is required for this command");
  auto spec = normalize_function_spec(cfg["function"]);
  if (spec.contains("spike")) {
    const auto &s = spec["spike"];
    return GridFunction::spike(space, s.at("height").get<double>(), s.value("point", index_t{0}));
  }
  if (spec.contains("constant"))
    return GridFunction::constant(space, spec["constant"].get<double>());
  if (spec.contains("values")) {
    const auto &vals = spec["values"];
    if (static_cast<index_t>(vals.size()) != space.size())
      throw domain_error("function: 'values' must have one entry per grid point");
    bool integral = std::all_of(vals.begin(), vals.end(), [](const json &v) { return v.is_number_integer(); });
    if (integral)
      return GridFunction::from_integers(space, vals.get<std::vector<std::int64_t>>(),
                                         spec.value("denominator", std::int64_t{1}));
    return GridFunction(space, vals.get<std::vector<double>>());
  }
  if (spec.contains("file")) {
    auto path = base / spec["file"].get<std::string>();
    std::ifstream in(path);
    if (!in)
      throw domain_error("function: cannot open '" + path.string() + "'");
    return read_csv(in, space);
  }
  if (spec.contains("random")) {
    const auto &r = spec["random"];
    std::uint64_t s = r.contains("seed") ? r["seed"].get<std::uint64_t>() : seed.value_or(0);
    if (!r.contains("seed") && !seed)
      throw domain_error("function: random generator needs a seed");
    auto dist = r.value("dist", std::string("uniform"));
    std::mt19937_64 rng(s);
    const auto n = static_cast<std::size_t>(space.size());
    if (dist == "uniform") {
      std::vector<double> v(n);
      for (auto &x : v)
        x = unit_uniform(rng);
      return GridFunction(space, std::move(v));
    }
    if (dist == "pm1" || dist == "int") {
      std::vector<std::int64_t> v(n);
      for (auto &x : v)
        x = dist == "pm1" ? 2 * uniform_int(rng, 0, 1) - 1 : uniform_int(rng, 0, r.value("max", 9));
      return GridFunction::from_integers(space, std::move(v));
    }
    throw domain_error("function: unknown random distribution '" + dist + "'");
  }
  throw domain_error("function: expected spike, constant, values, file or random");
}

inline geometry::Parallelepiped build_parallelepiped(const json &cfg) {
  if (!cfg.contains("parallelepiped"))
    throw domain_error("config: 'parallelepiped' is required for geometry commands");
  return cfg["parallelepiped"].get<geometry::Parallelepiped>();
}

// max window side the command will use, for the guard check
inline index_t window_reach(const json &cfg, const std::string &command) {
  if (command == "average")
    return WindowSpec(cfg.at("window").get<std::vector<index_t>>()).max_side();
  if (command == "maximal" || command == "weaktype" || command == "sharpness")
    return maximal_spec(cfg).cap;
  if (command == "extend") {
    auto s = cfg.at("s").get<std::vector<index_t>>();
    auto t = cfg.at("t").get<std::vector<index_t>>();
    index_t m = 0;
    for (auto v : s)
      m = std::max(m, v);
    for (auto v : t)
      m = std::max(m, v);
    return m;
  }
  if (command == "converge" && cfg.contains("ladder")) {
    index_t m = 0;
    for (const auto &rung : cfg["ladder"])
      for (auto v : rung.get<std::vector<index_t>>())
        m = std::max(m, v);
    return m;
  }
  return 0;
}

inline bool is_geometry(const std::string &command) { return command.rfind("geometry-", 0) == 0; }

inline void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::vector<geometry::CoordinateBox> random_boxes(const geometry::Decomposition &dec, std::size_t count,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x5bd1e995ULL));
  std::vector<geometry::CoordinateBox> boxes;
  for (std::size_t b = 0; b < count; ++b) {
    geometry::CoordinateBox box;
    for (std::size_t k = 0; k < dec.rank; ++k) {
      double reach = dec.containment * dec.Q.radii()[k];
      double width = (0.05 + 0.45 * unit_uniform(rng)) * 2.0 * reach;
      double lo = -reach + unit_uniform(rng) * (2.0 * reach - width);
      box.lo.push_back(lo);
      box.hi.push_back(lo + width);
    }
    boxes.push_back(std::move(box));
  }
  return boxes;
}

} // namespace detail

/// Static checks without running anything; empty means runnable.
inline std::vector<std::string> validate(const json &cfg, std::optional<std::uint64_t> seed_override = std::nullopt,
                                         const std::filesystem::path &base = ".") {
  std::vector<std::string> diag;
  if (!cfg.is_object())
    return {"config: top level must be a JSON object"};
  if (!cfg.contains("command") || !cfg["command"].is_string())
    return {"command: missing"};
  auto command = cfg["command"].get<std::string>();
  if (!command_table().count(command))
    return {"command: unknown command '" + command + "'"};

  auto seed = detail::seed_of(cfg, seed_override);
  try {
    if (detail::is_geometry(command)) {
      detail::build_parallelepiped(cfg);
      if ((command == "geometry-measure" || command == "geometry-ball") && !seed)
        diag.push_back("seed: required for sampling (set 'seed' or pass --seed)");
      return diag;
    }
    auto family = detail::build_family(cfg);
    auto policy = detail::wrap_policy(cfg);
    index_t reach = detail::window_reach(cfg, command);
    if (reach > 0 && policy == WrapPolicy::guarded) {
      index_t bound = guard_bound(family, reach);
      if (bound >= family.space().min_modulus())
        diag.push_back("wrap-around guard: M*max|v|*n = " + std::to_string(reach) + "*" +
                       std::to_string(family.max_norm()) + "*" + std::to_string(family.count()) + " = " +
                       std::to_string(bound) + " >= min modulus " + std::to_string(family.space().min_modulus()));
    }
    if ((command == "reduce" || command == "weaktype" || command == "sharpness") && rank(family) == 0)
      diag.push_back("system: rank is 0, command needs an independent generator");
    if (command == "average" && cfg.at("window").size() != family.count())
      diag.push_back("window: needs one side per generator");
    if (command == "extend") {
      auto s = cfg.at("s").get<std::vector<index_t>>();
      auto t = cfg.at("t").get<std::vector<index_t>>();
      if (s.empty() || s.size() + t.size() != family.count())
        diag.push_back("extend: 's' and 't' must split the generators");
    }
    if (command == "sharpness" && !cfg.contains("heights"))
      diag.push_back("heights: required for sharpness");
    bool needs_function = command == "average" || command == "maximal" || command == "weaktype" ||
                          command == "converge" || command == "extend";
    if (needs_function) {
      if (!cfg.contains("function")) {
        diag.push_back("function: required for command '" + command + "'");
      } else {
        auto spec = detail::normalize_function_spec(cfg["function"]);
        if (spec.contains("file") && !std::filesystem::exists(base / spec["file"].get<std::string>()))
          diag.push_back("function: file '" + spec["file"].get<std::string>() + "' does not exist");
        else if (spec.contains("random") && !spec["random"].contains("seed") && !seed)
          diag.push_back("seed: required for the random function generator");
      }
    }
  } catch (const std::exception &e) {
    diag.push_back(e.what());
  }
  return diag;
}

/// Runs one experiment and writes report.json / report.csv into `out`.
inline RunResult run(const json &cfg, const std::filesystem::path &out,
                     std::optional<std::uint64_t> seed_override = std::nullopt,
                     const std::filesystem::path &base = ".") {
  RunResult result;
  try {
    auto diag = validate(cfg, seed_override, base);
    if (!diag.empty()) {
      // guard diagnostics get their own exit code
      bool guard = std::any_of(diag.begin(), diag.end(),
                               [](const std::string &d) { return d.rfind("wrap-around guard", 0) == 0; });
      std::string msg;
      for (const auto &d : diag)
        msg += (msg.empty() ? "" : "; ") + d;
      return {guard && diag.size() == 1 ? guard_violation : validation, msg};
    }
    std::filesystem::create_directories(out);
    const auto command = cfg["command"].get<std::string>();
    const auto seed = detail::seed_of(cfg, seed_override);
    json report{{"command", command}};
    std::ostringstream csv;

    if (detail::is_geometry(command)) {
      auto R = detail::build_parallelepiped(cfg);
      report["parallelepiped"] = R;
      if (command == "geometry-decompose") {
        auto dec = geometry::decompose(R);
        auto ball = geometry::inscribed_ball(dec.Q);
        auto W = geometry::dual_basis(dec.Q.vectors());
        std::vector<double> supports;
        for (std::size_t k = 0; k < dec.rank; ++k)
          supports.push_back(geometry::support(R, W.col(static_cast<Eigen::Index>(k))));
        // every vertex of R inside c* Q
        std::size_t n = R.count(), inside = 0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
          geometry::Vec x = geometry::Vec::Zero(static_cast<Eigen::Index>(R.dims()));
          for (std::size_t j = 0; j < n; ++j)
            x += ((mask >> j) & 1 ? 1.0 : -1.0) * R.radii()[j] * R.vectors()[j];
          inside += geometry::membership(dec.Q, x, dec.containment) ? 1 : 0;
        }
        double min_c = *std::min_element(ball.constants.begin(), ball.constants.end());
        double n2_bound = static_cast<double>(n * n) / min_c;
        report["order"] = dec.order;
        report["independent"] = dec.independent;
        report["dependent"] = dec.dependent;
        report["blocks"] = dec.blocks;
        report["rank"] = dec.rank;
        report["Q"] = dec.Q;
        report["containment"] = dec.containment;
        report["dual_support"] = supports;
        report["ball_constants"] = ball.constants;
        report["n2_bound"] = n2_bound;
        report["within_n2_bound"] = dec.containment <= n2_bound;
        report["vertices_inside"] = inside;
        report["vertices"] = std::size_t{1} << n;
        csv << "position,index,radius,independent\n";
        for (std::size_t pos = 0; pos < n; ++pos) {
          auto k = dec.order[pos];
          bool in_v = std::find(dec.independent.begin(), dec.independent.end(), k) != dec.independent.end();
          csv << pos << ',' << k << ',' << format_double(R.radii()[k]) << ',' << (in_v ? 1 : 0) << '\n';
        }
        result.summary = "rank = " + std::to_string(dec.rank) + ", c* = " + format_double(dec.containment);
      } else if (command == "geometry-ball") {
        auto ball = geometry::inscribed_ball(R);
        std::size_t directions = cfg.value("directions", std::size_t{10000});
        std::mt19937_64 rng(*seed);
        auto W = geometry::dual_basis(R.vectors());
        std::size_t failures = 0;
        const auto r = static_cast<Eigen::Index>(R.count());
        for (std::size_t i = 0; i < directions; ++i) {
          // random unit direction inside span(V): uniform coefficients, normalized
          geometry::Vec c(r);
          for (Eigen::Index k = 0; k < r; ++k)
            c(k) = 2.0 * unit_uniform(rng) - 1.0;
          geometry::Vec e = R.vectors().matrix() * c;
          if (e.norm() == 0.0)
            continue;
          e /= e.norm();
          failures += geometry::membership(R, ball.radius * (1.0 - 1e-9) * e, 1.0) ? 0 : 1;
        }
        geometry::Vec wstar = W.col(static_cast<Eigen::Index>(ball.min_facet));
        bool outer_fails = !geometry::membership(R, ball.radius * (1.0 + 1e-3) * wstar / wstar.norm(), 1.0);
        report["heights"] = ball.heights;
        report["constants"] = ball.constants;
        report["radius"] = ball.radius;
        report["min_facet"] = ball.min_facet;
        report["directions"] = directions;
        report["inclusion_failures"] = failures;
        report["outer_point_excluded"] = outer_fails;
        csv << "facet,height,constant\n";
        for (std::size_t j = 0; j < ball.heights.size(); ++j)
          csv << j << ',' << format_double(ball.heights[j]) << ',' << format_double(ball.constants[j]) << '\n';
        result.summary = "rho = " + format_double(ball.radius) + ", inclusion failures = " + std::to_string(failures);
      } else {
        auto dec = geometry::decompose(R);
        std::size_t samples = cfg.value("samples", std::size_t{100000});
        std::vector<geometry::CoordinateBox> boxes;
        if (cfg.contains("boxes") && cfg["boxes"].is_array()) {
          for (const auto &b : cfg["boxes"])
            boxes.push_back({b.at("lo").get<std::vector<double>>(), b.at("hi").get<std::vector<double>>()});
        } else {
          boxes = detail::random_boxes(dec, cfg.value("boxes", std::size_t{100}), *seed);
        }
        auto rep = geometry::verify_domination(R, boxes, samples, *seed);
        report["report"] = rep;
        csv << "box,empirical,stderr,bound,pass\n";
        for (std::size_t b = 0; b < boxes.size(); ++b)
          csv << b << ',' << format_double(rep.empirical[b]) << ',' << format_double(rep.stderrs[b]) << ','
              << format_double(rep.bounds[b]) << ',' << (rep.box_pass[b] ? 1 : 0) << '\n';
        result.summary = std::string("domination ") + (rep.pass ? "holds" : "FAILS") + " on " +
                         std::to_string(boxes.size()) + " boxes";
      }
    } else {
      auto family = detail::build_family(cfg);
      auto policy = detail::wrap_policy(cfg);
      report["system"] = family;
      report["wrap"] = policy == WrapPolicy::guarded ? "guarded" : "cyclic";

      if (command == "rank") {
        auto d = rank(family);
        auto kernel = relation_kernel(family);
        std::vector<IntVector> ps;
        for (const auto &r : kernel)
          ps.push_back(r.p);
        report["rank"] = d;
        report["kernel"] = ps;
        report["independent"] = select_independent(family);
        csv << "relation,generator,coefficient\n";
        for (std::size_t i = 0; i < ps.size(); ++i)
          for (std::size_t k = 0; k < ps[i].size(); ++k)
            csv << i << ',' << k << ',' << ps[i][k] << '\n';
        result.summary = "rank = " + std::to_string(d);
      } else if (command == "reduce") {
        auto red = build_reduction(family);
        report["reduction"] = red;
        report["matrix"] = red.matrix();
        report["column_order"] = red.column_order();
        csv << "row,column,value\n";
        auto A = red.matrix();
        for (std::size_t r = 0; r < A.size(); ++r)
          for (std::size_t c = 0; c < A[r].size(); ++c)
            csv << r << ',' << c << ',' << A[r][c] << '\n';
        result.summary = "basis size = " + std::to_string(red.basis.size());
      } else if (command != "sharpness") {
        auto f = detail::build_function(cfg, family.space(), base, seed);
        bool oracle = cfg.value("oracle", false);
        if (command == "average") {
          WindowSpec w(cfg.at("window").get<std::vector<index_t>>());
          auto g = multi_average(f, family, w, policy);
          report["window"] = w.sides;
          report["mean_in"] = f.mean();
          report["mean_out"] = g.mean();
          if (oracle) {
            auto ref = brute_force_average(f, family, w);
            double diff = 0.0;
            for (index_t x = 0; x < g.size(); ++x)
              diff = std::max(diff, std::abs(g[x] - ref[x]));
            report["oracle_max_abs_diff"] = diff;
          }
          write_csv(csv, g);
          result.summary = "mean = " + format_double(g.mean());
        } else if (command == "maximal") {
          auto spec = detail::maximal_spec(cfg);
          auto Df = discrete_maximal(f, family, spec, policy);
          report["M"] = spec.cap;
          report["mode"] = mode_name(spec.mode);
          report["sup"] = Df.sup_norm();
          if (oracle) {
            auto ref = brute_force_maximal(f, family, spec);
            double diff = 0.0;
            for (index_t x = 0; x < Df.size(); ++x)
              diff = std::max(diff, std::abs(Df[x] - ref[x]));
            report["oracle_max_abs_diff"] = diff;
          }
          write_csv(csv, Df);
          result.summary = "sup Df = " + format_double(Df.sup_norm());
        } else if (command == "weaktype") {
          auto spec = detail::maximal_spec(cfg);
          std::vector<double> lambdas;
          if (cfg.contains("lambdas"))
            lambdas = cfg["lambdas"].get<std::vector<double>>();
          auto rep = weak_type_sweep(f, family, spec, lambdas, policy);
          report["report"] = rep;
          write_csv(csv, rep);
          result.summary = "sup ratio = " + format_double(rep.sup_ratio) + " (rank " + std::to_string(rep.rank) +
                           ", Log_" + std::to_string(rep.weight_order) + ")";
        } else if (command == "converge") {
          std::vector<WindowSpec> ladder;
          if (cfg.contains("ladder"))
            for (const auto &rung : cfg["ladder"])
              ladder.emplace_back(rung.get<std::vector<index_t>>());
          auto rep = convergence_probe(f, family, ladder, policy);
          report["report"] = rep;
          write_csv(csv, rep);
          result.summary = "final sup deviation = " +
                           format_double(rep.sup_deviation.empty() ? 0.0 : rep.sup_deviation.back());
        } else if (command == "extend") {
          WindowSpec s(cfg.at("s").get<std::vector<index_t>>()), t(cfg.at("t").get<std::vector<index_t>>());
          auto rep = divergence_extension_check(f, family, s, t, policy);
          report["report"] = rep;
          csv << "field,value\n"
              << "holds," << (rep.holds ? 1 : 0) << "\n"
              << "witness," << rep.witness << "\n"
              << "points_checked," << rep.points_checked << "\n";
          result.summary = rep.holds ? "extension inequality holds at every point"
                                     : "extension inequality FAILS at point " + std::to_string(rep.witness);
        }
      }
      if (command == "sharpness") {
        auto spec = detail::maximal_spec(cfg);
        auto heights = cfg.at("heights").get<std::vector<double>>();
        auto rep = sharpness_sweep(family, heights, spec, cfg.value("point", index_t{0}), policy,
                                   cfg.value("tail_start", 64.0));
        report["report"] = rep;
        write_csv(csv, rep);
        result.summary = "tail variation = " + format_double(rep.tail_variation) +
                         ", lower-order growth = " + format_double(rep.lower_growth);
      }
    }
    detail::write_text(out / "report.json", report.dump(2) + "\n");
    detail::write_text(out / "report.csv", csv.str());
    result.exit = ok;
  } catch (const aliasing_error &e) {
    return {guard_violation, e.what()};
  } catch (const degenerate_error &e) {
    return {degenerate, e.what()};
  } catch (const std::exception &e) {
    return {validation, e.what()};
  }
  return result;
}

} // namespace ergolab::cli
