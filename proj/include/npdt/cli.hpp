#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "npdt/counterexamples.hpp"
#include "npdt/report_json.hpp"

namespace npdt::cli {

enum ExitCode : int { ok = 0, negative = 1, input_error = 2, numeric_error = 3 };

struct CommandResult {
  int exit_code = ok;
  std::vector<std::string> artifacts;
};

/// Writes through a temporary file in the same directory and renames it.
inline void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::input, "cannot write '" + tmp.string() + "'");
    os << content;
    if (!os) throw Error(ErrorKind::input, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::input, "cannot move output into '" + path + "'");
  }
}

namespace detail {

inline void print_text(std::ostream& os, const Json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_text(os, v, prefix.empty() ? k : prefix + "." + k);
    return;
  }
  const bool flat_array =
      j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& e) { return !e.is_object(); });
  if (j.is_array() && !flat_array) {
    for (std::size_t i = 0; i < j.size(); ++i) print_text(os, j[i], prefix + "[" + std::to_string(i) + "]");
    return;
  }
  os << prefix << ": " << j.dump() << "\n";
}

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::dimension:
    case ErrorKind::domain:
    case ErrorKind::input: return input_error;
    default: return numeric_error;
  }
}

inline Vector parse_u0(const std::string& arg, const ModelSpec& spec, std::uint64_t seed) {
  if (arg == "star") return solve_stationary(spec).u_star;
  const std::string tag = "perturbed:";
  if (arg.rfind(tag, 0) == 0) {
    double eps = 0.0;
    try {
      std::size_t used = 0;
      eps = std::stod(arg.substr(tag.size()), &used);
      if (used != arg.size() - tag.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::input, "--u0 perturbed:<eps> needs a real eps");
    }
    if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::input, "--u0 perturbed eps must lie in [0, 1)");
    const Vector u = solve_stationary(spec).u_star;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = u[i] * (1.0 + eps * unif(rng));
    return out;
  }
  const Json j = read_json_file(arg);
  return npdt::detail::as_vector(j, spec.n(), "u0");
}

/// Spectrum, angle value, reduction and verdict for a built-in model.
inline Json counterexample_report(const ModelSpec& spec, std::uint64_t seed) {
  const auto st = solve_stationary(spec);
  const auto red = reduce(spec, st);
  GasOptions opt;
  opt.seed = seed;
  const auto stab = analyze_reduced(red, opt);
  const auto angle = check_angle_condition(spec.b(), red.c_tilde, spec.measure());
  Json j;
  j["name"] = spec.name();
  j["model"] = model_to_json(spec);
  j["r"] = report::vec(spec.r());
  j["stationary"] = report::stationary(st);
  j["reduced"] = report::reduced(red);
  j["normality_defect"] = report::num(normality_defect(red.m_tilde, red.measure));
  j["linearization_spectrum"] = report::complex_list(stab.linearization_spectrum.eigenvalues);
  j["angle"] = report::check(angle);
  j["verdict"] = std::string(to_string(stab.verdict));
  return j;
}

}  // namespace detail

/// Parses argv (without the program name), runs one subcommand, writes the
/// human summary to `out` and diagnostics to `err`.
inline CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlocal population dynamics toolkit", "npdt"};
  app.require_subcommand(1);
  std::string json_path;
  std::uint64_t seed = 0;
  app.add_option("--json", json_path, "write the machine-readable report to this path");
  app.add_option("--seed", seed, "seed for randomized steps")->default_val(0);
  app.fallthrough();

  std::string model_path, family_path, u0_arg, which, csv_path, diag_path;
  double t_end = 0.0, rtol = 1e-9, atol = 1e-12, diffusion = 0.01;
  int steps = 50;
  std::size_t samples = 1001;

  auto* validate = app.add_subcommand("validate", "check structural assumptions of a model");
  validate->add_option("model", model_path)->required();
  auto* stationary = app.add_subcommand("stationary", "compute the positive equilibrium");
  stationary->add_option("model", model_path)->required();
  auto* stability = app.add_subcommand("stability", "run the stability ladder");
  stability->add_option("model", model_path)->required();
  auto* simulate = app.add_subcommand("simulate", "integrate the model in time");
  simulate->add_option("model", model_path)->required();
  simulate->add_option("--u0", u0_arg, "initial state: JSON file, 'star' or 'perturbed:eps'")->required();
  simulate->add_option("--t-end", t_end)->required();
  simulate->add_option("--rtol", rtol)->default_val(1e-9);
  simulate->add_option("--atol", atol)->default_val(1e-12);
  simulate->add_option("--samples", samples)->default_val(1001);
  simulate->add_option("--csv", csv_path);
  simulate->add_option("--diagnostics", diag_path);
  auto* krein = app.add_subcommand("krein", "locate the zeros of the characteristic function");
  krein->add_option("model", model_path)->required();
  auto* counter = app.add_subcommand("counterexample", "reproduce a built-in example");
  counter->add_option("which", which)->required()->check(CLI::IsMember({"one", "two", "nonexistence"}));
  counter->add_option("--D", diffusion)->default_val(0.01);
  auto* scan = app.add_subcommand("scan", "bifurcation scan along an affine family");
  scan->add_option("family", family_path)->required();
  scan->add_option("--steps", steps)->required();

  CommandResult result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    err << "npdt: " << e.what() << "\n";
    result.exit_code = input_error;
    return result;
  }

  Json doc;
  try {
    if (validate->parsed()) {
      const auto rep = validate_model(load_model(model_path));
      doc = report::validation(rep);
      if (!rep.passed()) result.exit_code = negative;
    } else if (stationary->parsed()) {
      doc = report::stationary(solve_stationary(load_model(model_path)));
    } else if (stability->parsed()) {
      GasOptions opt;
      opt.seed = seed;
      const auto rep = stability_verdict(load_model(model_path), opt);
      doc = report::stability(rep);
      if (rep.verdict == Verdict::unstable || rep.verdict == Verdict::inconclusive) result.exit_code = negative;
    } else if (simulate->parsed()) {
      const ModelSpec spec = load_model(model_path);
      const Vector u0 = detail::parse_u0(u0_arg, spec, seed);
      if (!(t_end > 0.0)) throw Error(ErrorKind::input, "--t-end must be positive");
      const auto traj = integrate(spec, u0, t_end, rtol, atol, samples);
      const auto st = solve_stationary(spec);
      const auto red = reduce(spec, st);
      const auto lim = classify_limit_set(traj, st.u_star, 1e-6 * std::max(1.0, norm_inf(st.u_star)));
      doc["t_end"] = t_end;
      doc["samples"] = traj.size();
      doc["final_state"] = report::vec(traj.states.back());
      doc["integrator"] = report::integrator(traj.stats);
      doc["apriori_bound_holds"] = check_apriori_bound(traj, spec);
      doc["persistence"] = check_persistence(traj, spec);
      doc["limit_set"] = report::limit_set(lim);
      if (!csv_path.empty()) {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        write_atomically(csv_path, os.str());
        result.artifacts.push_back(csv_path);
      }
      if (!diag_path.empty()) {
        std::ostringstream os;
        write_diagnostics_csv(os, traj, diagnostics(traj, st, red));
        write_atomically(diag_path, os.str());
        result.artifacts.push_back(diag_path);
      }
    } else if (krein->parsed()) {
      const ModelSpec spec = load_model(model_path);
      const auto rep = krein_roots(reduce(spec, solve_stationary(spec)));
      doc = report::krein(rep);
      if (!(rep.max_mismatch <= 1e-6 * rep.scale)) result.exit_code = negative;
    } else if (counter->parsed()) {
      if (which == "one") {
        doc = detail::counterexample_report(instability_one(), seed);
      } else if (which == "two") {
        doc = detail::counterexample_report(instability_two(), seed);
      } else {
        const auto rep = nonexistence_report(diffusion);
        doc = report::nonexistence(rep);
        if (!rep.valid) result.exit_code = negative;
      }
    } else if (scan->parsed()) {
      const auto fam = family_from_json(read_json_file(family_path), family_path);
      doc = report::scan(hopf_scan(make_family(fam), fam.theta_lo, fam.theta_hi, steps));
    }
  } catch (const Error& e) {
    err << "npdt: " << e.what() << "\n";
    result.exit_code = detail::exit_code_for(e.kind());
    return result;
  }

  detail::print_text(out, doc, "");
  if (!json_path.empty()) {
    try {
      write_atomically(json_path, doc.dump(2) + "\n");
      result.artifacts.push_back(json_path);
    } catch (const Error& e) {
      err << "npdt: " << e.what() << "\n";
      result.exit_code = input_error;
    }
  }
  return result;
}

}  // namespace npdt::cli
