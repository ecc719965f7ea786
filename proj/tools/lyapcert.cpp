// Copyright 2026 The lyapcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: bound, certify, handelman, lyapunov, genbench, check.
//
// Exit codes: 0 success, 1 parse/IO/check failure, 2 honest Unknown or
// NotFound, 3 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lyapcert/lyapcert.hpp"

namespace {

using namespace lyapcert;

constexpr int kOk = 0;
constexpr int kBroken = 1;
constexpr int kUnknown = 2;
constexpr int kNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

template <typename T>
void env_override(const char* name, T& value) {
  if (const char* v = std::getenv(name)) {
    std::istringstream is(v);
    T parsed;
    if (!(is >> parsed)) throw std::runtime_error(std::string("malformed ") + name);
    value = parsed;
  }
}

MultiIndex parse_degree(const std::string& text, std::size_t n) {
  std::vector<int> d;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) d.push_back(std::stoi(item));
  if (d.size() == 1) d.assign(n, d[0]);
  if (d.size() != n) throw DimensionError("degree has " + std::to_string(d.size()) + " entries for " + std::to_string(n) + " variables");
  return MultiIndex(d);
}

RelaxMethod parse_method(const std::string& name, bool full_levels) {
  RelaxMethod m = RelaxMethod::make(relax_kind_from_string(name));
  if (name == "lp3-full" || full_levels) m.levels = RecurrenceLevels::Full;
  return m;
}

struct Common {
  std::string poly;
  std::string box = "";
  std::string degree;
  double tol = 1e-9;
};

/// Polynomial and box from the shared flags; the box defaults to [-1,1]^n.
std::pair<Polynomial<double>, Box> polynomial_and_box(const Common& c) {
  std::size_t n = 0;
  std::optional<Box> box;
  if (!c.box.empty()) {
    box = parse_box(c.box);
    n = box->dim();
  }
  Polynomial<double> p = n ? parse_polynomial(c.poly, n) : parse_polynomial(c.poly);
  if (!box) box = Box::cube(p.n(), -1.0, 1.0);
  return {std::move(p), *box};
}

int cmd_bound(const Common& c, const std::vector<std::string>& methods, bool full) {
  auto [p, box] = polynomial_and_box(c);
  Json out = Json::object();
  for (const auto& name : methods) {
    RelaxMethod m = parse_method(name, full);
    if (m.is_bernstein() && !c.degree.empty()) m.degree = parse_degree(c.degree, p.n());
    out[name] = lower_bound(p, box, m);
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_certify(const Common& c, const std::string& method, bool full, int handelman_degree, double margin,
                const std::string& out_path) {
  auto [p, box] = polynomial_and_box(c);
  RelaxMethod m = method == "handelman" ? RelaxMethod::handelman(handelman_degree) : parse_method(method, full);
  if (m.is_bernstein() && !c.degree.empty()) m.degree = parse_degree(c.degree, p.n());
  const CertifyOutcome res = certify_nonneg(p, box, m, margin, c.tol);
  if (!res.certified()) {
    std::cout << "unknown: " << m.name() << " bound " << format_number(res.lower_bound) << " below margin "
              << format_number(margin) << '\n';
    return kUnknown;
  }
  const std::string doc = certificate_document(p, *res.certificate).dump(2) + '\n';
  if (out_path.empty()) std::cout << doc;
  else write_file(out_path, doc);
  std::cout << "certified: " << m.name() << " bound " << format_number(res.lower_bound) << '\n';
  return kOk;
}

struct LyapunovFlags {
  std::string file;
  int degree = 2;
  std::string method = "auto";
  std::string split = "all";
  std::string scheme = "orthant";
  double epsilon = 0.1;
  int multiplier = 1;
  int shift_power = 1;
  double timeout_s = 0.0;
  std::string out;
  std::string format = "text";
};

int cmd_lyapunov(LyapunovFlags f) {
  const SystemSpec spec = parse_system(read_file(f.file));
  LyapunovQuery q = LyapunovQuery::with_defaults(spec.system, spec.region);
  q.template_degree = f.degree;
  q.epsilon = f.epsilon;
  q.degree_multiplier = f.multiplier;
  q.shift_power = f.shift_power;
  q.time_limit_s = f.timeout_s;
  if (f.scheme == "radial") q.scheme = CellScheme::Radial;
  else if (f.scheme != "orthant") throw std::runtime_error("unknown cell scheme '" + f.scheme + "'");
  if (f.split == "none") {
    q.split_axes.clear();
  } else if (f.split != "all") {
    q.split_axes.clear();
    const VariableNames names(spec.names);
    std::stringstream ss(f.split);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto idx = names.lookup(item);
      if (!idx || *idx >= spec.system.n()) throw ParseError("unknown split variable '" + item + "'", 0);
      q.split_axes.push_back(*idx);
    }
  }
  LyapunovResult r;
  if (f.method == "auto") {
    r = escalate(q);
  } else {
    q.method = parse_method(f.method, false);
    r = synthesize(q);
  }
  const Json doc = to_json(r, spec);
  if (!f.out.empty()) write_file(f.out, doc.dump(2) + '\n');
  if (f.format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << emit_report({{"", r, spec}}, ReportFormat::Text);
    FormatOptions fo;
    fo.prune = 1e-9;
    fo.digits = 6;
    if (r.found())
      std::cout << "found " << (r.strong ? "strong" : "weak") << " Lyapunov function V = "
                << format_polynomial(r.V, VariableNames(spec.names), fo) << '\n';
    else
      std::cout << to_string(r.status) << (r.failure.empty() ? "" : " (" + r.failure + ")") << '\n';
    for (const auto& d : r.diagnostics) std::cout << "  " << d << '\n';
  }
  return r.found() ? kOk : kUnknown;
}

int cmd_genbench(std::size_t n, int degree, const std::string& form, std::uint64_t seed, int tries,
                 const std::string& out, bool reveal) {
  BenchSpec b;
  b.n = n;
  b.field_degree = degree;
  b.seed = seed;
  b.max_tries = tries;
  if (form == "quad") b.v1_form = V1Form::QuadDiag;
  else if (form == "quartic") b.v1_form = V1Form::QuarticDiag;
  else throw std::runtime_error("unknown V1 form '" + form + "'");
  const GeneratedBenchmark g = generate(b);
  SystemSpec spec = make_system_spec(g.system);
  std::string text = "# generated: seed " + std::to_string(seed) + ", " + to_string(b.v1_form) + "\n" + format_system(spec);
  Json side = {{"seed", seed}, {"n", n}, {"degree", degree}, {"v1_form", to_string(b.v1_form)},
               {"residual", g.residual}, {"tries", g.tries}, {"revealed", reveal}};
  if (reveal) {
    side["V1"] = format_polynomial(g.V1);
    side["V2"] = format_polynomial(g.V2);
  }
  if (out.empty()) {
    std::cout << text << side.dump(2) << '\n';
  } else {
    write_file(out, text);
    write_file(out + ".json", side.dump(2) + '\n');
    std::cout << "wrote " << out << " (residual " << format_number(g.residual) << ")\n";
  }
  return kOk;
}

int cmd_check(const std::string& path, bool exact) {
  const Json j = Json::parse(read_file(path));
  const std::string type = j.value("type", std::string{});
  if (type == "positivity_certificate") {
    const Polynomial<double> p = polynomial_from_json(j.at("polynomial"));
    const CheckReport rep = check_certificate(p, certificate_from_json(j.at("certificate")), exact);
    std::cout << (rep.ok ? "valid" : "invalid: " + rep.reason) << " (residual " << format_number(rep.residual)
              << ", bound " << format_number(rep.certified_bound) << ")\n";
    return rep.ok ? kOk : kBroken;
  }
  if (type == "lyapunov_result") {
    const auto [r, spec] = lyapunov_result_from_json(j);
    if (!r.found()) {
      std::cout << "result is not a Found claim; nothing to verify\n";
      return kUnknown;
    }
    CheckReport rep = verify_lyapunov_certificates(r, spec.system, exact);
    const PositivityReport pd = check_positive_definite(r.V, spec.region, 0.01);
    if (rep.ok && !pd.passed) {
      rep.ok = false;
      rep.reason = "V is not certified positive definite";
    }
    std::cout << (rep.ok ? "valid" : "invalid: " + rep.reason) << " (" << r.certificates.size()
              << " cells, residual " << format_number(rep.residual) << ")\n";
    return rep.ok ? kOk : kBroken;
  }
  throw std::runtime_error("unrecognised document type '" + type + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial positivity certificates and Lyapunov function synthesis"};
  app.require_subcommand(1);

  Common common;
  env_override("LYAPCERT_TOL", common.tol);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-p,--poly", common.poly, "polynomial, e.g. \"4*x1^2 - 4*x1 + 1\"")->required();
    sub->add_option("--box", common.box, "box, e.g. \"[0,1]\", \"[-1,1]^2\" or \"[0,1]x[-1,2]\"");
    sub->add_option("--degree", common.degree, "Bernstein degree, scalar or per variable (\"2,3\")");
    sub->add_option("--tol", common.tol, "acceptance tolerance (env LYAPCERT_TOL)");
  };

  auto* bound = app.add_subcommand("bound", "lower bounds from each relaxation");
  add_common(bound);
  std::vector<std::string> methods = {"lp1", "lp2", "lp3", "interval"};
  bool bound_full = false;
  bound->add_option("--methods", methods, "relaxations to run")->delimiter(',');
  bound->add_flag("--full", bound_full, "LP3 with all recurrence levels");

  auto* certify = app.add_subcommand("certify", "certify p >= margin on the box");
  add_common(certify);
  std::string cert_method = "lp2", cert_out;
  bool cert_full = false;
  double margin = 0.0;
  certify->add_option("--method", cert_method, "lp1, lp2, lp3, lp3-full, interval or handelman");
  certify->add_flag("--full", cert_full, "LP3 with all recurrence levels");
  certify->add_option("--margin", margin, "required lower bound");
  certify->add_option("-o,--out", cert_out, "certificate file");

  auto* handel = app.add_subcommand("handelman", "Handelman certificate over the box");
  add_common(handel);
  int hdeg = 2;
  std::string hout;
  double hmargin = 0.0;
  handel->add_option("-D,--handelman-degree", hdeg, "per-factor exponent bound");
  handel->add_option("--margin", hmargin, "required lower bound");
  handel->add_option("-o,--out", hout, "certificate file");

  auto* lyap = app.add_subcommand("lyapunov", "synthesize a Lyapunov function for a system file");
  LyapunovFlags lf;
  env_override("LYAPCERT_TIMEOUT_S", lf.timeout_s);
  lyap->add_option("file", lf.file, "system file")->required();
  lyap->add_option("--degree", lf.degree, "template degree");
  lyap->add_option("--method", lf.method, "auto (escalate), lp1, lp2, lp3 or lp3-full");
  lyap->add_option("--split", lf.split, "axes to split at 0: all, none or a list (\"x1\" or \"x,y\")");
  lyap->add_option("--scheme", lf.scheme, "cell scheme: orthant or radial");
  lyap->add_option("--epsilon", lf.epsilon, "definiteness shift (0: weak mode)");
  lyap->add_option("--multiplier", lf.multiplier, "Bernstein degree multiplier");
  lyap->add_option("--shift-power", lf.shift_power, "shift uses x^(2p)");
  lyap->add_option("--timeout-s", lf.timeout_s, "time limit per stage (env LYAPCERT_TIMEOUT_S)");
  lyap->add_option("-o,--out", lf.out, "result JSON file");
  lyap->add_option("--format", lf.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* gen = app.add_subcommand("genbench", "generate a stable benchmark system");
  std::size_t gn = 2;
  int gdeg = 3, gtries = 100;
  std::string gform = "quad", gout;
  std::uint64_t seed = 1;
  bool reveal = false;
  env_override("LYAPCERT_SEED", seed);
  gen->add_option("--n", gn, "number of variables");
  gen->add_option("--degree", gdeg, "field degree");
  gen->add_option("--form", gform, "V1 form: quad or quartic");
  gen->add_option("--seed", seed, "random seed (env LYAPCERT_SEED)");
  gen->add_option("--tries", gtries, "maximum attempts");
  gen->add_option("-o,--out", gout, "system file (sidecar written to <out>.json)");
  gen->add_flag("--reveal", reveal, "include V1 and V2 in the sidecar");

  auto* check = app.add_subcommand("check", "re-verify a certificate or Lyapunov result file");
  std::string check_path;
  bool exact = false;
  check->add_option("file", check_path, "certificate or result JSON")->required();
  check->add_flag("--exact", exact, "rational arithmetic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBroken;
  }

  try {
    if (bound->parsed()) return cmd_bound(common, methods, bound_full);
    if (certify->parsed()) return cmd_certify(common, cert_method, cert_full, 2, margin, cert_out);
    if (handel->parsed()) return cmd_certify(common, "handelman", false, hdeg, hmargin, hout);
    if (lyap->parsed()) return cmd_lyapunov(lf);
    if (gen->parsed()) return cmd_genbench(gn, gdeg, gform, seed, gtries, gout, reveal);
    if (check->parsed()) return cmd_check(check_path, exact);
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kBroken;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBroken;
  }
  return kBroken;
}
