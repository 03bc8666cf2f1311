#include "lipext/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lipext/instance_gen.hpp"
#include "lipext/io.hpp"

namespace lipext::cli {

namespace {

using io::Json;

struct Options {
  std::string format = "json";
  double tol = -1.0;  // < 0: library defaults
  double lipschitz_bound = 1.0;
  bool oracle = false;
  bool verify = false;
  std::string direction;
  std::string input;
  std::string decomposition;

  std::string kind = "euclidean";
  int n = 3;
  int dim = 2;
  double p = 2.0;
  std::uint64_t seed = 0;
  int embed_dim = 2;
  double scale = 1.0;
  bool extreme = false;
};

ToleranceConfig tolerances(const Options& opt) {
  ToleranceConfig tol;
  if (opt.tol >= 0.0) {
    tol.tol_feas = opt.tol;
    tol.tol_tight = opt.tol;
  }
  return tol;
}

Json read_json(const std::string& path, std::istream& in) {
  try {
    if (path.empty() || path == "-") return Json::parse(in);
    std::ifstream file(path);
    if (!file) {
      throw Error(ErrorCode::MalformedDocument, "cannot open " + path);
    }
    return Json::parse(file);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument,
                std::string("invalid JSON: ") + e.what());
  }
}

Direction parse_direction(const std::string& text, const NormSpec& norm) {
  if (text.empty()) return Direction::basis(0, norm);
  int index = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
  if (ec == std::errc() && end == text.data() + text.size()) {
    return Direction::basis(index, norm);
  }
  std::vector<double> entries;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      entries.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedDocument, "cannot parse direction \"" + text + "\"");
    }
  }
  return Direction::normalized(
      Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size())),
      norm);
}

void emit(std::ostream& out, const Options& opt, const Json& doc,
          const std::string& text) {
  if (opt.format == "text") {
    out << text;
  } else {
    out << doc.dump() << '\n';
  }
}

std::string pair_text(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string certificate_text(const ExtremalityCertificate& cert) {
  std::ostringstream text;
  if (const auto* ext = std::get_if<Extreme>(&cert)) {
    text << "extreme\n";
    for (std::size_t i = 1; i < ext->parent.size(); ++i) {
      text << "  parent(" << i << ") = " << ext->parent[i] << '\n';
    }
  } else {
    const SlackCut& cut = std::get<NotExtreme>(cert).cut;
    text << "not extreme\n  S =";
    for (int s : cut.nodes) text << ' ' << s;
    text << "\n  epsilon = " << cut.epsilon << " at "
         << pair_text(cut.binding.first, cut.binding.second) << '\n';
  }
  return text.str();
}

int cmd_validate(const Options& opt, std::istream& in, std::ostream& out) {
  const io::Instance instance = io::instance_from_json(read_json(opt.input, in));
  io::Instance scaled = instance;
  if (opt.lipschitz_bound != 1.0) scaled.lipschitz_bound = opt.lipschitz_bound;
  if (!(scaled.lipschitz_bound > 0.0)) {
    throw Error(ErrorCode::MalformedDocument, "--L must be positive");
  }
  const Json doc = io::membership_to_json(scaled, tolerances(opt));
  const bool member = doc.at("member").get<bool>();
  std::ostringstream text;
  text << (member ? "member" : "not a member") << "\n  lipschitz constant = "
       << doc.at("lipschitz_constant").get<double>() << " at "
       << pair_text(doc["worst_pair"][0], doc["worst_pair"][1]) << '\n';
  emit(out, opt, doc, text.str());
  return member ? kOk : kNotMember;
}

int cmd_check_extreme(const Options& opt, std::istream& in, std::ostream& out) {
  const io::Instance inst = io::instance_from_json(read_json(opt.input, in));
  const ToleranceConfig tol = tolerances(opt);
  const ExtremalityCertificate cert =
      certify_extremality(inst.point, inst.space, inst.norm, tol);
  Json doc = io::certificate_to_json(cert);
  std::string text = certificate_text(cert);
  bool agrees = true;
  if (opt.oracle) {
    const auto cut = cut_oracle_bruteforce(inst.point, inst.space, inst.norm, tol);
    agrees = cut.has_value() != is_extreme(cert);
    Json oracle = {{"agrees", agrees}, {"extreme", !cut.has_value()}};
    if (cut) {
      oracle["S"] = cut->nodes;
      oracle["epsilon"] = cut->epsilon;
    }
    doc["oracle"] = std::move(oracle);
    text += agrees ? "oracle agrees\n" : "oracle DISAGREES\n";
  }
  emit(out, opt, doc, text);
  if (!agrees) return kOracleDisagreement;
  return is_extreme(cert) ? kOk : kNotExtreme;
}

int cmd_decompose(const Options& opt, std::istream& in, std::ostream& out) {
  const io::Instance inst = io::instance_from_json(read_json(opt.input, in));
  DecomposeOptions options;
  options.tol = tolerances(opt);
  const Direction v = parse_direction(opt.direction, inst.norm);
  const Decomposition dec = decompose(inst.point, v, inst.space, inst.norm, options);
  const VerificationReport report =
      verify_decomposition(inst.point, dec, inst.space, inst.norm, options.tol);
  const double error = io::reconstruction_error(inst.point, dec);
  const Json doc = io::decomposition_to_json(
      dec, error, report.passed(),
      opt.verify ? std::optional<VerificationReport>(report) : std::nullopt);

  std::ostringstream text;
  text << "k = " << dec.k() << " (bound " << inst.space.n() + 1 << ")\n";
  for (const WeightedAtom& wa : dec.atoms) {
    text << "  weight " << wa.weight << "  t = [" << wa.atom.t.transpose() << "]\n";
  }
  text << "reconstruction error = " << error << '\n'
       << "verified: " << (report.passed() ? "yes" : "no") << '\n';
  emit(out, opt, doc, text.str());
  return opt.verify && !report.passed() ? kVerificationFailure : kOk;
}

int cmd_gen(const Options& opt, std::ostream& out) {
  GenConfig cfg;
  cfg.seed = opt.seed;
  cfg.n = opt.n;
  cfg.dim = opt.dim;
  cfg.p = opt.p;
  cfg.embed_dim = opt.embed_dim;
  cfg.scale = opt.scale;
  cfg.validate();
  FiniteMetricSpace space =
      opt.kind == "random" ? gen_random_metric(cfg) : gen_euclidean_space(cfg);
  LipschitzPoint point = opt.extreme ? gen_extreme(cfg, space).point
                                     : gen_member(cfg, space);
  const io::Instance inst{std::move(space), cfg.norm(), std::move(point), 1.0};
  const Json doc = io::instance_to_json(inst);
  emit(out, opt, doc, doc.dump(2) + "\n");
  return kOk;
}

int cmd_verify(const Options& opt, std::istream& in, std::ostream& out) {
  const io::Instance inst = io::instance_from_json(read_json(opt.input, in));
  const Decomposition dec =
      io::decomposition_from_json(read_json(opt.decomposition, in), inst);
  const VerificationReport report =
      verify_decomposition(inst.point, dec, inst.space, inst.norm, tolerances(opt));
  Json doc = io::report_to_json(report);
  doc["format_version"] = io::kFormatVersion;
  doc["kind"] = "verification";
  std::ostringstream text;
  text << (report.passed() ? "pass" : "FAIL") << "\n  k = " << report.k
       << (report.count_ok ? "" : " (too many atoms)")
       << "\n  weight sum deviation = " << report.weight_sum_deviation
       << "\n  reconstruction error = " << report.reconstruction_error << '\n';
  for (std::size_t i = 0; i < report.atoms.size(); ++i) {
    if (!report.atoms[i].passed()) text << "  atom " << i << " failed\n";
  }
  emit(out, opt, doc, text.str());
  return report.passed() ? kOk : kVerificationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Options opt;
  CLI::App app{"Extreme points and decompositions in the Lipschitz unit ball"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
  };
  auto add_tol = [&](CLI::App* cmd) {
    cmd->add_option("--tol", opt.tol, "Membership and tightness tolerance")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* validate = app.add_subcommand("validate", "Membership report");
  validate->add_option("input", opt.input, "Instance document (- for stdin)");
  validate->add_option("--L", opt.lipschitz_bound, "Lipschitz bound");
  add_tol(validate);
  add_format(validate);

  CLI::App* check = app.add_subcommand("check-extreme", "Extremality certificate");
  check->add_option("input", opt.input, "Instance document (- for stdin)");
  check->add_flag("--oracle", opt.oracle, "Cross-check with the brute-force cut oracle");
  add_tol(check);
  add_format(check);

  CLI::App* dec = app.add_subcommand("decompose", "Convex combination of extreme points");
  dec->add_option("input", opt.input, "Instance document (- for stdin)");
  dec->add_option("--direction", opt.direction,
                  "Basis index or comma-separated vector (normalized)");
  dec->add_flag("--verify", opt.verify, "Embed the verification report");
  add_tol(dec);
  add_format(dec);

  CLI::App* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--kind", opt.kind)->check(CLI::IsMember({"euclidean", "random"}));
  gen->add_option("--n", opt.n)->check(CLI::PositiveNumber);
  gen->add_option("--dim", opt.dim)->check(CLI::PositiveNumber);
  gen->add_option("--p", opt.p);
  gen->add_option("--seed", opt.seed);
  gen->add_option("--embed-dim", opt.embed_dim)->check(CLI::PositiveNumber);
  gen->add_option("--scale", opt.scale);
  gen->add_flag("--extreme", opt.extreme, "Emit a certified extreme point");
  add_format(gen);

  CLI::App* verify = app.add_subcommand("verify", "Re-check a stored decomposition");
  verify->add_option("instance", opt.input, "Instance document")->required();
  verify->add_option("decomposition", opt.decomposition, "Decomposition document")
      ->required();
  add_tol(verify);
  add_format(verify);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt, in, out);
    if (check->parsed()) return cmd_check_extreme(opt, in, out);
    if (dec->parsed()) return cmd_decompose(opt, in, out);
    if (gen->parsed()) return cmd_gen(opt, out);
    return cmd_verify(opt, in, out);
  } catch (const Error& e) {
    out << io::error_to_json(e).dump() << '\n';
    err << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::NotAMember ? kNotMember : kInputError;
  }
}

}  // namespace lipext::cli
