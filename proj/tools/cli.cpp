#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcst/error.hpp"
#include "bcst/keyswap.hpp"
#include "bcst/probabilistic.hpp"

namespace bcst::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kDefaultSpec = "psi+,psi+,psi-,psi-;basis=+/-;sign=+";
constexpr std::string_view kDefaultParams = "a1=0.8,b1=0.6,a2=0.8,b2=0.6";

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::string format = "json";
};

struct Report {
  Json inputs = Json::object();
  Json results = Json::object();
  Json diagnostics = Json::array();
  int exit_code = kExitOk;
  /// Text rendering; when empty the results are flattened.
  std::string text;
};

std::string join(std::span<const BellKind> kinds) {
  std::string out;
  for (auto k : kinds) {
    if (!out.empty()) out += ',';
    out += to_string(k);
  }
  return out;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError, "invalid number '" + std::string(text) + "'");
  }
  return value;
}

UnknownQubit parse_qubit(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorCode::ParseError, "expected 'alpha,beta', got '" + text + "'");
  }
  return UnknownQubit(parse_double(std::string_view(text).substr(0, comma)),
                      parse_double(std::string_view(text).substr(comma + 1)));
}

Json qubit_json(const UnknownQubit& q) {
  const auto part = [](Amplitude z) {
    return z.imag() == 0.0 ? Json(z.real()) : Json::array({z.real(), z.imag()});
  };
  return Json::array({part(q.alpha()), part(q.beta())});
}

Sign parse_sign(const std::string& text) {
  if (text == "+") return Sign::Plus;
  if (text == "-") return Sign::Minus;
  throw Error(ErrorCode::ParseError, "sign must be + or -");
}

Json transcript_json(const Transcript& t) {
  Json events = Json::array();
  for (const auto& e : t.events()) {
    Json ev;
    ev["step"] = e.step;
    ev["party"] = to_string(e.party);
    ev["action"] = to_string(e.action);
    if (e.recipient) ev["recipient"] = to_string(*e.recipient);
    ev["payload"] = e.payload;
    events.push_back(std::move(ev));
  }
  return events;
}

void flatten(const Json& j, const std::string& path, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, path.empty() ? key : path + "." + key, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_string()) {
    out << path << ": " << j.get<std::string>() << '\n';
  } else {
    out << path << ": " << j.dump() << '\n';
  }
}

// ---- commands ---------------------------------------------------------------

struct EnumerateArgs {
  std::string basis = "+/-";
  std::string sign = "+";
  bool invert = false;
  bool verify_table2 = false;
};

Report cmd_enumerate(const EnumerateArgs& args) {
  Report r;
  const auto basis = parse_basis(args.basis);
  const auto sign = parse_sign(args.sign);
  r.inputs = {{"basis", describe_basis(basis)}, {"sign", to_string(sign)},
              {"invert", args.invert}, {"verify_table2", args.verify_table2}};

  const auto specs = args.invert ? enumerate_invalid(basis, sign) : enumerate_valid(basis, sign);
  Json list = Json::array();
  std::ostringstream text;
  for (const auto& s : specs) {
    list.push_back(join(s.pairs));
    text << join(s.pairs) << '\n';
  }
  r.results["count"] = specs.size();
  r.results["quadruples"] = std::move(list);
  text << "count: " << specs.size() << '\n';

  if (args.verify_table2) {
    const auto valid = enumerate_valid(basis, sign);
    Json missing = Json::array();
    const auto rows = paper_table_2();
    std::size_t present = 0;
    for (const auto& row : rows) {
      const bool found = std::ranges::any_of(valid, [&](const ChannelSpec& s) { return s.pairs == row; });
      if (found) {
        ++present;
      } else {
        missing.push_back(join(row));
      }
    }
    r.results["table2"] = {{"present", present}, {"total", rows.size()}, {"missing", missing}};
    text << "table2: " << present << "/" << rows.size() << " present\n";
    for (const auto& m : missing) text << "missing: " << m.get<std::string>() << '\n';
    if (present != rows.size()) r.exit_code = kExitTableMismatch;
  }
  r.text = text.str();
  return r;
}

struct ValidateArgs {
  std::string target;
  std::string state;
  std::string spec;
};

Json control_json(const ControlReport& c) {
  return {{"dir_ab", c.dir_ab_controlled ? "controlled" : "uncontrolled"},
          {"dir_ba", c.dir_ba_controlled ? "controlled" : "uncontrolled"},
          {"purity_ab", c.purity_ab},
          {"purity_ba", c.purity_ba}};
}

Report cmd_validate(const ValidateArgs& args) {
  const int given = !args.target.empty() + !args.state.empty() + !args.spec.empty();
  if (given != 1) {
    throw Error(ErrorCode::ParseError, "give exactly one of TARGET, --state or --spec");
  }
  Report r;
  std::string target = !args.state.empty() ? args.state : args.target;
  if (!args.spec.empty()) target.clear();

  if (!target.empty()) {
    if (const auto named = named_state(target)) {
      r.inputs = {{"state", named->name}};
      const auto& l = named->layout;
      r.results["kind"] = "named";
      r.results["layout"] = {{"a1", l.a1}, {"b1", l.b1}, {"a2", l.a2}, {"b2", l.b2}, {"c1", l.c1}};
      r.results["equivalent"] = to_string(named->equivalent);
      r.results["condition"] = check_condition(named->equivalent);
      r.results["control"] = control_json(control_report(named->amplitudes, l));
      for (const auto& c : verify_published_states()) {
        if (c.name != named->name) continue;
        r.results["published_match"] = c.passed;
        r.results["residual"] = c.residual;
      }
      return r;
    }
    if (!args.state.empty()) throw Error(ErrorCode::ParseError, "unknown state '" + target + "'");
  }
  const auto spec = parse_channel_spec(args.spec.empty() ? args.target : args.spec);
  r.inputs = {{"spec", to_string(spec)}};
  r.results["kind"] = "spec";
  r.results["condition"] = check_condition(spec);
  r.results["control"] = control_json(control_report(build_channel_state(spec), QubitLayout::canonical()));
  return r;
}

struct SimulateArgs {
  std::string spec{kDefaultSpec};
  std::string params{kDefaultParams};
  std::size_t trials = 0;  ///< 0 until parsed; then the per-command default
  bool disclose = true;
  bool transcript = false;
  bool split = false;
  std::string input_a = "0.6,0.8";
  std::string input_b = "0.8,0.6";
};

Report cmd_simulate(const SimulateArgs& args, std::uint64_t seed) {
  Report r;
  const auto spec = parse_channel_spec(args.spec);
  const auto a = parse_qubit(args.input_a);
  const auto b = parse_qubit(args.input_b);
  r.inputs = {{"spec", to_string(spec)}, {"trials", args.trials}, {"disclose", args.disclose},
              {"input_a", qubit_json(a)}, {"input_b", qubit_json(b)}};

  double sum_ab = 0.0;
  double sum_ba = 0.0;
  double min_ab = 1.0;
  double min_ba = 1.0;
  Json runs = Json::array();
  for (std::size_t i = 0; i < args.trials; ++i) {
    auto rng = RandomStream::for_trial(seed, i);
    const auto run = run_bcst(spec, a, b, args.disclose, rng);
    sum_ab += run.fidelity_a_to_b;
    sum_ba += run.fidelity_b_to_a;
    min_ab = std::min(min_ab, run.fidelity_a_to_b);
    min_ba = std::min(min_ba, run.fidelity_b_to_a);
    if (args.transcript) {
      runs.push_back({{"trial", i},
                      {"charlie", to_string(run.charlie_outcome)},
                      {"smo_a", to_string(run.smo_a)},
                      {"smo_b", to_string(run.smo_b)},
                      {"correction_at_bob", to_string(run.correction_at_bob)},
                      {"correction_at_alice", to_string(run.correction_at_alice)},
                      {"fidelity_a_to_b", run.fidelity_a_to_b},
                      {"fidelity_b_to_a", run.fidelity_b_to_a},
                      {"causal", is_causal(run.transcript, args.disclose)},
                      {"events", transcript_json(run.transcript)}});
    }
  }
  const auto n = static_cast<double>(args.trials);
  r.results["sampled"] = {{"mean_fidelity_a_to_b", sum_ab / n}, {"mean_fidelity_b_to_a", sum_ba / n},
                          {"min_fidelity_a_to_b", min_ab}, {"min_fidelity_b_to_a", min_ba}};

  const auto ex = run_bcst_exhaustive(spec, a, b, args.disclose);
  r.results["exhaustive"] = {{"branches", ex.branches.size()},
                             {"total_probability", ex.total_probability},
                             {"min_fidelity_a_to_b", ex.min_fidelity_a_to_b},
                             {"min_fidelity_b_to_a", ex.min_fidelity_b_to_a},
                             {"mean_fidelity_a_to_b", ex.mean_fidelity_a_to_b},
                             {"mean_fidelity_b_to_a", ex.mean_fidelity_b_to_a}};
  if (!args.disclose) {
    const auto est = average_infidelity_without_disclosure(spec, args.trials, seed);
    r.results["haar_average_infidelity"] = {{"a_to_b", est.a_to_b}, {"b_to_a", est.b_to_a},
                                            {"trials", est.trials}};
    r.diagnostics.push_back("charlie withheld his outcome; receivers assumed outcome a");
  }
  if (args.transcript) r.results["runs"] = std::move(runs);
  return r;
}

Report cmd_simulate_prob(const SimulateArgs& args, std::uint64_t seed) {
  Report r;
  const auto kinds = parse_channel_spec(args.spec);
  const auto [p1, p2] = parse_prob_params(args.params);
  const auto spec = ProbChannelSpec::from(kinds, p1, p2);
  const auto a = parse_qubit(args.input_a);
  const auto b = parse_qubit(args.input_b);
  r.inputs = {{"spec", to_string(kinds)},
              {"params", {{"a1", p1.a()}, {"b1", p1.b()}, {"a2", p2.a()}, {"b2", p2.b()}}},
              {"trials", args.trials}, {"input_a", qubit_json(a)}, {"input_b", qubit_json(b)}};

  std::size_t ok_ab = 0;
  std::size_t ok_ba = 0;
  double min_ab = 1.0;
  double min_ba = 1.0;
  Json runs = Json::array();
  for (std::size_t i = 0; i < args.trials; ++i) {
    auto rng = RandomStream::for_trial(seed, i);
    const auto run = run_pbcst(spec, a, b, rng);
    if (run.a_to_b.success) {
      ++ok_ab;
      min_ab = std::min(min_ab, run.a_to_b.fidelity);
    }
    if (run.b_to_a.success) {
      ++ok_ba;
      min_ba = std::min(min_ba, run.b_to_a.fidelity);
    }
    if (args.transcript) {
      const auto dir = [](const DirectionResult& d) {
        Json j = {{"success", d.success}, {"ancilla", d.ancilla_outcome},
                  {"smo", to_string(d.smo)}, {"fidelity", d.fidelity}};
        if (d.correction) j["correction"] = to_string(*d.correction);
        return j;
      };
      runs.push_back({{"trial", i},
                      {"charlie", to_string(run.charlie_outcome)},
                      {"a_to_b", dir(run.a_to_b)},
                      {"b_to_a", dir(run.b_to_a)},
                      {"events", transcript_json(run.transcript)}});
    }
  }
  const auto n = static_cast<double>(args.trials);
  r.results["sampled"] = {{"success_rate_a_to_b", static_cast<double>(ok_ab) / n},
                          {"success_rate_b_to_a", static_cast<double>(ok_ba) / n},
                          {"min_success_fidelity_a_to_b", min_ab},
                          {"min_success_fidelity_b_to_a", min_ba}};
  const auto ex = enumerate_prob_branches(spec, a, b);
  const auto sp = success_probability(spec);
  r.results["exhaustive"] = {{"branches", ex.branches.size()},
                             {"total_probability", ex.total_probability},
                             {"success_a_to_b", ex.success_a_to_b},
                             {"success_b_to_a", ex.success_b_to_a},
                             {"min_success_fidelity_a_to_b", ex.min_success_fidelity_a_to_b},
                             {"min_success_fidelity_b_to_a", ex.min_success_fidelity_b_to_a}};
  r.results["analytic"] = {{"success_a_to_b", sp.analytic_a_to_b},
                           {"success_b_to_a", sp.analytic_b_to_a}};
  if (args.transcript) r.results["runs"] = std::move(runs);
  return r;
}

Report cmd_keygen(const SimulateArgs& args, std::uint64_t seed) {
  Report r;
  const auto spec = parse_channel_spec(args.spec);
  r.inputs = {{"spec", to_string(spec)}, {"trials", args.trials}, {"disclose", args.disclose},
              {"split", args.split}};

  std::size_t agree = 0;
  std::string alice_key;
  std::string bob_key;
  for (std::size_t i = 0; i < args.trials; ++i) {
    auto rng = RandomStream::for_trial(seed, i);
    const auto round = run_key_round(spec, args.disclose, rng);
    if (round.alice_key == round.bob_key) ++agree;
    alice_key += round.alice_key;
    bob_key += round.bob_key;
  }
  r.results["sampled_agreement"] = static_cast<double>(agree) / static_cast<double>(args.trials);
  r.results["exhaustive_agreement"] = key_agreement_exhaustive(spec, args.disclose).agreement_rate;
  const auto security = classify_key_security(spec);
  r.results["secure"] = security.secure;
  r.results["withheld_agreement"] = security.withheld_agreement;
  if (security.witness_bob_outcome) {
    r.results["witness_bob_outcome"] = to_string(*security.witness_bob_outcome);
  } else {
    r.diagnostics.push_back("both controller branches induce the same correlation map");
  }
  if (args.transcript) {
    r.results["alice_key"] = alice_key;
    r.results["bob_key"] = bob_key;
  }
  if (args.split) {
    Json rows = Json::array();
    std::size_t secure = 0;
    for (const auto& s : enumerate_valid(spec.charlie_basis, spec.sign)) {
      const auto k = classify_key_security(s);
      if (k.secure) ++secure;
      rows.push_back({{"spec", join(s.pairs)}, {"secure", k.secure},
                      {"withheld_agreement", k.withheld_agreement}});
    }
    r.results["split"] = {{"secure", secure}, {"insecure", rows.size() - secure}, {"channels", rows}};
  }
  return r;
}

struct TablesArgs {
  int which = 1;
};

Json lines_json(const std::string& text) {
  Json out = Json::array();
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Report cmd_tables(const TablesArgs& args) {
  Report r;
  r.inputs = {{"which", args.which}};
  std::ostringstream text;
  std::size_t mismatches = 0;
  if (args.which == 1 || args.which == 3) {
    const auto printed = args.which == 1 ? paper_table_1() : paper_table_3();
    const auto derived = args.which == 1 ? correction_table() : prob_correction_table();
    const auto diff = diff_tables(printed, derived);
    Json d = Json::array();
    for (const auto& c : diff) {
      d.push_back({{"shared", to_string(c.shared)}, {"smo", to_string(c.smo)},
                   {"printed", to_string(c.left)}, {"derived", to_string(c.right)}});
    }
    mismatches = diff.size();
    r.results["derived"] = lines_json(render_table(derived));
    r.results["printed"] = lines_json(render_table(printed));
    r.results["bijective"] = derived.columns_bijective();
    r.results["diff"] = std::move(d);
    text << render_table(derived) << "mismatches: " << mismatches << '\n'
         << render_diff(diff, "printed", "derived");
  } else if (args.which == 4) {
    const auto derived = swap_table();
    const auto printed = paper_table_4();
    const auto diff = diff_swap_tables(printed, derived);
    Json d = Json::array();
    for (const auto& row : diff) {
      const auto terms = [](const std::vector<SwapTerm>& ts) {
        Json out = Json::array();
        for (const auto& t : ts) {
          out.push_back({{"alice", to_string(t.alice)}, {"bob", to_string(t.bob)},
                         {"sign", to_string(t.sign)}});
        }
        return out;
      };
      d.push_back({{"init", to_string(row.init)}, {"kind", to_string(row.kind)},
                   {"printed", terms(row.left)}, {"derived", terms(row.right)}});
    }
    mismatches = diff.size();
    r.results["derived"] = lines_json(render_swap_table(derived));
    r.results["printed"] = lines_json(render_swap_table(printed));
    r.results["diff"] = std::move(d);
    text << render_swap_table(derived) << "mismatches: " << mismatches << '\n'
         << render_swap_diff(diff, "printed", "derived");
  } else {
    throw Error(ErrorCode::ParseError, "--which must be 1, 3 or 4");
  }
  r.results["mismatches"] = mismatches;
  if (mismatches != 0) r.exit_code = kExitTableMismatch;
  r.text = text.str();
  return r;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidRatio:
    case ErrorCode::InvalidState:
    case ErrorCode::ConditionViolated:
    case ErrorCode::EmptySample:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

void emit(const Report& r, const std::string& command, const Common& common, std::ostream& out) {
  if (common.format == "text") {
    if (!r.text.empty()) {
      out << r.text;
    } else {
      flatten(r.results, "", out);
    }
    for (const auto& d : r.diagnostics) out << "note: " << d.get<std::string>() << '\n';
    return;
  }
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["seed"] = common.seed;
  doc["inputs"] = r.inputs;
  doc["results"] = r.results;
  doc["diagnostics"] = r.diagnostics;
  out << doc.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controlled bidirectional teleportation simulator", "bcst"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
  };

  EnumerateArgs enum_args;
  auto* enumerate = app.add_subcommand("enumerate", "List channels satisfying the condition");
  enumerate->add_option("--basis", enum_args.basis, "Controller basis: +/-, 0/1 or theta=..,phi=..")
      ->capture_default_str();
  enumerate->add_option("--sign", enum_args.sign, "Superposition sign")->capture_default_str();
  enumerate->add_flag("--invert", enum_args.invert, "List the violating quadruples instead");
  enumerate->add_flag("--verify-table2", enum_args.verify_table2, "Check the published sample rows");
  add_common(enumerate);

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Report per-direction control of a channel");
  validate->add_option("target", validate_args.target, "Named state or channel spec");
  validate->add_option("--state", validate_args.state, "zha, zha-prime or li");
  validate->add_option("--spec", validate_args.spec, "Channel spec");
  add_common(validate);

  SimulateArgs sim_args;
  const auto add_run_options = [&](CLI::App* sub, std::string_view default_trials,
                                   bool with_inputs) {
    sub->add_option("--spec", sim_args.spec, "Channel spec")->capture_default_str();
    sub->add_option("--trials", sim_args.trials, "Sampled runs")
        ->check(CLI::PositiveNumber)
        ->default_str(std::string(default_trials));
    sub->add_flag("--transcript", sim_args.transcript, "Include per-run transcripts");
    if (with_inputs) {
      sub->add_option("--input-a", sim_args.input_a, "Alice's qubit as alpha,beta")->capture_default_str();
      sub->add_option("--input-b", sim_args.input_b, "Bob's qubit as alpha,beta")->capture_default_str();
    }
    add_common(sub);
  };
  auto* simulate = app.add_subcommand("simulate", "Run perfect controlled teleportation");
  add_run_options(simulate, "1", true);
  simulate->add_option("--disclose", sim_args.disclose, "Charlie announces his outcome")
      ->capture_default_str();
  auto* simulate_prob = app.add_subcommand("simulate-prob", "Run probabilistic teleportation");
  add_run_options(simulate_prob, "1000", true);
  simulate_prob->add_option("--params", sim_args.params, "a1=..,b1=..,a2=..,b2=..")->capture_default_str();
  auto* keygen = app.add_subcommand("keygen", "Run key agreement by entanglement swapping");
  add_run_options(keygen, "1000", false);
  keygen->add_option("--disclose", sim_args.disclose, "Charlie announces his outcome")
      ->capture_default_str();
  keygen->add_flag("--split", sim_args.split, "Classify every valid channel with this basis and sign");

  TablesArgs tables_args;
  auto* tables = app.add_subcommand("tables", "Derive a table and diff it against the printed one");
  tables->add_option("--which", tables_args.which, "1, 3 or 4")->required();
  add_common(tables);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (sim_args.trials == 0) sim_args.trials = *simulate ? 1 : 1000;

  try {
    Report report;
    std::string command;
    if (*enumerate) {
      command = "enumerate";
      report = cmd_enumerate(enum_args);
    } else if (*validate) {
      command = "validate";
      report = cmd_validate(validate_args);
    } else if (*simulate) {
      command = "simulate";
      report = cmd_simulate(sim_args, common.seed);
    } else if (*simulate_prob) {
      command = "simulate-prob";
      report = cmd_simulate_prob(sim_args, common.seed);
    } else if (*keygen) {
      command = "keygen";
      report = cmd_keygen(sim_args, common.seed);
    } else {
      command = "tables";
      report = cmd_tables(tables_args);
    }
    emit(report, command, common, out);
    return report.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace bcst::cli
