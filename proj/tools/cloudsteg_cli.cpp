// Command-line front end for the disk-contention covert channel simulator.
//
// Exit codes: 0 success, 1 decode or BER failure, 2 invalid arguments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cloudsteg/cloudsteg.hpp"

namespace {

using namespace cloudsteg;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

struct ChannelOptions {
  std::int64_t bt = 10000;
  std::int64_t pri = 400;
  int n = 5;
  double th = 0.9;
  std::string noise = "moderate";
  std::string disk = "calibrated";
  std::string config_path;
  std::string interferer = "none";
  std::uint64_t seed = 1;
  std::int64_t lead_in = -1;
};

struct PayloadOptions {
  std::optional<std::string> bits;
  std::optional<std::string> text;
  std::size_t random_length = 96;
  std::uint64_t payload_seed = 2014;
};

void add_channel_options(CLI::App* cmd, ChannelOptions& o) {
  cmd->add_option("--bt", o.bt, "Bit time in ms")->capture_default_str();
  cmd->add_option("--pri", o.pri, "Probing interval in ms")->capture_default_str();
  cmd->add_option("--n", o.n, "Number of accessor tasks")->capture_default_str();
  cmd->add_option("--th", o.th, "Fraction of the last bit time of an access run spent accessing")
      ->capture_default_str();
  cmd->add_option("--noise", o.noise, "Noise preset")
      ->check(CLI::IsMember({"ideal", "moderate", "harsh"}))
      ->capture_default_str();
  cmd->add_option("--disk", o.disk, "Disk model: calibrated (overload + correlated noise) or affine")
      ->check(CLI::IsMember({"calibrated", "affine"}))
      ->capture_default_str();
  cmd->add_option("--config", o.config_path, "Key-value channel config file (overrides --disk/--noise)");
  cmd->add_option("--interferer", o.interferer, "Interferer preset")
      ->check(CLI::IsMember({"none", "benchmark", "stress"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  cmd->add_option("--lead-in", o.lead_in, "Receiver lead-in in ms (negative: drawn from the seed)")
      ->capture_default_str();
}

void add_payload_options(CLI::App* cmd, PayloadOptions& o) {
  auto* bits = cmd->add_option("--payload", o.bits, "Payload as a string of 0/1");
  auto* text = cmd->add_option("--text", o.text, "Payload as text (UTF-8 bytes, MSB first)");
  bits->excludes(text);
  cmd->add_option("--random", o.random_length, "Random payload length when no payload is given")
      ->capture_default_str();
  cmd->add_option("--payload-seed", o.payload_seed, "Seed of the random payload")->capture_default_str();
}

NoisePreset noise_preset(const std::string& name) {
  if (name == "ideal") return NoisePreset::Ideal;
  if (name == "harsh") return NoisePreset::Harsh;
  return NoisePreset::Moderate;
}

InterfererProfile interferer_preset(const std::string& name) {
  if (name == "benchmark") return InterfererProfile::benchmark();
  if (name == "stress") return InterfererProfile::stress();
  return InterfererProfile::none();
}

ChannelParams channel_params(const ChannelOptions& o) {
  ChannelParams c;
  c.bit_time_ms = o.bt;
  c.pri_ms = o.pri;
  c.n_accessors = o.n;
  c.threshold = o.th;
  const NoisePreset preset = noise_preset(o.noise);
  c.disk = o.disk == "affine" ? DiskModel::affine(preset) : DiskModel::calibrated(preset);
  c.interferer = interferer_preset(o.interferer);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + o.config_path);
    const auto cfg = io::read_channel_config(in, io::ChannelConfig{c.disk, c.interferer});
    c.disk = cfg.disk;
    c.interferer = cfg.interferer;
  }
  c.base_seed = o.seed;
  c.lead_in_ms = o.lead_in;
  return c;
}

PayloadSpec payload_spec(const PayloadOptions& o) {
  PayloadSpec p;
  if (o.bits) {
    p.bits = BitSequence::from_string(*o.bits);
  } else if (o.text) {
    p.bits = BitSequence::from_text(*o.text);
  }
  p.random_length = o.random_length;
  p.seed = o.payload_seed;
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  out << content;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidSpec, "values: cannot parse '" + item + "'");
    }
  }
  if (values.empty()) throw Error(ErrorCode::InvalidSpec, "values: empty list");
  return values;
}

int cmd_encode(const ChannelOptions& co, const PayloadOptions& po, const std::string& schedule_out) {
  const ChannelParams c = channel_params(co);
  const BitSequence payload = payload_spec(po).materialize();
  const BitSequence message = framing::encapsulate(payload);
  const TimeChangeVector tcv = encode_tcv(message, c.bit_time_ms);
  const AccessSchedule schedule = build_access_schedule(tcv, c.sender());
  std::cout << "payload:  " << payload.to_string() << '\n';
  std::cout << "message:  " << message.to_string() << '\n';
  std::cout << "tcv_ms:  ";
  for (auto d : tcv.durations_ms) std::cout << ' ' << d;
  std::cout << '\n';
  std::cout << "access_ms_per_accessor: " << format_number(schedule.access_time_ms()) << '\n';
  if (!schedule_out.empty()) {
    std::ostringstream out;
    io::write_schedule(out, schedule);
    write_file(schedule_out, out.str());
  }
  return kExitOk;
}

int cmd_decode(const std::string& trace_path, std::int64_t bt, std::int64_t pri, const std::string& diagnostics,
               bool as_text) {
  std::ifstream in(trace_path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read trace " + trace_path);
  ContentionTrace trace = io::read_trace_csv(in);
  if (trace.pri_ms == 0) trace.pri_ms = pri;
  DecoderConfig cfg;
  cfg.bit_time_ms = bt;
  cfg.pri_ms = pri;
  cfg.validate();
  const DecodeDiagnostics diag = decode_with_diagnostics(trace, cfg);
  if (!diagnostics.empty()) {
    std::ostringstream out;
    io::write_diagnostics_csv(out, diag);
    write_file(diagnostics, out.str());
  }
  if (diag.error) {
    if (diag.error->code() == ErrorCode::InvalidSpec) throw *diag.error;
    std::cerr << "decode failed: " << diag.error->what() << '\n';
    return kExitFailure;
  }
  std::cout << (as_text ? diag.payload->to_text() : diag.payload->to_string()) << '\n';
  return kExitOk;
}

struct Transmission {
  BitSequence payload;
  AccessSchedule schedule;
  RunSetup setup;
  ContentionTrace trace;
};

Transmission run_transmission(const ChannelParams& c, const PayloadSpec& ps, std::int64_t run_duration) {
  ExperimentSpec spec;
  spec.channel = c;
  spec.payload = ps;
  validate(spec);
  Transmission t;
  t.payload = ps.materialize();
  t.schedule = schedule_message(framing::encapsulate(t.payload), c.sender());
  t.setup = run_setup(c, t.schedule, c.base_seed);
  if (run_duration > 0) t.setup.run_duration_ms = run_duration;
  t.trace = simulate(t.schedule, c.disk, c.interferer, c.pri_ms, t.setup.run_duration_ms, t.setup.lead_in_ms,
                     c.base_seed);
  return t;
}

int cmd_simulate(const ChannelOptions& co, const PayloadOptions& po, const std::string& schedule_path,
                 std::int64_t run_duration, const std::string& out_path) {
  const ChannelParams c = channel_params(co);
  ContentionTrace trace;
  if (!schedule_path.empty()) {
    std::ifstream in(schedule_path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read schedule " + schedule_path);
    const AccessSchedule schedule = io::read_schedule(in);
    const std::int64_t lead = std::max<std::int64_t>(0, c.lead_in_ms);
    std::int64_t run = run_duration;
    if (run <= 0) {
      const std::int64_t needed = lead + schedule.total_duration_ms + 2 * c.bit_time_ms;
      run = (needed + c.pri_ms - 1) / c.pri_ms * c.pri_ms;
    }
    trace = simulate(schedule, c.disk, c.interferer, c.pri_ms, run, lead, c.base_seed);
  } else {
    trace = run_transmission(c, payload_spec(po), run_duration).trace;
  }
  const std::string csv = io::trace_to_csv(trace);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return kExitOk;
}

int cmd_transmit(const ChannelOptions& co, const PayloadOptions& po, const std::string& trace_out,
                 const std::string& diagnostics) {
  const ChannelParams c = channel_params(co);
  const Transmission t = run_transmission(c, payload_spec(po), 0);
  if (!trace_out.empty()) write_file(trace_out, io::trace_to_csv(t.trace));
  const DecodeDiagnostics diag = decode_with_diagnostics(t.trace, c.decoder());
  if (!diagnostics.empty()) {
    std::ostringstream out;
    io::write_diagnostics_csv(out, diag);
    write_file(diagnostics, out.str());
  }
  const std::optional<BitSequence> received = diag.error ? std::nullopt : diag.payload;
  const double ber = run_bit_error_rate(t.payload, received);
  std::cout << "sent:      " << t.payload.to_string() << '\n';
  if (received) {
    std::cout << "recovered: " << received->to_string() << '\n';
  } else {
    std::cout << "recovered: <none> (" << diag.error->what() << ")\n";
  }
  std::cout << "lead_in_ms: " << t.setup.lead_in_ms << '\n';
  std::cout << "BER: " << format_number(ber) << '\n';
  return ber == 0.0 ? kExitOk : kExitFailure;
}

int emit_reports(const std::vector<BerReport>& reports, const std::string& out_path) {
  std::ostringstream csv;
  io::write_report_csv(csv, reports);
  if (!out_path.empty()) {
    write_file(out_path, csv.str());
  } else {
    std::cout << csv.str() << '\n';
  }
  io::write_summary_table(std::cout, reports);
  return kExitOk;
}

int cmd_sweep(const ChannelOptions& co, const PayloadOptions& po, int reps, const std::string& axis,
              const std::string& values, const std::string& out_path) {
  ExperimentSpec spec;
  spec.channel = channel_params(co);
  spec.payload = payload_spec(po);
  spec.repetitions = reps;
  if (axis == "table1") return emit_reports(bandwidth_sweep(spec), out_path);
  spec.sweep_axis = SweepAxis{axis, parse_values(values)};
  return emit_reports(sweep(spec), out_path);
}

int cmd_robustness(const ChannelOptions& co, const PayloadOptions& po, int reps, const std::string& out_path) {
  ExperimentSpec spec;
  spec.channel = channel_params(co);
  spec.payload = payload_spec(po);
  spec.repetitions = reps;
  return emit_reports(robustness_scenarios(spec), out_path);
}

int cmd_probe(const ChannelOptions& co, const PayloadOptions& po, std::int64_t run_duration,
              const std::string& out_path) {
  ChannelParams c = channel_params(co);
  if (c.lead_in_ms < 0) c.lead_in_ms = 10 * c.bit_time_ms;
  ExperimentSpec spec;
  spec.channel = c;
  spec.payload = payload_spec(po);
  validate(spec);
  const AccessSchedule schedule = schedule_message(framing::encapsulate(spec.payload.materialize()), c.sender());
  std::int64_t run = run_duration;
  if (run <= 0) {
    const std::int64_t needed = 2 * c.lead_in_ms + schedule.total_duration_ms;
    run = (needed + c.pri_ms - 1) / c.pri_ms * c.pri_ms;
  }
  const ContentionTrace trace = control_probe_trace(schedule, c.disk, c.pri_ms, run, c.lead_in_ms, c.base_seed);
  const std::string csv = io::trace_to_csv(trace);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
    std::cout << "transmission: [" << c.lead_in_ms << ", " << c.lead_in_ms + schedule.total_duration_ms
              << ") ms of " << run << " ms\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disk-contention covert channel: encoder, channel simulator, decoder and BER harness"};
  app.require_subcommand(1);

  ChannelOptions co;
  PayloadOptions po;
  std::string out_path;
  std::string diagnostics;
  std::string trace_out;
  std::string schedule_path;
  std::string trace_path;
  std::string axis;
  std::string values;
  std::int64_t run_duration = 0;
  int reps = 3;
  bool as_text = false;

  auto* encode = app.add_subcommand("encode", "Encapsulate a payload and print its timing vector");
  add_channel_options(encode, co);
  add_payload_options(encode, po);
  encode->add_option("--schedule-out", schedule_path, "Write the access schedule to this file");

  auto* decode = app.add_subcommand("decode", "Decode a contention trace CSV");
  decode->add_option("--trace", trace_path, "Trace CSV (window_start_ms,avg_access_time_ms)")->required();
  decode->add_option("--bt", co.bt, "Bit time in ms")->capture_default_str();
  decode->add_option("--pri", co.pri, "Probing interval in ms")->capture_default_str();
  decode->add_option("--diagnostics", diagnostics, "Write per-phase diagnostics CSV");
  decode->add_flag("--as-text", as_text, "Print the payload as text");

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the receiver's contention trace");
  add_channel_options(simulate_cmd, co);
  add_payload_options(simulate_cmd, po);
  simulate_cmd->add_option("--schedule", schedule_path, "Use an access schedule file instead of a payload");
  simulate_cmd->add_option("--run-duration", run_duration, "Run length in ms (0: automatic)");
  simulate_cmd->add_option("--out", out_path, "Trace CSV path (default stdout)");

  auto* transmit = app.add_subcommand("transmit", "Encode, simulate and decode one transmission");
  add_channel_options(transmit, co);
  add_payload_options(transmit, po);
  transmit->add_option("--trace-out", trace_out, "Write the simulated trace CSV");
  transmit->add_option("--diagnostics", diagnostics, "Write per-phase diagnostics CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "BER over a parameter sweep");
  add_channel_options(sweep_cmd, co);
  add_payload_options(sweep_cmd, po);
  sweep_cmd->add_option("--axis", axis, "bt, pri, n, th, sigma, or table1 (all bandwidth rows)")
      ->required()
      ->check(CLI::IsMember({"bt", "pri", "n", "th", "sigma", "table1"}));
  sweep_cmd->add_option("--values", values, "Comma-separated values of the swept parameter");
  sweep_cmd->add_option("--reps", reps, "Repetitions per point")->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* robustness = app.add_subcommand("robustness", "BER with no, benchmark and stress interferers");
  add_channel_options(robustness, co);
  add_payload_options(robustness, po);
  robustness->add_option("--reps", reps, "Repetitions per scenario")->capture_default_str();
  robustness->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* probe = app.add_subcommand("probe", "Control-probe load trace around one transmission");
  add_channel_options(probe, co);
  add_payload_options(probe, po);
  probe->add_option("--run-duration", run_duration, "Run length in ms (0: automatic)");
  probe->add_option("--out", out_path, "Trace CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*encode) return cmd_encode(co, po, schedule_path);
    if (*decode) return cmd_decode(trace_path, co.bt, co.pri, diagnostics, as_text);
    if (*simulate_cmd) return cmd_simulate(co, po, schedule_path, run_duration, out_path);
    if (*transmit) return cmd_transmit(co, po, trace_out, diagnostics);
    if (*sweep_cmd) {
      if (axis != "table1" && values.empty()) throw Error(ErrorCode::InvalidSpec, "values: required for --axis " + axis);
      return cmd_sweep(co, po, reps, axis, values, out_path);
    }
    if (*robustness) return cmd_robustness(co, po, reps, out_path);
    if (*probe) return cmd_probe(co, po, run_duration, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InvalidSpec:
      case ErrorCode::InvalidConfig:
      case ErrorCode::ParseError:
      case ErrorCode::LeadingZero:
      case ErrorCode::WindowMismatch:
        return kExitInvalid;
      default:
        return kExitFailure;
    }
  }
  return kExitInvalid;
}
