#include "rndiff/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rndiff/format.hpp"
#include "rndiff/pricing.hpp"

namespace rndiff::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& value, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list element in '" + value + "'");
    out.push_back(parse(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

double to_double(const std::string& s) { return parse_double(s); }
int to_int(const std::string& s) { return static_cast<int>(parse_integer(s)); }

std::size_t to_count(const std::string& s) {
  const long long v = parse_integer(s);
  if (v < 0) throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::uint64_t to_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad seed '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

std::string predictor_text(const ExperimentConfig& c) {
  switch (c.predictor) {
    case PredictorSource::Oracle:
      return "oracle";
    case PredictorSource::Train:
      return "train";
    case PredictorSource::Load:
      return "load:" + c.model_path;
  }
  return "oracle";
}

void set_predictor(ExperimentConfig& c, const std::string& v) {
  if (v == "oracle") {
    c.predictor = PredictorSource::Oracle;
  } else if (v == "train") {
    c.predictor = PredictorSource::Train;
  } else if (v.starts_with("load:") && v.size() > 5) {
    c.predictor = PredictorSource::Load;
    c.model_path = v.substr(5);
  } else {
    throw std::invalid_argument("predictor must be oracle, train or load:PATH, got '" + v + "'");
  }
}

std::vector<ConfigKey> build_keys() {
  using C = ExperimentConfig;
  auto num = [](double v) { return format_exact(v); };
  auto whole = [](auto v) { return std::to_string(v); };
  return {
      {"s0", "initial price", [](C& c, const std::string& v) { c.market.s0 = to_double(v); },
       [=](const C& c) { return num(c.market.s0); }},
      {"mu", "physical drift (annual)", [](C& c, const std::string& v) { c.market.mu = to_double(v); },
       [=](const C& c) { return num(c.market.mu); }},
      {"r", "risk-free rate (annual, continuous)", [](C& c, const std::string& v) { c.market.r = to_double(v); },
       [=](const C& c) { return num(c.market.r); }},
      {"sigma", "volatility (annual)", [](C& c, const std::string& v) { c.market.sigma = to_double(v); },
       [=](const C& c) { return num(c.market.sigma); }},
      {"dt", "calendar step in years", [](C& c, const std::string& v) { c.market.dt = to_double(v); },
       [=](const C& c) { return num(c.market.dt); }},
      {"H", "path horizon in calendar steps", [](C& c, const std::string& v) { c.market.horizon = to_int(v); },
       [=](const C& c) { return whole(c.market.horizon); }},
      {"T", "diffusion steps", [](C& c, const std::string& v) { c.schedule.steps = to_int(v); },
       [=](const C& c) { return whole(c.schedule.steps); }},
      {"beta_start", "first diffusion beta", [](C& c, const std::string& v) { c.schedule.beta_start = to_double(v); },
       [=](const C& c) { return num(c.schedule.beta_start); }},
      {"beta_end", "last diffusion beta", [](C& c, const std::string& v) { c.schedule.beta_end = to_double(v); },
       [=](const C& c) { return num(c.schedule.beta_end); }},
      {"n_samples", "training returns drawn from the physical law",
       [](C& c, const std::string& v) { c.training.n_samples = to_count(v); },
       [=](const C& c) { return whole(c.training.n_samples); }},
      {"epochs", "training epochs", [](C& c, const std::string& v) { c.training.epochs = to_int(v); },
       [=](const C& c) { return whole(c.training.epochs); }},
      {"batch_size", "training minibatch size", [](C& c, const std::string& v) { c.training.batch_size = to_int(v); },
       [=](const C& c) { return whole(c.training.batch_size); }},
      {"learning_rate", "peak SGD learning rate",
       [](C& c, const std::string& v) { c.training.learning_rate = to_double(v); },
       [=](const C& c) { return num(c.training.learning_rate); }},
      {"momentum", "SGD momentum", [](C& c, const std::string& v) { c.training.momentum = to_double(v); },
       [=](const C& c) { return num(c.training.momentum); }},
      {"ema_decay", "weight averaging decay, 0 disables",
       [](C& c, const std::string& v) { c.training.ema_decay = to_double(v); },
       [=](const C& c) { return num(c.training.ema_decay); }},
      {"hidden_width", "network hidden width", [](C& c, const std::string& v) { c.training.hidden_width = to_int(v); },
       [=](const C& c) { return whole(c.training.hidden_width); }},
      {"heldout_fraction", "share of training data held out for the gate",
       [](C& c, const std::string& v) { c.training.heldout_fraction = to_double(v); },
       [=](const C& c) { return num(c.training.heldout_fraction); }},
      {"gate_ratio", "held-out loss must be at most this times the oracle loss",
       [](C& c, const std::string& v) { c.training.gate_ratio = to_double(v); },
       [=](const C& c) { return num(c.training.gate_ratio); }},
      {"train_seed", "seed for training data and optimization",
       [](C& c, const std::string& v) { c.training.seed = to_seed(v); },
       [=](const C& c) { return whole(c.training.seed); }},
      {"paths", "Monte Carlo paths per method", [](C& c, const std::string& v) { c.n_paths = to_count(v); },
       [=](const C& c) { return whole(c.n_paths); }},
      {"seed", "sampling seed", [](C& c, const std::string& v) { c.seed = to_seed(v); },
       [=](const C& c) { return whole(c.seed); }},
      {"strikes", "comma-separated moneyness grid K/s0",
       [](C& c, const std::string& v) { c.strikes = parse_list<double>(v, to_double); },
       [=](const C& c) { return join(c.strikes, num); }},
      {"predictor", "oracle, train or load:PATH", set_predictor, predictor_text},
      {"out", "output directory", [](C& c, const std::string& v) { c.out_dir = v; },
       [](const C& c) { return c.out_dir; }},
      {"ks_paths", "terminal prices used by the KS test", [](C& c, const std::string& v) { c.ks_paths = to_count(v); },
       [=](const C& c) { return whole(c.ks_paths); }},
      {"asian_horizons", "comma-separated Asian horizons in steps",
       [](C& c, const std::string& v) { c.asian_horizons = parse_list<int>(v, to_int); },
       [=](const C& c) { return join(c.asian_horizons, whole); }},
      {"asian_strikes", "comma-separated Asian moneyness grid",
       [](C& c, const std::string& v) { c.asian_strikes = parse_list<double>(v, to_double); },
       [=](const C& c) { return join(c.asian_strikes, num); }},
      {"svg", "write SVG plots (true/false)", [](C& c, const std::string& v) { c.svg = to_bool(v); },
       [](const C& c) { return std::string(c.svg ? "true" : "false"); }},
  };
}

}  // namespace

void ExperimentConfig::validate() const {
  market.validate();
  DiffusionSchedule check(schedule);
  if (n_paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (strikes.empty()) throw std::invalid_argument("strikes must be non-empty");
  for (double k : strikes) {
    if (!(k > 0.0)) throw std::invalid_argument("strikes must be positive");
  }
  for (double k : asian_strikes) {
    if (!(k > 0.0)) throw std::invalid_argument("asian_strikes must be positive");
  }
  for (int h : asian_horizons) {
    if (h < 1) throw std::invalid_argument("asian_horizons must be >= 1");
  }
  if (ks_paths < 10) throw std::invalid_argument("ks_paths must be >= 10");
  if (training.n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  if (training.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (training.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (training.hidden_width < 1) throw std::invalid_argument("hidden_width must be >= 1");
  if (!(training.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(training.heldout_fraction > 0.0 && training.heldout_fraction < 1.0)) {
    throw std::invalid_argument("heldout_fraction must be in (0, 1)");
  }
  if (out_dir.empty()) throw std::invalid_argument("out must be non-empty");
}

double baseline_rate() { return implied_rate(2.51, 100.0, 100.0, 0.2, 21.0 / 252.0); }

ExperimentConfig baseline_config() {
  ExperimentConfig c;
  c.market.s0 = 100.0;
  c.market.mu = 0.10;
  c.market.r = baseline_rate();
  c.market.sigma = 0.2;
  c.market.dt = 1.0 / 252.0;
  c.market.horizon = 21;
  c.strikes = default_moneyness();
  return c;
}

ExperimentConfig stress_config() {
  ExperimentConfig c = baseline_config();
  c.market.mu = 0.15;
  c.market.r = 0.01;
  c.market.horizon = 63;
  return c;
}

ExperimentConfig preset_for(const std::string& command) {
  if (command == "stress") return stress_config();
  ExperimentConfig c = baseline_config();
  if (command == "train") c.predictor = PredictorSource::Train;
  return c;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const ConfigKey& k : config_keys()) {
    if (k.name != key) continue;
    try {
      k.set(cfg, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("bad value for '" + key + "': " + e.what());
    }
    return;
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(cfg, text.str(), path);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const ConfigKey& k : config_keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace rndiff::cli
