#include "morphgrad/cli/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "morphgrad/cli/history_csv.hpp"

namespace morphgrad {

namespace {

void put_values(std::ostringstream& out, const std::vector<double>& values) {
  for (double v : values) out << ' ' << format_double(v);
}

// Reads "<keyword> rest..." lines in order.
class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::string raw() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_no_;
    return line;
  }

  // Returns the remainder of the line after `keyword`.
  std::istringstream expect(const std::string& keyword) {
    const std::string line = raw();
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != keyword) fail("expected '" + keyword + "', found '" + word + "'");
    return ss;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw CheckpointError("checkpoint line " + std::to_string(line_no_) + ": " + message);
  }

  std::size_t read_count(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing count");
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(tok, &pos);
      if (pos != tok.size() || tok[0] == '-') fail("bad count '" + tok + "'");
      return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      fail("bad count '" + tok + "'");
    }
  }

  std::vector<double> read_values(std::istringstream& ss, std::size_t n) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string tok;
      if (!(ss >> tok)) fail("expected " + std::to_string(n) + " values");
      try {
        values[i] = parse_double(tok);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
    finish(ss);
    return values;
  }

  void finish(std::istringstream& ss) {
    std::string extra;
    if (ss >> extra) fail("trailing data '" + extra + "'");
  }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string format_checkpoint(const RunConfig& cfg, const TrainState& state) {
  std::ostringstream out;
  out << "morphgrad-checkpoint " << kCheckpointVersion << '\n';
  out << "digest " << config_digest(cfg) << '\n';
  const std::string text = serialize(cfg);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  out << "config " << lines << '\n' << text;
  out << "generation " << state.generation << '\n';
  out << "dim " << state.dist.dim() << '\n';
  out << "mu";
  put_values(out, state.dist.mu);
  out << "\nsigma";
  put_values(out, state.dist.sigma);
  out << "\nbest_avg_score " << format_double(state.best_avg_score) << '\n';
  out << "best_params " << state.best_params.size();
  put_values(out, state.best_params);
  out << "\nhistory " << state.history.size() << '\n';
  for (const HistoryRow& row : state.history) out << format_history_row(row) << '\n';
  out << "end\n";
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  LineReader r(text);
  Checkpoint ckpt;
  {
    auto ss = r.expect("morphgrad-checkpoint");
    const std::size_t version = r.read_count(ss);
    if (version != static_cast<std::size_t>(kCheckpointVersion))
      r.fail("unsupported version " + std::to_string(version));
  }
  std::string digest;
  {
    auto ss = r.expect("digest");
    ss >> digest;
    r.finish(ss);
  }
  {
    auto ss = r.expect("config");
    const std::size_t n = r.read_count(ss);
    std::string cfg_text;
    for (std::size_t i = 0; i < n; ++i) cfg_text += r.raw() + '\n';
    try {
      ckpt.config = parse_run_config(cfg_text);
    } catch (const ConfigError& e) {
      r.fail(std::string("embedded config: ") + e.what());
    }
  }
  if (config_digest(ckpt.config) != digest)
    throw DigestMismatchError("checkpoint digest " + digest +
                              " does not match its embedded config");

  TrainState& s = ckpt.state;
  {
    auto ss = r.expect("generation");
    s.generation = r.read_count(ss);
    r.finish(ss);
  }
  std::size_t dim = 0;
  {
    auto ss = r.expect("dim");
    dim = r.read_count(ss);
    r.finish(ss);
  }
  {
    auto ss = r.expect("mu");
    s.dist.mu = r.read_values(ss, dim);
  }
  {
    auto ss = r.expect("sigma");
    s.dist.sigma = r.read_values(ss, dim);
  }
  {
    auto ss = r.expect("best_avg_score");
    s.best_avg_score = r.read_values(ss, 1)[0];
  }
  {
    auto ss = r.expect("best_params");
    const std::size_t n = r.read_count(ss);
    s.best_params = r.read_values(ss, n);
  }
  {
    auto ss = r.expect("history");
    const std::size_t n = r.read_count(ss);
    r.finish(ss);
    std::string csv = std::string(kHistoryHeader) + '\n';
    for (std::size_t i = 0; i < n; ++i) csv += r.raw() + '\n';
    if (n > 0) {
      try {
        s.history = parse_history_csv(csv);
      } catch (const CsvError& e) {
        r.fail(std::string("history: ") + e.what());
      }
    }
  }
  {
    auto ss = r.expect("end");
    r.finish(ss);
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const RunConfig& cfg, const TrainState& state) {
  // Write then rename so an interrupted save never leaves a torn file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << format_checkpoint(cfg, state);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

void require_same_config(const Checkpoint& ckpt, const RunConfig& cfg) {
  const std::string have = config_digest(ckpt.config), want = config_digest(cfg);
  if (have != want)
    throw DigestMismatchError("checkpoint was written for config " + have + ", not " + want);
}

}  // namespace morphgrad
