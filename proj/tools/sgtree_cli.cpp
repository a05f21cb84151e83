// sgtree command line: series, count, sample, stats, verify.
// Links only the C interface.

#include "sgtree/sgtree.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kInvariant = 3, kIo = 4, kRuntime = 5 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(sgt_status st) {
  switch (st) {
    case SGT_OK: return kOk;
    case SGT_ERR_INVALID_ARGUMENT: return kUsage;
    case SGT_ERR_INVARIANT: return kInvariant;
    case SGT_ERR_IO: return kIo;
    default: return kRuntime;
  }
}

void check(sgt_status st) {
  if (st != SGT_OK) throw Failure{exit_for(st), sgt_last_error()};
}

// Owning wrappers around the C handles.
struct Str {
  char* p = nullptr;
  ~Str() { sgt_string_free(p); }
  std::string get() const { return p ? std::string(p) : std::string(); }
};

struct Weights {
  sgt_weights* h = nullptr;
  ~Weights() { sgt_weights_free(h); }
};

struct Rng {
  sgt_rng* h = nullptr;
  ~Rng() { sgt_rng_free(h); }
};

struct Sampler {
  sgt_sampler* h = nullptr;
  ~Sampler() { sgt_sampler_free(h); }
};

struct Config {
  std::string weights;
  std::size_t n = 0;
  std::size_t n_max = 9;
  std::size_t order = 10;
  std::string label = "T";
  unsigned dpow = 1;
  std::size_t count = 1;
  std::string mode = "exact";
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string emit = "trees";
  std::vector<std::string> checks;
  std::string stats_check = "summary";
  unsigned degree = 1;
  unsigned radius = 1;
  std::vector<std::size_t> sizes;
  unsigned threads = 1;
  std::string output;
  std::string format;
  bool quiet = false;
};

void load_weights(const Config& c, Weights& w) {
  if (c.weights.empty()) throw Failure{kUsage, "--weights is required"};
  // inline JSON or a path
  sgt_status st = c.weights.front() == '{' ? sgt_weights_from_json(c.weights.c_str(), &w.h)
                                           : sgt_weights_from_file(c.weights.c_str(), &w.h);
  if (st == SGT_ERR_IO) throw Failure{kIo, sgt_last_error()};
  if (st != SGT_OK) throw Failure{kInvariant, std::string("invalid weight sequence: ") + sgt_last_error()};
}

sgt_mode parse_mode(const std::string& m) {
  if (m == "exact") return SGT_MODE_EXACT;
  if (m == "approx") return SGT_MODE_APPROX;
  if (m == "planted") return SGT_MODE_PLANTED;
  if (m == "pair") return SGT_MODE_PAIR;
  throw Failure{kUsage, "unknown mode " + m};
}

class Out {
 public:
  explicit Out(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Failure{kIo, "cannot write " + path};
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// --- series / count -----------------------------------------------------

int run_series(const Config& c) {
  Weights w;
  load_weights(c, w);
  Str s;
  check(sgt_series_json(w.h, c.label.c_str(), c.dpow, c.order, &s.p));
  json coeffs = json::parse(s.get());
  Out out(c.output);
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  if (fmt == "json") {
    out.os() << json{{"label", c.label}, {"d", c.dpow}, {"order", c.order}, {"coeffs", coeffs}}.dump() << "\n";
  } else if (fmt == "ndjson") {
    for (std::size_t n = 0; n < coeffs.size(); ++n) out.os() << json{{"n", n}, {"coeff", coeffs[n]}}.dump() << "\n";
  } else {
    out.os() << "n,coeff\n";
    for (std::size_t n = 0; n < coeffs.size(); ++n) out.os() << n << "," << coeffs[n].get<std::string>() << "\n";
  }
  return kOk;
}

int run_count(const Config& c) {
  if (c.n == 0) throw Failure{kUsage, "--n is required"};
  Weights w;
  load_weights(c, w);
  Str s;
  check(sgt_series_coeff(w.h, "ZU", 1, c.n, &s.p));
  Out out(c.output);
  if (c.format == "json" || c.format == "ndjson") {
    out.os() << json{{"n", c.n}, {"count", s.get()}}.dump() << "\n";
  } else {
    out.os() << s.get() << "\n";
  }
  return kOk;
}

// --- sample / stats -----------------------------------------------------------

// Produces line i for i in [0, count) with `threads` workers; lines are
// written in index order so the output does not depend on threads.
template <class Make, class Line>
void parallel_lines(std::size_t count, unsigned threads, Make make, Line line, std::ostream& os) {
  if (threads == 0) threads = 1;
  const std::size_t block = 1024 * static_cast<std::size_t>(threads);
  std::vector<std::string> buf;
  std::vector<Failure> errors(threads, Failure{kOk, ""});
  std::vector<decltype(make())> state;
  for (unsigned t = 0; t < threads; ++t) state.push_back(make());
  for (std::size_t start = 0; start < count; start += block) {
    const std::size_t end = std::min(count, start + block);
    buf.assign(end - start, std::string());
    auto work = [&](unsigned t) {
      try {
        for (std::size_t i = start + t; i < end; i += threads) buf[i - start] = line(state[t], i);
      } catch (const Failure& f) {
        errors[t] = f;
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
      if (e.code != kOk) throw e;
    }
    for (const auto& s : buf) os << s << "\n";
  }
}

std::string csv_header(unsigned max_radius) {
  std::string h = "index,n,diameter,height_from_center,max_degree,second_max_degree,leaves,degree_hist";
  for (unsigned l = 0; l <= max_radius; ++l) h += ",nbhd" + std::to_string(l);
  return h;
}

std::string csv_row(std::size_t i, const json& r, unsigned max_radius) {
  std::ostringstream os;
  std::string hist;
  for (const auto& [d, c] : r["degree_hist"].items()) {
    if (!hist.empty()) hist += ";";
    hist += d + ":" + std::to_string(c.get<std::uint64_t>());
  }
  const json& deg = r["degree_hist"];
  os << i << "," << r["n"] << "," << r["diameter"] << "," << r["height_from_center"] << "," << r["max_degree"] << ","
     << r["second_max_degree"] << "," << (deg.contains("1") ? deg["1"].get<std::uint64_t>() : 0) << "," << hist;
  for (unsigned l = 0; l <= max_radius; ++l) {
    const std::string key = std::to_string(l);
    os << ",\"" << (r["neighborhood"].contains(key) ? r["neighborhood"][key].get<std::string>() : "") << "\"";
  }
  return os.str();
}

struct Worker {
  std::shared_ptr<Sampler> sampler;
};

Worker make_worker(const Weights& w, const Config& c) {
  Worker k{std::make_shared<Sampler>()};
  check(sgt_sampler_new(w.h, c.n, parse_mode(c.mode), &k.sampler->h));
  return k;
}

std::string draw_line(Worker& k, const Rng& base, std::size_t i, bool report, unsigned max_radius,
                      const std::string& fmt) {
  Rng r;
  check(sgt_rng_fork(base.h, i, &r.h));
  Str s;
  if (!report) {
    check(sgt_sampler_draw(k.sampler->h, r.h, &s.p));
    return s.get();
  }
  check(sgt_sampler_draw_report(k.sampler->h, r.h, max_radius, &s.p));
  if (fmt == "csv") return csv_row(i, json::parse(s.get()), max_radius);
  json j = json::parse(s.get());
  j["index"] = i;
  return j.dump();
}

int run_sample(const Config& c) {
  if (c.n == 0) throw Failure{kUsage, "--n is required"};
  Weights w;
  load_weights(c, w);
  Rng base;
  check(sgt_rng_new(c.seed, c.stream, &base.h));
  Out out(c.output);
  const bool report = c.emit == "stats";
  const std::string fmt = c.format.empty() ? (report ? "ndjson" : "trees") : c.format;
  const unsigned max_radius = 2;
  if (report && fmt == "csv") out.os() << csv_header(max_radius) << "\n";
  parallel_lines(
      c.count, c.threads, [&] { return make_worker(w, c); },
      [&](Worker& k, std::size_t i) { return draw_line(k, base, i, report, max_radius, fmt); }, out.os());
  return kOk;
}

int run_stats_summary(const Config& c, const Weights& w) {
  if (c.n == 0) throw Failure{kUsage, "--n is required"};
  Rng base;
  check(sgt_rng_new(c.seed, c.stream, &base.h));
  const unsigned max_radius = 2;
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  Out out(c.output);
  std::ostringstream rows;
  std::ostream& target = fmt == "json" ? static_cast<std::ostream&>(rows) : out.os();
  if (fmt == "csv") target << csv_header(max_radius) << "\n";
  parallel_lines(
      c.count, c.threads, [&] { return make_worker(w, c); },
      [&](Worker& k, std::size_t i) { return draw_line(k, base, i, true, max_radius, fmt == "csv" ? "csv" : "ndjson"); },
      target);
  if (fmt != "json") return kOk;

  // summary over the ndjson rows
  std::map<std::size_t, std::uint64_t> diam;
  std::map<std::string, std::uint64_t> degrees;
  double sum = 0.0, sq = 0.0;
  std::istringstream in(rows.str());
  std::string line;
  std::size_t samples = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json r = json::parse(line);
    const double d = r["diameter"].get<double>();
    sum += d;
    sq += d * d;
    ++diam[r["diameter"].get<std::size_t>()];
    for (const auto& [k, v] : r["degree_hist"].items()) degrees[k] += v.get<std::uint64_t>();
    ++samples;
  }
  const double s = static_cast<double>(samples);
  const double mean = samples ? sum / s : 0.0;
  json exceed = json::array();
  std::uint64_t above = samples;
  for (const auto& [x, cnt] : diam) {
    exceed.push_back({{"x", x}, {"p", samples ? static_cast<double>(above) / s : 0.0}});
    above -= cnt;
  }
  json deg = json::object();
  for (const auto& [k, v] : degrees) deg[k] = v;
  out.os() << json{{"n", c.n},
                   {"samples", samples},
                   {"mode", c.mode},
                   {"seed", c.seed},
                   {"stream", c.stream},
                   {"mean_diameter", mean},
                   {"sd_diameter", samples > 1 ? std::sqrt(std::max(0.0, (sq - s * mean * mean) / (s - 1.0))) : 0.0},
                   {"mean_diameter_over_sqrt_n", mean / std::sqrt(static_cast<double>(c.n))},
                   {"degree_totals", deg},
                   {"diameter_exceedance", exceed}}
                  .dump(2)
           << "\n";
  return kOk;
}

int run_stats(const Config& c) {
  Weights w;
  load_weights(c, w);
  if (c.stats_check == "summary") return run_stats_summary(c, w);
  int passed = 0;
  Str s;
  if (c.stats_check == "degree-clt") {
    if (c.n == 0) throw Failure{kUsage, "--n is required"};
    check(sgt_check_degree_clt(w.h, c.degree, c.n, c.count, c.seed, c.stream, c.threads, &passed, &s.p));
  } else if (c.stats_check == "diameter-tail") {
    if (c.n == 0) throw Failure{kUsage, "--n is required"};
    check(sgt_check_diameter_tail(w.h, c.n, c.count, c.seed, c.stream, c.threads, &passed, &s.p));
  } else if (c.stats_check == "max-degree") {
    if (c.n == 0) throw Failure{kUsage, "--n is required"};
    check(sgt_check_max_degree(w.h, c.n, c.count, c.seed, c.stream, c.threads, &passed, &s.p));
  } else if (c.stats_check == "census") {
    if (c.sizes.size() < 2) throw Failure{kUsage, "--sizes needs at least two sizes"};
    check(sgt_check_neighborhood(w.h, c.radius, c.sizes.data(), c.sizes.size(), c.count, c.seed, c.stream, c.threads,
                                 &passed, &s.p));
  } else {
    throw Failure{kUsage, "unknown stats check " + c.stats_check};
  }
  json j = json::parse(s.get());
  Out out(c.output);
  if (c.format == "csv" && j.contains("exceedance")) {
    out.os() << "x,x2_over_n,p\n";
    for (const auto& e : j["exceedance"]) out.os() << e["x"] << "," << e["x2_over_n"] << "," << e["p"] << "\n";
  } else {
    out.os() << j.dump(2) << "\n";
  }
  if (!c.quiet) std::cerr << c.stats_check << ": " << (passed ? "pass" : "FAIL") << "\n";
  return passed ? kOk : kCheckFailed;
}

int run_verify(const Config& c) {
  Weights w;
  load_weights(c, w);
  std::vector<std::string> checks = c.checks;
  if (checks.empty()) checks = {"series-oracle", "unrooted-oracle", "split-independence", "tv-decay"};
  json reports = json::array();
  bool all = true;
  for (const auto& name : checks) {
    int passed = 0;
    Str s;
    check(sgt_verify(w.h, name.c_str(), c.n_max, &passed, &s.p));
    reports.push_back(json::parse(s.get()));
    all = all && passed;
    if (!c.quiet) std::cerr << name << ": " << (passed ? "pass" : "FAIL") << "\n";
  }
  Out out(c.output);
  out.os() << json{{"checks", reports}, {"passed", all}}.dump(2) << "\n";
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgtree: simply generated plane trees"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--weights", c.weights, "weight spec file (or inline JSON)")->required();
    sub->add_option("--output", c.output, "write to this file instead of stdout");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json", "ndjson"}));
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 256u));
    sub->add_flag("--quiet", c.quiet, "no progress on stderr");
  };

  auto* series = app.add_subcommand("series", "exact series coefficients");
  common(series);
  series->add_option("--label", c.label, "T, Td, Rv, Re, L or ZU")->check(CLI::IsMember({"T", "Td", "Rv", "Re", "L", "ZU"}));
  series->add_option("--dpow", c.dpow, "d for Td (omega^d)")->check(CLI::Range(1u, 64u));
  series->add_option("--order", c.order, "truncation order")->check(CLI::Range(std::size_t{0}, std::size_t{100000}));

  auto* count = app.add_subcommand("count", "[x^n] Z_U: weighted count of unrooted trees");
  common(count);
  count->add_option("--n", c.n, "size")->required();

  auto* sample = app.add_subcommand("sample", "random trees");
  common(sample);
  sample->add_option("--n", c.n, "size")->required();
  sample->add_option("--count", c.count, "number of samples");
  sample->add_option("--mode", c.mode, "exact, approx, planted or pair")
      ->check(CLI::IsMember({"exact", "approx", "planted", "pair"}));
  sample->add_option("--seed", c.seed, "seed (default 0)");
  sample->add_option("--stream", c.stream, "stream id");
  sample->add_option("--emit", c.emit, "trees or stats")->check(CLI::IsMember({"trees", "stats"}));

  auto* stats = app.add_subcommand("stats", "tree statistics and limit-law checks");
  common(stats);
  stats->add_option("--check", c.stats_check, "summary, degree-clt, diameter-tail, max-degree or census")
      ->check(CLI::IsMember({"summary", "degree-clt", "diameter-tail", "max-degree", "census"}));
  stats->add_option("--n", c.n, "size");
  stats->add_option("--count", c.count, "samples (batches for degree-clt)");
  stats->add_option("--mode", c.mode, "sampler for the summary")
      ->check(CLI::IsMember({"exact", "approx", "planted", "pair"}));
  stats->add_option("--seed", c.seed, "seed (default 0)");
  stats->add_option("--stream", c.stream, "stream id");
  stats->add_option("--d", c.degree, "degree for degree-clt")->check(CLI::Range(1u, 1000000u));
  stats->add_option("--radius", c.radius, "neighbourhood radius for census")->check(CLI::Range(0u, 3u));
  stats->add_option("--sizes", c.sizes, "sizes for census")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "exact self-checks");
  common(verify);
  verify->add_option("--check", c.checks, "series-oracle, unrooted-oracle, split-independence, tv-decay, subexp (n-max = series order)")
      ->check(CLI::IsMember({"series-oracle", "unrooted-oracle", "split-independence", "tv-decay", "subexp"}));
  verify->add_option("--n-max", c.n_max, "largest size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*series) return run_series(c);
    if (*count) return run_count(c);
    if (*sample) return run_sample(c);
    if (*stats) return run_stats(c);
    if (*verify) return run_verify(c);
  } catch (const Failure& f) {
    std::cerr << "sgtree: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "sgtree: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
