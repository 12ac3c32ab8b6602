#include "stirap/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stirap/errors.hpp"

namespace stirap {
namespace {

constexpr const char* kMagic = "# stirap-checkpoint v1";

std::string encode(const CellResult& c) {
  std::ostringstream os;
  if (!c.error.empty()) {
    std::string msg = c.error;
    for (char& ch : msg)
      if (ch == '\n' || ch == '\r') ch = ' ';
    os << "err " << msg;
  } else {
    os << "ok " << c.values.size();
    char buf[40];
    for (double v : c.values) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      os << buf;
    }
  }
  return os.str();
}

void write_checkpoint(const std::filesystem::path& path, const std::vector<CellResult>& cells) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    out << kMagic << " cells=" << cells.size() << '\n';
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].done) out << i << ' ' << encode(cells[i]) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::size_t read_checkpoint(const std::filesystem::path& path, std::vector<CellResult>& cells) {
  std::ifstream in(path);
  if (!in) return 0;
  std::string header;
  std::getline(in, header);
  std::ostringstream expect;
  expect << kMagic << " cells=" << cells.size();
  if (header != expect.str())
    throw ConfigError("checkpoint " + path.string() + " does not match this sweep (" + header + ")");

  std::size_t restored = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::size_t index = 0;
    std::string kind;
    if (!(is >> index >> kind) || index >= cells.size())
      throw ConfigError("corrupt checkpoint line: " + line);
    CellResult c;
    c.done = true;
    if (kind == "ok") {
      std::size_t n = 0;
      is >> n;
      c.values.resize(n);
      for (auto& v : c.values) {
        std::string tok;
        is >> tok;
        v = std::strtod(tok.c_str(), nullptr);
      }
      if (!is) throw ConfigError("corrupt checkpoint line: " + line);
    } else if (kind == "err") {
      std::getline(is >> std::ws, c.error);
      if (c.error.empty()) c.error = "unknown error";
    } else {
      throw ConfigError("corrupt checkpoint line: " + line);
    }
    if (!cells[index].done) ++restored;
    cells[index] = std::move(c);
  }
  return restored;
}

}  // namespace

SweepOutcome run_sweep(std::size_t cells, const CellTask& task, const SweepOptions& opts) {
  SweepOutcome out;
  out.cells.resize(cells);
  const bool checkpointing = !opts.checkpoint.empty();
  if (checkpointing) out.resumed = read_checkpoint(opts.checkpoint, out.cells);

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells; ++i)
    if (!out.cells[i].done) pending.push_back(i);
  if (opts.stop_after > 0 && pending.size() > opts.stop_after) pending.resize(opts.stop_after);

  std::mutex lock;
  std::size_t since_flush = 0;
  const std::size_t every = std::max<std::size_t>(opts.checkpoint_every, 1);
  parallel_for(pending.size(), opts.workers, [&](std::size_t k) {
    const std::size_t i = pending[k];
    CellResult r;
    try {
      r.values = task(i);
    } catch (const std::exception& e) {
      r.error = e.what();
      if (r.error.empty()) r.error = "cell failed";
    }
    r.done = true;
    std::lock_guard<std::mutex> guard(lock);
    out.cells[i] = std::move(r);
    ++out.computed;
    if (checkpointing && ++since_flush >= every) {
      write_checkpoint(opts.checkpoint, out.cells);
      since_flush = 0;
    }
  });

  out.complete = std::all_of(out.cells.begin(), out.cells.end(), [](const CellResult& c) { return c.done; });
  if (checkpointing) {
    if (out.complete) {
      std::error_code ec;
      std::filesystem::remove(opts.checkpoint, ec);
    } else {
      write_checkpoint(opts.checkpoint, out.cells);
    }
  }
  return out;
}

}  // namespace stirap
