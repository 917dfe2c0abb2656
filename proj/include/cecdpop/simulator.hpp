#pragma once

#include <algorithm>
#include <chrono>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/matrix.hpp"
#include "cecdpop/util_table.hpp"

namespace cecdpop {

// consistency(x_s, x_i): the sender's domain changed; carries the new domain
// as positions into the original domain.
struct ConsistencyMsg {
  std::vector<std::size_t> domain;
};

// NEXT_UPDATE(x_l, x_i); lca is empty for the NULL marker.
struct NextUpdateMsg {
  std::optional<VarId> lca;
};

// complete(x_i)
struct CompleteMsg {};

// CeC(x_i, M_il). `lca` names l; an empty matrix is the NULL message. When
// `across` is set the matrix travels over a cross edge to the endpoint that
// owns it, instead of down the tree.
struct CecMsg {
  std::optional<VarId> lca;
  std::optional<ConsistencyMatrix> matrix;
  bool across = false;
};

// UTIL over the sender's separator. The table is absent when only message
// shapes are being accounted.
struct UtilMsg {
  std::vector<VarId> dims;
  std::vector<std::size_t> extents;
  std::optional<UtilTable> table;
};

// Values (positions in the surviving domains) of the recipient's separator.
struct ValueMsg {
  std::vector<std::pair<VarId, std::size_t>> context;
};

using Payload = std::variant<ConsistencyMsg, NextUpdateMsg, CompleteMsg, CecMsg, UtilMsg, ValueMsg>;

struct Envelope {
  VarId from = kNoVar;
  VarId to = kNoVar;
  Payload payload;
};

inline const char* message_name(const Payload& p) {
  constexpr const char* names[] = {"consistency", "NEXT_UPDATE", "complete", "CeC", "UTIL", "VALUE"};
  return names[p.index()];
}

// Size of a message payload, in table/matrix/list entries.
inline std::size_t payload_entries(const Payload& p) {
  struct Visitor {
    std::size_t operator()(const ConsistencyMsg& m) const { return m.domain.size(); }
    std::size_t operator()(const NextUpdateMsg&) const { return 2; }
    std::size_t operator()(const CompleteMsg&) const { return 1; }
    std::size_t operator()(const CecMsg& m) const { return m.matrix ? m.matrix->entries() : 0; }
    std::size_t operator()(const UtilMsg& m) const { return UtilTable::volume(m.extents); }
    std::size_t operator()(const ValueMsg& m) const { return m.context.size(); }
  };
  return std::visit(Visitor{}, p);
}

inline std::string describe(const Envelope& e) {
  std::ostringstream os;
  os << message_name(e.payload) << " x" << e.from << "->x" << e.to;
  struct Visitor {
    std::ostringstream& os;
    void operator()(const ConsistencyMsg& m) const {
      os << " D=";
      for (auto v : m.domain) os << v << ',';
    }
    void operator()(const NextUpdateMsg& m) const {
      if (m.lca) {
        os << " l=x" << *m.lca;
      } else {
        os << " l=NULL";
      }
    }
    void operator()(const CompleteMsg&) const {}
    void operator()(const CecMsg& m) const {
      if (m.lca) os << " l=x" << *m.lca;
      if (m.across) os << " across";
      if (!m.matrix) {
        os << " NULL";
        return;
      }
      os << ' ' << m.matrix->rows() << 'x' << m.matrix->cols() << ' ';
      for (std::size_t r = 0; r < m.matrix->rows(); ++r) {
        for (std::size_t c = 0; c < m.matrix->cols(); ++c) os << (m.matrix->get(r, c) ? '1' : '0');
        os << '/';
      }
    }
    void operator()(const UtilMsg& m) const {
      os << " dims=";
      for (auto d : m.dims) os << 'x' << d << ',';
      os << " n=" << UtilTable::volume(m.extents);
      if (!m.table) return;
      // FNV-1a over the entries; full tables are too large for a transcript.
      std::uint64_t h = 1469598103934665603ULL;
      for (auto v : m.table->values()) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ULL;
      }
      os << " h=" << std::hex << h << std::dec;
    }
    void operator()(const ValueMsg& m) const {
      for (const auto& [x, v] : m.context) os << " x" << x << '=' << v;
    }
  };
  std::visit(Visitor{os}, e.payload);
  return os.str();
}

struct PhaseMetrics {
  std::string phase;
  std::size_t messages = 0;
  std::size_t entries = 0;
  std::size_t max_entries = 0;
  std::size_t rounds = 0;
  double millis = 0.0;

  // Equality ignores wall-clock time.
  friend bool operator==(const PhaseMetrics& a, const PhaseMetrics& b) {
    return a.phase == b.phase && a.messages == b.messages && a.entries == b.entries &&
           a.max_entries == b.max_entries && a.rounds == b.rounds;
  }
};

inline void record(PhaseMetrics& m, const Envelope& e) {
  const auto n = payload_entries(e.payload);
  ++m.messages;
  m.entries += n;
  m.max_entries = std::max(m.max_entries, n);
}

struct Metrics {
  std::vector<PhaseMetrics> phases;

  const PhaseMetrics* find(const std::string& name) const {
    for (const auto& p : phases) {
      if (p.phase == name) return &p;
    }
    return nullptr;
  }

  PhaseMetrics phase_or_empty(const std::string& name) const {
    const auto* p = find(name);
    return p ? *p : PhaseMetrics{name};
  }

  PhaseMetrics total() const {
    PhaseMetrics t{"total"};
    for (const auto& p : phases) {
      t.messages += p.messages;
      t.entries += p.entries;
      t.max_entries = std::max(t.max_entries, p.max_entries);
      t.rounds += p.rounds;
      t.millis += p.millis;
    }
    return t;
  }

  static constexpr const char* kCsvHeader = "phase,messages,entries,max_entries,rounds,millis";

  static std::string csv_row(const PhaseMetrics& p) {
    std::ostringstream os;
    os << p.phase << ',' << p.messages << ',' << p.entries << ',' << p.max_entries << ',' << p.rounds
       << ',' << p.millis;
    return os.str();
  }

  std::string to_csv() const {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& p : phases) out += csv_row(p) + "\n";
    out += csv_row(total()) + "\n";
    return out;
  }

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Transcript {
  std::vector<std::string> lines;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct RunOptions;

class Outbox {
 public:
  void send(VarId to, Payload payload) { pending_.push_back({self_, to, std::move(payload)}); }

 private:
  template <class A>
  friend PhaseMetrics run_phase(const std::string&, std::vector<A>&, const RunOptions&);
  VarId self_ = kNoVar;
  std::vector<Envelope> pending_;
};

struct RunOptions {
  // 0 processes agents in ascending id; any other value shuffles the
  // within-round processing order with this seed.
  std::uint64_t order_seed = 0;
  // 0 selects the default guard of 10 * |X| * d rounds.
  std::size_t round_limit = 0;
  std::size_t max_domain = 1;
  Transcript* transcript = nullptr;
};

// An agent reads only its own state and the messages delivered to it.
template <class A>
concept PhaseAgent = requires(A& a, const A& ca, std::span<const Envelope> inbox, Outbox& out) {
  { a.step(inbox, out) };
  { ca.done() } -> std::convertible_to<bool>;
};

// Synchronous rounds: everything sent in round t is delivered at the start of
// round t+1, ordered by sender id then send order. Runs until no message is in
// flight and every agent reports done.
template <class A>
PhaseMetrics run_phase(const std::string& name, std::vector<A>& agents, const RunOptions& opts) {
  static_assert(PhaseAgent<A>);
  PhaseMetrics metrics{name};
  const auto n = agents.size();
  const std::size_t limit = opts.round_limit ? opts.round_limit
                                             : std::max<std::size_t>(10 * n * std::max<std::size_t>(opts.max_domain, 1), 4);
  std::vector<std::vector<Envelope>> inbox(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.order_seed);
  std::chrono::duration<double, std::milli> busy{0};

  for (std::size_t round = 0;; ++round) {
    if (round >= limit) {
      throw RoundLimitExceeded(name + ": no quiescence after " + std::to_string(limit) + " rounds");
    }
    if (opts.order_seed != 0) std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<Envelope>> sent(n);
    const auto t0 = std::chrono::steady_clock::now();
    for (auto i : order) {
      Outbox out;
      out.self_ = static_cast<VarId>(i);
      agents[i].step(std::span<const Envelope>(inbox[i]), out);
      sent[i] = std::move(out.pending_);
    }
    busy += std::chrono::steady_clock::now() - t0;

    std::vector<std::vector<Envelope>> next(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& e : sent[i]) {
        if (e.to < 0 || static_cast<std::size_t>(e.to) >= n) {
          throw ProtocolError(name + ": message to unknown agent x" + std::to_string(e.to));
        }
        record(metrics, e);
        if (opts.transcript) {
          opts.transcript->lines.push_back(name + " r" + std::to_string(round) + ' ' + describe(e));
        }
        next[static_cast<std::size_t>(e.to)].push_back(std::move(e));
        any = true;
      }
    }
    inbox = std::move(next);
    if (!any) {
      metrics.rounds = round + 1;
      for (const auto& a : agents) {
        if (!a.done()) throw ProtocolError(name + ": agents idle before completing (deadlock)");
      }
      break;
    }
  }
  metrics.millis = busy.count();
  return metrics;
}

}  // namespace cecdpop
