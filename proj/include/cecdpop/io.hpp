#pragma once

// Text problem format. Blank lines and lines starting with '#' are ignored.
//
//   dcop 1
//   variables <n>
//   agents <k>
//   domain <x> <v_1> ... <v_d>         one line per variable
//   owner <x> <agent>                  optional; default is agent x for variable x
//   soft <i> <j>                       followed by |D_i| rows of |D_j| utilities
//   hard <i> <j> lt|gt|eq              x_i < x_j, x_i > x_j, x_i = x_j
//   hard <i> <j> sep <s>               |x_i - x_j| > s
//   hard <i> <j> matrix                followed by |D_i| rows of |D_j| 0/1 bits
//   end
//
// print_instance emits this grammar canonically; parse_instance(print_instance(p)) == p.

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"

namespace cecdpop {

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split into tokens; nullopt at EOF.
  std::optional<std::vector<std::string>> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    return std::nullopt;
  }

  std::vector<std::string> expect() {
    auto tokens = next();
    if (!tokens) throw ParseError(line_no_ + 1, "unexpected end of input");
    return *tokens;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

inline long long to_int(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw ParseError(line, "not an integer: '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(line, "not an integer: '" + tok + "'");
  }
}

inline const char* relation_token(RelationKind kind) {
  switch (kind) {
    case RelationKind::LessThan: return "lt";
    case RelationKind::GreaterThan: return "gt";
    case RelationKind::Equal: return "eq";
    case RelationKind::MinSeparation: return "sep";
    case RelationKind::Explicit: return "matrix";
  }
  return "?";
}

}  // namespace detail

inline std::string print_instance(const DcopInstance& p) {
  std::ostringstream os;
  os << "dcop 1\n";
  os << "variables " << p.num_variables() << '\n';
  os << "agents " << p.num_agents() << '\n';
  for (std::size_t x = 0; x < p.num_variables(); ++x) {
    os << "domain " << x;
    for (auto v : p.domains()[x]) os << ' ' << v;
    os << '\n';
  }
  for (std::size_t x = 0; x < p.num_variables(); ++x) {
    os << "owner " << x << ' ' << p.owner()[x] << '\n';
  }
  for (const auto& s : p.soft_constraints()) {
    os << "soft " << s.first << ' ' << s.second << '\n';
    const auto cols = p.domain(s.second).size();
    for (std::size_t r = 0; r < p.domain(s.first).size(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        os << (c ? " " : "") << s.utilities[r * cols + c];
      }
      os << '\n';
    }
  }
  for (const auto& h : p.hard_constraints()) {
    os << "hard " << h.first << ' ' << h.second << ' ' << detail::relation_token(h.relation.kind);
    if (h.relation.kind == RelationKind::MinSeparation) os << ' ' << h.relation.separation;
    os << '\n';
    if (h.relation.kind == RelationKind::Explicit) {
      for (std::size_t r = 0; r < h.relation.bits.rows(); ++r) {
        for (std::size_t c = 0; c < h.relation.bits.cols(); ++c) {
          os << (c ? " " : "") << (h.relation.bits.get(r, c) ? 1 : 0);
        }
        os << '\n';
      }
    }
  }
  os << "end\n";
  return os.str();
}

inline DcopInstance parse_instance(std::istream& in) {
  detail::LineReader reader(in);
  using detail::to_int;

  auto header = reader.expect();
  if (header.size() != 2 || header[0] != "dcop" || header[1] != "1") {
    throw ParseError(reader.line(), "expected 'dcop 1' header");
  }
  auto count_line = [&](const char* key) {
    auto t = reader.expect();
    if (t.size() != 2 || t[0] != key) {
      throw ParseError(reader.line(), std::string("expected '") + key + " <count>'");
    }
    const auto v = to_int(t[1], reader.line());
    if (v < 0) throw ParseError(reader.line(), std::string(key) + " must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  const std::size_t n = count_line("variables");
  const std::size_t k = count_line("agents");

  std::vector<std::optional<std::vector<Value>>> domains(n);
  std::vector<std::optional<AgentId>> owners(n);
  std::vector<SoftConstraint> soft;
  std::vector<HardConstraint> hard;

  auto var_at = [&](const std::string& tok) {
    const auto v = to_int(tok, reader.line());
    if (v < 0 || static_cast<std::size_t>(v) >= n) {
      throw ParseError(reader.line(), "unknown variable " + tok);
    }
    return static_cast<VarId>(v);
  };
  auto domain_of = [&](VarId x) -> const std::vector<Value>& {
    if (!domains[static_cast<std::size_t>(x)]) {
      throw ParseError(reader.line(), "constraint on x" + std::to_string(x) + " before its domain");
    }
    return *domains[static_cast<std::size_t>(x)];
  };
  auto read_rows = [&](std::size_t rows, std::size_t cols) {
    std::vector<long long> cells;
    cells.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      auto t = reader.expect();
      if (t.size() != cols) {
        throw ParseError(reader.line(), "expected " + std::to_string(cols) + " entries, got " +
                                            std::to_string(t.size()));
      }
      for (const auto& tok : t) cells.push_back(to_int(tok, reader.line()));
    }
    return cells;
  };

  bool ended = false;
  while (auto tokens = reader.next()) {
    const auto& t = *tokens;
    const auto& key = t[0];
    if (key == "end") {
      if (t.size() != 1) throw ParseError(reader.line(), "trailing tokens after 'end'");
      ended = true;
      break;
    }
    if (key == "domain") {
      if (t.size() < 3) throw ParseError(reader.line(), "domain needs a variable and values");
      const auto x = var_at(t[1]);
      if (domains[static_cast<std::size_t>(x)]) throw ParseError(reader.line(), "duplicate domain");
      std::vector<Value> values;
      for (std::size_t i = 2; i < t.size(); ++i) {
        values.push_back(static_cast<Value>(to_int(t[i], reader.line())));
      }
      domains[static_cast<std::size_t>(x)] = std::move(values);
    } else if (key == "owner") {
      if (t.size() != 3) throw ParseError(reader.line(), "owner needs a variable and an agent");
      const auto x = var_at(t[1]);
      owners[static_cast<std::size_t>(x)] = static_cast<AgentId>(to_int(t[2], reader.line()));
    } else if (key == "soft") {
      if (t.size() != 3) throw ParseError(reader.line(), "soft needs two variables");
      SoftConstraint s{var_at(t[1]), var_at(t[2]), {}};
      const auto rows = domain_of(s.first).size();
      const auto cols = domain_of(s.second).size();
      for (auto c : read_rows(rows, cols)) s.utilities.push_back(static_cast<Utility>(c));
      soft.push_back(std::move(s));
    } else if (key == "hard") {
      if (t.size() < 4) throw ParseError(reader.line(), "hard needs two variables and a relation");
      HardConstraint h{var_at(t[1]), var_at(t[2]), {}};
      const auto& rel = t[3];
      const std::size_t expected = rel == "sep" ? 5 : 4;
      if (t.size() != expected) throw ParseError(reader.line(), "malformed hard constraint");
      if (rel == "lt") {
        h.relation = Relation::less_than();
      } else if (rel == "gt") {
        h.relation = Relation::greater_than();
      } else if (rel == "eq") {
        h.relation = Relation::equal();
      } else if (rel == "sep") {
        h.relation = Relation::min_separation(static_cast<int>(to_int(t[4], reader.line())));
      } else if (rel == "matrix") {
        const auto rows = domain_of(h.first).size();
        const auto cols = domain_of(h.second).size();
        const auto cells = read_rows(rows, cols);
        ConsistencyMatrix m(rows, cols);
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i] != 0 && cells[i] != 1) throw ParseError(reader.line(), "matrix entries must be 0 or 1");
          m.set(i / cols, i % cols, cells[i] == 1);
        }
        h.relation = Relation::explicit_matrix(std::move(m));
      } else {
        throw ParseError(reader.line(), "unknown relation '" + rel + "'");
      }
      hard.push_back(std::move(h));
    } else {
      throw ParseError(reader.line(), "unknown record '" + key + "'");
    }
  }
  if (!ended) throw ParseError(reader.line() + 1, "missing 'end'");

  std::vector<std::vector<Value>> doms;
  std::vector<AgentId> owner;
  bool any_owner = false;
  for (std::size_t x = 0; x < n; ++x) {
    if (!domains[x]) throw ParseError(reader.line(), "missing domain for x" + std::to_string(x));
    doms.push_back(*domains[x]);
    any_owner = any_owner || owners[x].has_value();
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (any_owner && !owners[x]) {
      throw ParseError(reader.line(), "missing owner for x" + std::to_string(x));
    }
    owner.push_back(any_owner ? *owners[x] : static_cast<AgentId>(x));
  }
  try {
    return DcopInstance(k, std::move(doms), std::move(owner), std::move(soft), std::move(hard));
  } catch (const InvalidInstance& e) {
    throw ParseError(reader.line(), e.what());
  }
}

inline DcopInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline DcopInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DcopError("cannot open " + path);
  return parse_instance(in);
}

inline void save_instance(const DcopInstance& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DcopError("cannot write " + path);
  out << print_instance(p);
}

}  // namespace cecdpop
