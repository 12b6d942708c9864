#include "h2kin/mechanism.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "h2kin/error.hpp"
#include "h2kin/thermo.hpp"

namespace h2kin {

int Reaction::molecularity() const {
  int order = third_body ? 1 : 0;
  for (const auto& t : reactants) order += t.nu;
  return order;
}

int Reaction::delta_nu() const {
  int d = 0;
  for (const auto& t : products) d += t.nu;
  for (const auto& t : reactants) d -= t.nu;
  return d;
}

Mechanism::Mechanism(std::string name, std::vector<Element> elements, std::vector<SpeciesDef> species,
                     std::vector<Reaction> reactions, std::string bath_gas)
    : name_(std::move(name)),
      elements_(std::move(elements)),
      species_(std::move(species)),
      reactions_(std::move(reactions)) {
  std::set<std::string> seen;
  for (const auto& e : elements_) {
    if (!seen.insert(e.symbol).second) throw MechanismError("duplicate element '" + e.symbol + "'");
    if (!(e.atomic_mass > 0.0)) throw MechanismError("element '" + e.symbol + "' has non-positive atomic mass");
  }
  seen.clear();
  for (const auto& s : species_) {
    if (!seen.insert(s.name).second) throw MechanismError("duplicate species '" + s.name + "'");
  }
  if (species_.empty()) throw MechanismError("mechanism has no species");
  if (reactions_.empty()) throw MechanismError("at least one reaction required");

  const int ns = n_species();
  const int ne = n_elements();
  molar_masses_.resize(ns);
  element_matrix_ = Eigen::MatrixXd::Zero(ne, ns);
  for (int k = 0; k < ns; ++k) {
    auto& s = species_[static_cast<std::size_t>(k)];
    double mass = 0.0;
    int atoms = 0;
    for (const auto& [symbol, count] : s.composition) {
      auto e = find_element(symbol);
      if (!e) throw MechanismError("species '" + s.name + "' uses undeclared element '" + symbol + "'");
      if (count < 0) throw MechanismError("species '" + s.name + "' has a negative atom count");
      mass += count * elements_[static_cast<std::size_t>(*e)].atomic_mass;
      element_matrix_(*e, k) = count;
      atoms += count;
    }
    if (atoms == 0) throw MechanismError("species '" + s.name + "' has an empty composition");
    s.molar_mass = mass * 1e-3;
    molar_masses_(k) = s.molar_mass;
  }

  auto bath = find_species(bath_gas);
  if (!bath) throw MechanismError("bath gas '" + bath_gas + "' is not a species");
  bath_ = *bath;

  efficiencies_.reserve(reactions_.size());
  for (const auto& r : reactions_) {
    for (const auto* side : {&r.reactants, &r.products}) {
      for (const auto& t : *side) {
        if (t.species < 0 || t.species >= ns)
          throw MechanismError("reaction '" + r.label + "' references an unknown species index");
        if (t.nu < 1) throw MechanismError("reaction '" + r.label + "' has a non-positive coefficient");
      }
    }
    Eigen::VectorXd eff = Eigen::VectorXd::Ones(ns);
    if (r.third_body) {
      for (const auto& [sp, value] : r.third_body->efficiencies) {
        if (auto k = find_species(sp)) eff(*k) = value;
      }
    }
    efficiencies_.push_back(std::move(eff));
  }
}

std::optional<int> Mechanism::find_species(std::string_view name) const {
  for (std::size_t k = 0; k < species_.size(); ++k)
    if (species_[k].name == name) return static_cast<int>(k);
  return std::nullopt;
}

int Mechanism::species_index(std::string_view name) const {
  if (auto k = find_species(name)) return *k;
  throw MechanismError("unknown species '" + std::string(name) + "'");
}

std::optional<int> Mechanism::find_element(std::string_view symbol) const {
  for (std::size_t e = 0; e < elements_.size(); ++e)
    if (elements_[e].symbol == symbol) return static_cast<int>(e);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Units

namespace {

constexpr double kCm3PerM3 = 1e-6;

double volume_factor(int molecularity) {
  // (cm^3/mol)^(order-1) -> (m^3/mol)^(order-1)
  double f = 1.0;
  for (int i = 1; i < molecularity; ++i) f *= kCm3PerM3;
  return f;
}

}  // namespace

ArrheniusParams arrhenius_from_cgs_kcal(double A, double n, double Ea_kcal, int molecularity) {
  return {A * volume_factor(molecularity), n, Ea_kcal * 1000.0 * kCalorie};
}

ArrheniusParams arrhenius_to_cgs_kcal(const ArrheniusParams& si, int molecularity) {
  return {si.A / volume_factor(molecularity), si.n, si.Ea / (1000.0 * kCalorie)};
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

struct Line {
  std::vector<Token> tokens;
  std::string_view raw;
  int number;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    std::size_t comment = raw.find_first_of("#!");
    std::string_view content = comment == std::string_view::npos ? raw : raw.substr(0, comment);
    auto tokens = tokenize(content);
    if (!tokens.empty()) lines.push_back({std::move(tokens), raw, number});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

[[noreturn]] void fail(const std::string& msg, const Line& line, int column) {
  throw ParseError(msg, line.number, column);
}

double parse_number(const Token& tok, const Line& line) {
  double value = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (!tok.text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    fail("expected a number, found '" + std::string(tok.text) + "'", line, tok.column);
  return value;
}

bool is_number(std::string_view s) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = first + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

int parse_int(std::string_view s, const Line& line, int column) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail("expected an integer, found '" + std::string(s) + "'", line, column);
  return value;
}

bool is_keyword(std::string_view t, std::string_view kw) {
  if (t.size() != kw.size()) return false;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(t[i])) != kw[i]) return false;
  return true;
}

struct PendingSpecies {
  SpeciesDef def;
  int line = 0;
};

struct SideTerm {
  std::string name;
  int nu;
  int column;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<SideTerm> parse_side(std::string_view side, int base_column, const Line& line) {
  std::vector<SideTerm> terms;
  std::size_t pos = 0;
  while (pos <= side.size()) {
    std::size_t plus = side.find('+', pos);
    std::size_t end = plus == std::string_view::npos ? side.size() : plus;
    std::string_view raw = side.substr(pos, end - pos);
    std::string_view term = trim(raw);
    std::size_t lead = std::min(raw.find_first_not_of(" \t"), raw.size());
    int column = base_column + static_cast<int>(pos + lead);
    if (term.empty()) fail("empty term in reaction equation", line, column);
    std::size_t digits = 0;
    while (digits < term.size() && std::isdigit(static_cast<unsigned char>(term[digits]))) ++digits;
    int nu = 1;
    if (digits > 0 && digits < term.size()) {
      nu = parse_int(term.substr(0, digits), line, column);
      term = trim(term.substr(digits));
    }
    if (nu < 1) fail("stoichiometric coefficient must be at least 1", line, column);
    terms.push_back({std::string(term), nu, column});
    if (plus == std::string_view::npos) break;
    pos = plus + 1;
  }
  return terms;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(split_lines(text)) {}

  Mechanism run() {
    while (i_ < lines_.size()) {
      const Line& line = lines_[i_];
      const Token& head = line.tokens.front();
      if (is_keyword(head.text, "MECHANISM")) {
        expect_count(line, 2);
        name_ = std::string(line.tokens[1].text);
        ++i_;
      } else if (is_keyword(head.text, "UNITS")) {
        expect_count(line, 2);
        if (is_keyword(line.tokens[1].text, "CGS_KCAL")) {
          si_units_ = false;
        } else if (is_keyword(line.tokens[1].text, "SI")) {
          si_units_ = true;
        } else {
          fail("unknown units '" + std::string(line.tokens[1].text) + "' (expected CGS_KCAL or SI)", line,
               line.tokens[1].column);
        }
        ++i_;
      } else if (is_keyword(head.text, "ELEMENTS")) {
        ++i_;
        parse_elements();
      } else if (is_keyword(head.text, "SPECIES")) {
        ++i_;
        parse_species();
      } else if (is_keyword(head.text, "BATH")) {
        expect_count(line, 2);
        bath_ = std::string(line.tokens[1].text);
        bath_line_ = line.number;
        ++i_;
      } else if (is_keyword(head.text, "REACTIONS")) {
        reactions_line_ = line.number;
        ++i_;
        parse_reactions();
      } else {
        fail("unexpected '" + std::string(head.text) + "' at top level", line, head.column);
      }
    }

    if (elements_.empty()) throw ParseError("missing ELEMENTS section", 0, 0);
    if (species_.empty()) throw ParseError("missing SPECIES section", 0, 0);
    if (reactions_.empty()) throw ParseError("at least one reaction required", reactions_line_, 1);
    if (bath_.empty()) bath_ = species_.back().name;
    bool bath_known = std::any_of(species_.begin(), species_.end(), [&](const SpeciesDef& s) { return s.name == bath_; });
    if (!bath_known) throw ParseError("bath gas '" + bath_ + "' is not a declared species", bath_line_, 1);

    try {
      return Mechanism(name_, std::move(elements_), std::move(species_), std::move(reactions_), bath_);
    } catch (const MechanismError& e) {
      throw ParseError(e.what(), 0, 0);
    }
  }

 private:
  static void expect_count(const Line& line, std::size_t n) {
    if (line.tokens.size() != n)
      fail("expected " + std::to_string(n - 1) + " argument(s) after '" + std::string(line.tokens[0].text) + "'",
           line, line.tokens[0].column);
  }

  bool at_end_keyword() {
    const Line& line = lines_[i_];
    if (is_keyword(line.tokens.front().text, "END")) {
      ++i_;
      return true;
    }
    return false;
  }

  void parse_elements() {
    while (true) {
      if (i_ >= lines_.size()) throw ParseError("unterminated ELEMENTS section", lines_.back().number, 1);
      if (at_end_keyword()) return;
      const Line& line = lines_[i_];
      expect_count(line, 2);
      std::string symbol(line.tokens[0].text);
      for (const auto& e : elements_)
        if (e.symbol == symbol) fail("duplicate element '" + symbol + "'", line, line.tokens[0].column);
      double mass = parse_number(line.tokens[1], line);
      if (!(mass > 0.0)) fail("atomic mass must be positive", line, line.tokens[1].column);
      elements_.push_back({symbol, mass});
      ++i_;
    }
  }

  std::array<double, 7> seven(const Line& line) {
    if (line.tokens.size() != 8) fail("expected 7 polynomial coefficients", line, line.tokens[0].column);
    std::array<double, 7> a{};
    for (int j = 0; j < 7; ++j) a[static_cast<std::size_t>(j)] = parse_number(line.tokens[static_cast<std::size_t>(j) + 1], line);
    return a;
  }

  void parse_species() {
    SpeciesDef* current = nullptr;
    NasaPoly poly;
    int have = 0;  // bitmask: 1 range, 2 low, 4 high
    auto finish = [&](const Line* at) {
      if (!current) return;
      if (have != 0) {
        if (have != 7)
          throw ParseError("species '" + current->name + "' has incomplete THERMO data (need THERMO, LOW and HIGH)",
                           at ? at->number : 0, 1);
        current->thermo = poly;
      }
      current = nullptr;
      have = 0;
      poly = NasaPoly{};
    };
    while (true) {
      if (i_ >= lines_.size()) throw ParseError("unterminated SPECIES section", lines_.back().number, 1);
      const Line& line = lines_[i_];
      const Token& head = line.tokens.front();
      if (is_keyword(head.text, "END")) {
        finish(&line);
        ++i_;
        return;
      }
      if (is_keyword(head.text, "THERMO")) {
        if (!current) fail("THERMO outside a species block", line, head.column);
        expect_count(line, 4);
        poly.T_low = parse_number(line.tokens[1], line);
        poly.T_mid = parse_number(line.tokens[2], line);
        poly.T_high = parse_number(line.tokens[3], line);
        if (!(poly.T_low < poly.T_mid && poly.T_mid < poly.T_high))
          fail("THERMO ranges must satisfy T_low < T_mid < T_high", line, line.tokens[1].column);
        have |= 1;
      } else if (is_keyword(head.text, "LOW")) {
        if (!current) fail("LOW outside a species block", line, head.column);
        poly.low = seven(line);
        have |= 2;
      } else if (is_keyword(head.text, "HIGH")) {
        if (!current) fail("HIGH outside a species block", line, head.column);
        poly.high = seven(line);
        have |= 4;
      } else if (is_keyword(head.text, "TRANSPORT")) {
        if (!current) fail("TRANSPORT outside a species block", line, head.column);
        expect_count(line, 4);
        LennardJones lj{parse_number(line.tokens[1], line), parse_number(line.tokens[2], line),
                        parse_number(line.tokens[3], line)};
        if (!(lj.sigma > 0.0) || !(lj.eps_over_k > 0.0) || lj.dipole < 0.0)
          fail("TRANSPORT requires sigma > 0, eps/k > 0, dipole >= 0", line, line.tokens[1].column);
        current->transport = lj;
      } else {
        finish(&line);
        std::string name(head.text);
        for (const auto& s : species_)
          if (s.name == name) fail("duplicate species '" + name + "'", line, head.column);
        if (is_keyword(name, "M")) fail("'M' is reserved for third bodies", line, head.column);
        SpeciesDef def;
        def.name = name;
        if (line.tokens.size() < 2) fail("species '" + name + "' needs a composition", line, head.column);
        for (std::size_t t = 1; t < line.tokens.size(); ++t) {
          const Token& tok = line.tokens[t];
          auto colon = tok.text.find(':');
          if (colon == std::string_view::npos) fail("composition entries are written Element:count", line, tok.column);
          std::string symbol(tok.text.substr(0, colon));
          bool declared = std::any_of(elements_.begin(), elements_.end(), [&](const Element& e) { return e.symbol == symbol; });
          if (!declared) fail("undeclared element '" + symbol + "'", line, tok.column);
          int count = parse_int(tok.text.substr(colon + 1), line, tok.column + static_cast<int>(colon) + 1);
          if (count < 0) fail("atom count must be non-negative", line, tok.column);
          def.composition[symbol] += count;
        }
        int atoms = 0;
        for (const auto& [sym, c] : def.composition) atoms += c;
        if (atoms == 0) fail("species '" + name + "' has an empty composition", line, head.column);
        species_.push_back(std::move(def));
        current = &species_.back();
      }
      ++i_;
    }
  }

  std::optional<int> species_id(const std::string& name) const {
    for (std::size_t k = 0; k < species_.size(); ++k)
      if (species_[k].name == name) return static_cast<int>(k);
    return std::nullopt;
  }

  void check_balance(const Reaction& r, const Line& line) {
    std::map<std::string, long> net;
    for (const auto& t : r.reactants)
      for (const auto& [sym, c] : species_[static_cast<std::size_t>(t.species)].composition) net[sym] -= static_cast<long>(c) * t.nu;
    for (const auto& t : r.products)
      for (const auto& [sym, c] : species_[static_cast<std::size_t>(t.species)].composition) net[sym] += static_cast<long>(c) * t.nu;
    for (const auto& [sym, v] : net)
      if (v != 0) fail("element imbalance in reaction '" + r.label + "': " + sym + " differs by " + std::to_string(v), line, 1);
  }

  void parse_reactions() {
    while (true) {
      if (i_ >= lines_.size()) throw ParseError("unterminated REACTIONS section", lines_.back().number, 1);
      const Line& line = lines_[i_];
      const Token& head = line.tokens.front();
      if (is_keyword(head.text, "END")) {
        ++i_;
        return;
      }
      if (is_keyword(head.text, "EFF")) {
        if (reactions_.empty()) fail("EFF before any reaction", line, head.column);
        Reaction& r = reactions_.back();
        if (!r.third_body) fail("EFF given for a reaction without '+M'", line, head.column);
        for (std::size_t t = 1; t < line.tokens.size(); ++t) {
          const Token& tok = line.tokens[t];
          auto colon = tok.text.find(':');
          if (colon == std::string_view::npos) fail("efficiencies are written species:value", line, tok.column);
          Token value{tok.text.substr(colon + 1), tok.column + static_cast<int>(colon) + 1};
          r.third_body->efficiencies.emplace_back(std::string(tok.text.substr(0, colon)), parse_number(value, line));
        }
        ++i_;
        continue;
      }
      if (is_keyword(head.text, "REV_FROM_EQ")) {
        if (reactions_.empty()) fail("REV_FROM_EQ before any reaction", line, head.column);
        reactions_.back().reversibility = Reversibility::FromEquilibrium;
        ++i_;
        continue;
      }
      reactions_.push_back(parse_reaction_line(line));
      ++i_;
    }
  }

  Reaction parse_reaction_line(const Line& line) {
    const auto& toks = line.tokens;
    Reaction r;
    std::size_t first = 0;
    if (toks[0].text.size() > 1 && toks[0].text.back() == ':') {
      r.label = std::string(toks[0].text.substr(0, toks[0].text.size() - 1));
      first = 1;
    } else {
      r.label = "R" + std::to_string(reactions_.size() + 1);
    }
    if (toks.size() < first + 4) fail("reaction needs an equation followed by A n Ea", line, toks[first].column);
    std::size_t nt = toks.size();
    for (std::size_t t = nt - 3; t < nt; ++t)
      if (!is_number(toks[t].text)) fail("expected A n Ea at the end of the reaction line", line, toks[t].column);
    double A = parse_number(toks[nt - 3], line);
    double n = parse_number(toks[nt - 2], line);
    double Ea = parse_number(toks[nt - 1], line);
    if (!(A > 0.0)) fail("pre-exponential factor must be positive", line, toks[nt - 3].column);

    int eq_begin = toks[first].column - 1;
    int eq_end = toks[nt - 4].column - 1 + static_cast<int>(toks[nt - 4].text.size());
    std::string_view eq = line.raw.substr(static_cast<std::size_t>(eq_begin), static_cast<std::size_t>(eq_end - eq_begin));
    std::size_t arrow = eq.find("<=>");
    std::size_t arrow_len = 3;
    if (arrow != std::string_view::npos) {
      r.reversibility = Reversibility::FromEquilibrium;
    } else {
      arrow = eq.find("=>");
      arrow_len = 2;
      if (arrow == std::string_view::npos) fail("reaction equation needs '=>' or '<=>'", line, eq_begin + 1);
    }
    auto lhs = parse_side(eq.substr(0, arrow), eq_begin + 1, line);
    auto rhs = parse_side(eq.substr(arrow + arrow_len), eq_begin + 1 + static_cast<int>(arrow + arrow_len), line);

    auto collect = [&](const std::vector<SideTerm>& side, std::vector<StoichTerm>& out, bool& has_m) {
      for (const auto& term : side) {
        if (term.name == "M") {
          if (term.nu != 1 || has_m) fail("third body 'M' must appear once per side", line, term.column);
          has_m = true;
          continue;
        }
        auto k = species_id(term.name);
        if (!k) fail("unknown species '" + term.name + "' in reaction", line, term.column);
        auto it = std::find_if(out.begin(), out.end(), [&](const StoichTerm& s) { return s.species == *k; });
        if (it == out.end()) {
          out.push_back({*k, term.nu});
        } else {
          it->nu += term.nu;
        }
      }
    };
    bool m_left = false;
    bool m_right = false;
    collect(lhs, r.reactants, m_left);
    collect(rhs, r.products, m_right);
    if (m_left != m_right) fail("'+M' must appear on both sides", line, eq_begin + 1);
    if (r.reactants.empty() || r.products.empty()) fail("reaction needs reactants and products", line, eq_begin + 1);
    if (m_left) r.third_body = ThirdBody{};

    if (si_units_) {
      r.rate = {A, n, Ea};
    } else {
      r.rate = arrhenius_from_cgs_kcal(A, n, Ea, r.molecularity());
    }
    check_balance(r, line);
    return r;
  }

  std::vector<Line> lines_;
  std::size_t i_ = 0;
  std::string name_ = "unnamed";
  bool si_units_ = false;
  std::vector<Element> elements_;
  std::vector<SpeciesDef> species_;
  std::vector<Reaction> reactions_;
  std::string bath_;
  int bath_line_ = 0;
  int reactions_line_ = 0;
};

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Mechanism parse_mechanism(std::string_view text) { return Parser(text).run(); }

Mechanism load_mechanism(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mechanism file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mechanism(buf.str());
}

const Mechanism& builtin_skeletal() {
  static const Mechanism m = parse_mechanism(builtin_skeletal_text());
  return m;
}

Mechanism resolve_mechanism(const std::string& name_or_path) {
  if (name_or_path == "skeletal" || name_or_path == "builtin:skeletal") return builtin_skeletal();
  return load_mechanism(name_or_path);
}

std::string equation_string(const Mechanism& m, const Reaction& r) {
  auto side = [&](const std::vector<StoichTerm>& terms) {
    std::string s;
    for (const auto& t : terms) {
      for (int c = 0; c < t.nu; ++c) {
        if (!s.empty()) s += " + ";
        s += m.species(t.species).name;
      }
    }
    if (r.third_body) s += " + M";
    return s;
  };
  return side(r.reactants) + (r.reversible() ? " <=> " : " => ") + side(r.products);
}

std::string serialize(const Mechanism& m) {
  std::ostringstream out;
  out << "MECHANISM " << m.name() << "\n";
  out << "UNITS SI\n\n";
  out << "ELEMENTS\n";
  for (const auto& e : m.elements()) out << "  " << e.symbol << " " << fmt_double(e.atomic_mass) << "\n";
  out << "END\n\nSPECIES\n";
  for (const auto& s : m.species()) {
    out << "  " << s.name;
    for (const auto& [sym, c] : s.composition) out << " " << sym << ":" << c;
    out << "\n";
    if (s.thermo) {
      const auto& p = *s.thermo;
      out << "    THERMO " << fmt_double(p.T_low) << " " << fmt_double(p.T_mid) << " " << fmt_double(p.T_high) << "\n";
      out << "    LOW";
      for (double a : p.low) out << " " << fmt_double(a);
      out << "\n    HIGH";
      for (double a : p.high) out << " " << fmt_double(a);
      out << "\n";
    }
    if (s.transport) {
      const auto& lj = *s.transport;
      out << "    TRANSPORT " << fmt_double(lj.sigma) << " " << fmt_double(lj.eps_over_k) << " " << fmt_double(lj.dipole)
          << "\n";
    }
  }
  out << "END\n\nBATH " << m.bath_gas() << "\n\nREACTIONS\n";
  for (const auto& r : m.reactions()) {
    out << "  " << r.label << ": " << equation_string(m, r) << "  " << fmt_double(r.rate.A) << " "
        << fmt_double(r.rate.n) << " " << fmt_double(r.rate.Ea) << "\n";
    if (r.third_body && !r.third_body->efficiencies.empty()) {
      out << "    EFF";
      for (const auto& [sp, v] : r.third_body->efficiencies) out << " " << sp << ":" << fmt_double(v);
      out << "\n";
    }
    if (r.reversible()) out << "    REV_FROM_EQ\n";
  }
  out << "END\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(), [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

namespace {

std::string canonical_side(const std::vector<StoichTerm>& terms) {
  std::vector<std::pair<int, int>> v;
  for (const auto& t : terms) v.emplace_back(t.species, t.nu);
  std::sort(v.begin(), v.end());
  std::string s;
  for (const auto& [k, nu] : v) s += std::to_string(k) + "x" + std::to_string(nu) + ";";
  return s;
}

}  // namespace

ValidationReport validate_mechanism(const Mechanism& m) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  auto add = [&](Kind kind, Severity sev, std::string msg) { report.issues.push_back({kind, sev, std::move(msg)}); };

  for (const auto& s : m.species()) {
    if (!s.thermo) {
      add(Kind::MissingThermo, Severity::Error, "species '" + s.name + "' has no thermo data");
    } else {
      const auto& p = *s.thermo;
      if (!(p.T_low < p.T_mid && p.T_mid < p.T_high)) {
        add(Kind::InvalidThermoRange, Severity::Error, "species '" + s.name + "' has an invalid temperature range");
      } else {
        double lo = nasa_cp_R(p.low, p.T_mid);
        double hi = nasa_cp_R(p.high, p.T_mid);
        if (std::abs(lo - hi) > 1e-4 * std::abs(hi))
          add(Kind::InvalidThermoRange, Severity::Error, "species '" + s.name + "' cp/R is discontinuous at T_mid");
      }
    }
    if (!s.transport) add(Kind::MissingTransport, Severity::Warning, "species '" + s.name + "' has no transport data");
  }

  const Eigen::MatrixXd& E = m.element_matrix();
  std::map<std::string, int> seen;
  for (int r = 0; r < m.n_reactions(); ++r) {
    const Reaction& rx = m.reaction(r);
    Eigen::VectorXd net = Eigen::VectorXd::Zero(m.n_elements());
    for (const auto& t : rx.products) net += t.nu * E.col(t.species);
    for (const auto& t : rx.reactants) net -= t.nu * E.col(t.species);
    for (int e = 0; e < m.n_elements(); ++e) {
      if (net(e) != 0.0)
        add(Kind::ElementImbalance, Severity::Error,
            "reaction '" + rx.label + "' does not balance element " + m.elements()[static_cast<std::size_t>(e)].symbol);
    }
    if (!(rx.rate.A > 0.0) || !std::isfinite(rx.rate.A) || !std::isfinite(rx.rate.n) || !std::isfinite(rx.rate.Ea))
      add(Kind::InvalidRate, Severity::Error, "reaction '" + rx.label + "' has invalid Arrhenius parameters");
    if (rx.third_body) {
      for (const auto& [sp, v] : rx.third_body->efficiencies) {
        if (!m.find_species(sp))
          add(Kind::UnknownEfficiencySpecies, Severity::Error,
              "reaction '" + rx.label + "' gives an efficiency for unknown species '" + sp + "'");
        if (v < 0.0)
          add(Kind::NegativeEfficiency, Severity::Error, "reaction '" + rx.label + "' has a negative efficiency for '" + sp + "'");
      }
    }
    std::string key = canonical_side(rx.reactants) + (rx.third_body ? "M" : "") + ">" + canonical_side(rx.products);
    if (auto it = seen.find(key); it != seen.end()) {
      add(Kind::DuplicateReaction, Severity::Warning,
          "reaction '" + rx.label + "' duplicates '" + m.reaction(it->second).label + "' (rates are summed)");
    } else {
      seen.emplace(key, r);
    }
  }
  return report;
}

}  // namespace h2kin
