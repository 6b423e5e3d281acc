#include "sucil/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "sucil/solver.hpp"

namespace sucil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_num(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void add_term(LpRow& row, std::int32_t var, double coef) {
  if (coef == 0.0) return;
  row.terms.push_back({var, coef});
}

}  // namespace

// ---------------------------------------------------------------------------
// LpModel basics
// ---------------------------------------------------------------------------

std::int32_t LpModel::add_var(const std::string& name, VarKind kind, double lo,
                              double hi) {
  const auto id = static_cast<std::int32_t>(vars.size());
  vars.push_back({name, kind, lo, hi});
  index.emplace(name, id);
  return id;
}

std::int32_t LpModel::var(const std::string& name) const {
  const auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// LP writer
// ---------------------------------------------------------------------------

std::string write_lp(const LpModel& model) {
  // Section ordering of variables follows first textual appearance
  // (objective, then rows, then never-referenced variables in id order), so
  // that parsing and re-writing reproduces the file byte for byte.
  std::vector<std::int32_t> rank(model.vars.size(), -1);
  std::int32_t next = 0;
  auto touch = [&](std::int32_t v) {
    if (rank[static_cast<std::size_t>(v)] < 0) {
      rank[static_cast<std::size_t>(v)] = next++;
    }
  };
  for (const LpTerm& t : model.objective) touch(t.var);
  for (const LpRow& r : model.rows) {
    for (const LpTerm& t : r.terms) touch(t.var);
  }
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    touch(static_cast<std::int32_t>(v));
  }
  std::vector<std::int32_t> order(model.vars.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
  });

  std::string out;
  out.reserve(1 << 16);
  auto emit_terms = [&](const std::vector<LpTerm>& terms) {
    for (const LpTerm& t : terms) {
      out += t.coef < 0 ? " - " : " + ";
      out += fmt_num(std::abs(t.coef));
      out += " ";
      out += model.vars[static_cast<std::size_t>(t.var)].name;
    }
  };

  out += "Minimize\n obj:";
  emit_terms(model.objective);
  out += "\nSubject To\n";
  for (const LpRow& r : model.rows) {
    out += " " + r.name + ":";
    emit_terms(r.terms);
    switch (r.sense) {
      case RowSense::LE: out += " <= "; break;
      case RowSense::GE: out += " >= "; break;
      case RowSense::EQ: out += " = "; break;
    }
    out += fmt_num(r.rhs);
    out += "\n";
  }
  out += "Bounds\n";
  for (const std::int32_t v : order) {
    const LpVar& var = model.vars[static_cast<std::size_t>(v)];
    if (var.kind == VarKind::Binary) continue;
    const bool lo_inf = std::isinf(var.lo) && var.lo < 0;
    const bool hi_inf = std::isinf(var.hi) && var.hi > 0;
    if (lo_inf && hi_inf) {
      out += " " + var.name + " free\n";
    } else if (hi_inf) {
      out += " " + fmt_num(var.lo) + " <= " + var.name + "\n";
    } else if (lo_inf) {
      out += " " + var.name + " <= " + fmt_num(var.hi) + "\n";
    } else {
      out += " " + fmt_num(var.lo) + " <= " + var.name + " <= " +
             fmt_num(var.hi) + "\n";
    }
  }
  bool any_general = false;
  for (const std::int32_t v : order) {
    if (model.vars[static_cast<std::size_t>(v)].kind == VarKind::Integer) {
      if (!any_general) {
        out += "Generals\n";
        any_general = true;
      }
      out += " " + model.vars[static_cast<std::size_t>(v)].name + "\n";
    }
  }
  bool any_binary = false;
  for (const std::int32_t v : order) {
    if (model.vars[static_cast<std::size_t>(v)].kind == VarKind::Binary) {
      if (!any_binary) {
        out += "Binaries\n";
        any_binary = true;
      }
      out += " " + model.vars[static_cast<std::size_t>(v)].name + "\n";
    }
  }
  out += "End\n";
  return out;
}

// ---------------------------------------------------------------------------
// LP parser
// ---------------------------------------------------------------------------

namespace {

bool parse_number(const std::string& tok, double& out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

[[noreturn]] void parse_fail(int line_no, const std::string& why) {
  throw IoFailureError("LP parse error at line " + std::to_string(line_no) +
                       ": " + why);
}

}  // namespace

LpModel parse_lp(const std::string& text) {
  enum class Section { None, Objective, Rows, Bounds, Generals, Binaries, End };
  LpModel model;
  Section section = Section::None;
  int line_no = 0;

  auto intern = [&](const std::string& name) {
    std::int32_t v = model.var(name);
    if (v < 0) v = model.add_var(name, VarKind::Continuous, 0.0, kInf);
    return v;
  };

  // Parse "name: terms [sense rhs]" where terms are sign/coefficient/name
  // triplets.
  auto parse_terms = [&](const std::vector<std::string>& toks, std::size_t i,
                         std::vector<LpTerm>& terms, RowSense* sense,
                         double* rhs) {
    while (i < toks.size()) {
      if (toks[i] == "<=" || toks[i] == ">=" || toks[i] == "=") {
        if (!sense) parse_fail(line_no, "unexpected relation in objective");
        *sense = toks[i] == "<=" ? RowSense::LE
                                 : (toks[i] == ">=" ? RowSense::GE
                                                    : RowSense::EQ);
        if (i + 1 != toks.size() - 1) parse_fail(line_no, "malformed right side");
        if (!parse_number(toks[i + 1], *rhs)) {
          parse_fail(line_no, "bad right-hand value '" + toks[i + 1] + "'");
        }
        return true;
      }
      if (i + 2 >= toks.size()) parse_fail(line_no, "truncated term");
      const std::string& sign = toks[i];
      if (sign != "+" && sign != "-") {
        parse_fail(line_no, "expected sign, got '" + sign + "'");
      }
      double mag = 0.0;
      if (!parse_number(toks[i + 1], mag)) {
        parse_fail(line_no, "bad coefficient '" + toks[i + 1] + "'");
      }
      terms.push_back({intern(toks[i + 2]), sign == "-" ? -mag : mag});
      i += 3;
    }
    if (sense) parse_fail(line_no, "constraint without relation");
    return false;
  };

  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    if (line.empty() || line[0] == '\\') continue;

    if (line == "Minimize") { section = Section::Objective; continue; }
    if (line == "Subject To") { section = Section::Rows; continue; }
    if (line == "Bounds") { section = Section::Bounds; continue; }
    if (line == "Generals") { section = Section::Generals; continue; }
    if (line == "Binaries") { section = Section::Binaries; continue; }
    if (line == "End") { section = Section::End; continue; }

    const std::vector<std::string> toks = split_ws(line);
    switch (section) {
      case Section::Objective: {
        if (toks.empty() || toks[0].back() != ':') {
          parse_fail(line_no, "objective line must start with a label");
        }
        parse_terms(toks, 1, model.objective, nullptr, nullptr);
        break;
      }
      case Section::Rows: {
        if (toks.empty() || toks[0].back() != ':') {
          parse_fail(line_no, "constraint line must start with 'name:'");
        }
        LpRow row;
        row.name = toks[0].substr(0, toks[0].size() - 1);
        parse_terms(toks, 1, row.terms, &row.sense, &row.rhs);
        model.rows.push_back(std::move(row));
        break;
      }
      case Section::Bounds: {
        double lo = 0.0, hi = 0.0;
        if (toks.size() == 2 && toks[1] == "free") {
          const std::int32_t v = intern(toks[0]);
          model.vars[static_cast<std::size_t>(v)].lo = -kInf;
          model.vars[static_cast<std::size_t>(v)].hi = kInf;
        } else if (toks.size() == 3 && toks[1] == "<=" &&
                   parse_number(toks[0], lo)) {
          const std::int32_t v = intern(toks[2]);
          model.vars[static_cast<std::size_t>(v)].lo = lo;
          model.vars[static_cast<std::size_t>(v)].hi = kInf;
        } else if (toks.size() == 3 && toks[1] == "<=" &&
                   parse_number(toks[2], hi)) {
          const std::int32_t v = intern(toks[0]);
          model.vars[static_cast<std::size_t>(v)].lo = -kInf;
          model.vars[static_cast<std::size_t>(v)].hi = hi;
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=" &&
                   parse_number(toks[0], lo) && parse_number(toks[4], hi)) {
          const std::int32_t v = intern(toks[2]);
          model.vars[static_cast<std::size_t>(v)].lo = lo;
          model.vars[static_cast<std::size_t>(v)].hi = hi;
        } else {
          parse_fail(line_no, "unrecognized bound line");
        }
        break;
      }
      case Section::Generals: {
        if (toks.size() != 1) parse_fail(line_no, "one name per line expected");
        model.vars[static_cast<std::size_t>(intern(toks[0]))].kind =
            VarKind::Integer;
        break;
      }
      case Section::Binaries: {
        if (toks.size() != 1) parse_fail(line_no, "one name per line expected");
        LpVar& v = model.vars[static_cast<std::size_t>(intern(toks[0]))];
        v.kind = VarKind::Binary;
        v.lo = 0.0;
        v.hi = 1.0;
        break;
      }
      case Section::None:
      case Section::End:
        parse_fail(line_no, "content outside of any section");
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Assignment validation
// ---------------------------------------------------------------------------

ValidationReport validate_assignment(
    const LpModel& model,
    const std::unordered_map<std::string, double>& assignment, double tol) {
  std::vector<double> values(model.vars.size(), 0.0);
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const auto it = assignment.find(model.vars[v].name);
    if (it == assignment.end()) {
      throw IncompleteAssignmentError("assignment misses variable '" +
                                      model.vars[v].name + "'");
    }
    values[v] = it->second;
  }
  ValidationReport rep;
  auto flag = [&](const std::string& row, double lhs, double rhs, char sense,
                  double amount) {
    rep.feasible = false;
    rep.violations.push_back({row, lhs, rhs, sense, amount});
  };
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const LpVar& var = model.vars[v];
    if (values[v] < var.lo - tol) {
      flag("bound(" + var.name + ")", values[v], var.lo, '>', var.lo - values[v]);
    }
    if (values[v] > var.hi + tol) {
      flag("bound(" + var.name + ")", values[v], var.hi, '<', values[v] - var.hi);
    }
    if (var.kind != VarKind::Continuous) {
      const double r = std::abs(values[v] - std::round(values[v]));
      if (r > tol) {
        flag("integrality(" + var.name + ")", values[v], std::round(values[v]),
             '=', r);
      }
    }
  }
  for (const LpRow& row : model.rows) {
    double lhs = 0.0;
    for (const LpTerm& t : row.terms) {
      lhs += t.coef * values[static_cast<std::size_t>(t.var)];
    }
    switch (row.sense) {
      case RowSense::LE:
        if (lhs > row.rhs + tol) flag(row.name, lhs, row.rhs, '<', lhs - row.rhs);
        break;
      case RowSense::GE:
        if (lhs < row.rhs - tol) flag(row.name, lhs, row.rhs, '>', row.rhs - lhs);
        break;
      case RowSense::EQ:
        if (std::abs(lhs - row.rhs) > tol) {
          flag(row.name, lhs, row.rhs, '=', std::abs(lhs - row.rhs));
        }
        break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Integer facets and constants
// ---------------------------------------------------------------------------

namespace {

// Best rational approximation by continued fractions.
void to_fraction(double v, double tol, std::int64_t& num, std::int64_t& den) {
  constexpr std::int64_t kMaxDen = 1'000'000'000;
  std::int64_t p0 = 1, q0 = 0;  // h_{-1}, k_{-1}
  std::int64_t p1 = 0, q1 = 1;  // value 0/1 as previous convergent
  double x = v;
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(x);
    if (std::abs(fa) > static_cast<double>(kMaxDen)) break;
    const auto a = static_cast<std::int64_t>(fa);
    const std::int64_t p2 = a * p0 + p1;
    const std::int64_t q2 = a * q0 + q1;
    if (q2 > kMaxDen || q2 < 0) break;
    p1 = p0; q1 = q0;
    p0 = p2; q0 = q2;
    if (q0 != 0 &&
        std::abs(v - static_cast<double>(p0) / static_cast<double>(q0)) <=
            tol * std::max(1.0, std::abs(v))) {
      num = p0;
      den = q0;
      return;
    }
    const double frac = x - fa;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  num = p0;
  den = q0 == 0 ? 1 : q0;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(a, b);
  const std::int64_t step = a / g;
  if (step != 0 && b > (std::int64_t{1} << 40) / std::abs(step)) {
    throw Error("facet denominator blow-up during rationalization");
  }
  return step * b;
}

}  // namespace

IntegerFacet rationalize_facet(const Affine& facet,
                               const std::vector<Point>& points, int anchor,
                               double tol) {
  const int n = static_cast<int>(facet.c.size());
  std::vector<std::int64_t> num(static_cast<std::size_t>(n) + 1);
  std::vector<std::int64_t> den(static_cast<std::size_t>(n) + 1);
  for (int h = 0; h < n; ++h) {
    to_fraction(facet.c[static_cast<std::size_t>(h)], tol,
                num[static_cast<std::size_t>(h)],
                den[static_cast<std::size_t>(h)]);
  }
  to_fraction(facet.b, tol, num[static_cast<std::size_t>(n)],
              den[static_cast<std::size_t>(n)]);

  std::int64_t L = 1;
  for (int h = 0; h <= n; ++h) {
    L = checked_lcm(L, std::abs(den[static_cast<std::size_t>(h)]));
  }
  IntegerFacet out;
  out.c.resize(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) {
    out.c[static_cast<std::size_t>(h)] =
        num[static_cast<std::size_t>(h)] * (L / den[static_cast<std::size_t>(h)]);
  }
  out.b = num[static_cast<std::size_t>(n)] * (L / den[static_cast<std::size_t>(n)]);

  std::int64_t g = std::abs(out.b);
  for (const std::int64_t c : out.c) g = std::gcd(g, std::abs(c));
  if (g > 1) {
    for (std::int64_t& c : out.c) c /= g;
    out.b /= g;
  }

  auto value_at = [&](const Point& p) {
    std::int64_t s = out.b;
    for (int h = 0; h < n; ++h) {
      s += out.c[static_cast<std::size_t>(h)] * p[static_cast<std::size_t>(h)];
    }
    return s;
  };
  std::int64_t at_anchor = value_at(points[static_cast<std::size_t>(anchor)]);
  if (at_anchor < 0) {
    for (std::int64_t& c : out.c) c = -c;
    out.b = -out.b;
    at_anchor = -at_anchor;
  }
  if (at_anchor == 0) {
    throw Error("integer facet vanishes at its own anchor");
  }
  for (std::size_t l = 0; l < points.size(); ++l) {
    if (static_cast<int>(l) == anchor) continue;
    if (value_at(points[l]) != 0) {
      throw Error("integer facet fails exact verification at a defining point");
    }
  }
  out.anchor_value = at_anchor;
  return out;
}

double derive_M_cut(const Secant& cut, const Box& box, double l_f) {
  double mx = cut.b;
  for (int h = 0; h < box.dim(); ++h) {
    const double c = cut.c[static_cast<std::size_t>(h)];
    mx += c >= 0 ? c * box.hi[static_cast<std::size_t>(h)]
                 : c * box.lo[static_cast<std::size_t>(h)];
  }
  return mx - l_f;
}

void derive_M_eta(ConstantBundle& bundle, const std::vector<Secant>& cuts,
                  const Box& box, double l_f) {
  bundle.l_f = l_f;
  bundle.M_per_cut.clear();
  bundle.M_eta = 0.0;
  for (const Secant& cut : cuts) {
    const double m = derive_M_cut(cut, box, l_f);
    bundle.M_per_cut.push_back(m);
    bundle.M_eta = std::max(bundle.M_eta, m);
  }
}

double derive_eps_lambda(const std::vector<IntegerFacet>& facets) {
  double eps = kInf;
  for (const IntegerFacet& f : facets) {
    double n2 = 0.0;
    for (const std::int64_t c : f.c) {
      n2 += static_cast<double>(c) * static_cast<double>(c);
    }
    if (n2 == 0.0) {
      throw ZeroNormalError("facet has a zero normal vector");
    }
    eps = std::min(eps, 1.0 / std::sqrt(n2));
  }
  return eps;
}

double derive_M_lambda(const std::vector<IntegerFacet>& facets,
                       const Box& box) {
  double best = 0.0;
  for (const IntegerFacet& f : facets) {
    double n2 = 0.0;
    for (const std::int64_t c : f.c) {
      n2 += static_cast<double>(c) * static_cast<double>(c);
    }
    if (n2 == 0.0) {
      throw ZeroNormalError("facet has a zero normal vector");
    }
    double hi = static_cast<double>(f.b);
    double lo = static_cast<double>(f.b);
    for (int h = 0; h < box.dim(); ++h) {
      const double c = static_cast<double>(f.c[static_cast<std::size_t>(h)]);
      hi += c >= 0 ? c * box.hi[static_cast<std::size_t>(h)]
                   : c * box.lo[static_cast<std::size_t>(h)];
      lo += c >= 0 ? c * box.lo[static_cast<std::size_t>(h)]
                   : c * box.hi[static_cast<std::size_t>(h)];
    }
    best = std::max(best, std::max(std::abs(hi), std::abs(lo)) / std::sqrt(n2));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Model assembly
// ---------------------------------------------------------------------------

std::int64_t CpfModel::expected_binaries() const {
  const std::int64_t per_cut = (n + 1) + std::int64_t{n} * (n + 1);
  std::int64_t count = static_cast<std::int64_t>(cuts.size()) * per_cut;
  if (with_no_good) {
    for (int h = 0; h < n; ++h) {
      count += box.hi[static_cast<std::size_t>(h)] -
               box.lo[static_cast<std::size_t>(h)] + 1;
    }
  }
  return count;
}

std::int64_t CpfModel::expected_continuous() const {
  return 1 + static_cast<std::int64_t>(cuts.size()) * n * (n + 1);
}

std::int64_t CpfModel::expected_integers() const { return n; }

std::int64_t CpfModel::expected_rows() const {
  const std::int64_t per_cut =
      2 + 3 * std::int64_t{n} * (n + 1) + 2 * (std::int64_t{n} + 1);
  std::int64_t count = static_cast<std::int64_t>(cuts.size()) * per_cut;
  if (with_no_good) {
    count += 2 * std::int64_t{n} + static_cast<std::int64_t>(evaluated.size());
  }
  return count;
}

CpfModel build_cpf(const std::vector<std::pair<Point, double>>& evaluated,
                   const Domain& dom, const CpfOptions& opts) {
  const int n = dom.dim();
  const int m = n + 1;
  if (static_cast<int>(evaluated.size()) < m) {
    throw NoPoisedSubsetError("need at least n+1 evaluated points, got " +
                              std::to_string(evaluated.size()));
  }
  CpfModel model;
  model.n = n;
  model.box = dom.box;
  model.evaluated = evaluated;
  model.with_no_good = opts.with_no_good;

  std::vector<std::int32_t> source(evaluated.size());
  std::iota(source.begin(), source.end(), 0);
  enumerate_cuts(evaluated, source,
                 [&](std::span<const std::int32_t> ids, const PoisedSet& ps,
                     const Secant& sec, const ConeComplex& cc) {
                   CpfCut cut;
                   cut.ids.assign(ids.begin(), ids.end());
                   cut.points = ps.points;
                   cut.model = sec;
                   cut.facets = cc.facets;
                   for (int j = 0; j < m; ++j) {
                     cut.int_facets.push_back(
                         rationalize_facet(cc.facets[static_cast<std::size_t>(j)],
                                           ps.points, j));
                   }
                   model.cuts.push_back(std::move(cut));
                 });
  if (model.cuts.empty()) {
    throw NoPoisedSubsetError(
        "no poised subset among the evaluated points; cannot build a model");
  }

  // ---- constants ----------------------------------------------------------
  double min_f = kInf, max_f = -kInf;
  for (const auto& [p, f] : evaluated) {
    min_f = std::min(min_f, f);
    max_f = std::max(max_f, f);
  }
  double l_f;
  if (opts.l_f) {
    l_f = *opts.l_f;
  } else {
    double span = 0.0;
    for (int h = 0; h < n; ++h) {
      span = std::max(span, static_cast<double>(dom.box.hi[h] - dom.box.lo[h]));
    }
    double max_c1 = 0.0;
    for (const CpfCut& cut : model.cuts) {
      double c1 = 0.0;
      for (const double c : cut.model.c) c1 += std::abs(c);
      max_c1 = std::max(max_c1, c1);
    }
    l_f = min_f - span * max_c1;
  }
  std::vector<Secant> secants;
  for (const CpfCut& cut : model.cuts) secants.push_back(cut.model);
  derive_M_eta(model.constants, secants, dom.box, l_f);

  std::vector<IntegerFacet> all_facets;
  for (const CpfCut& cut : model.cuts) {
    all_facets.insert(all_facets.end(), cut.int_facets.begin(),
                      cut.int_facets.end());
  }
  model.constants.eps_lambda = derive_eps_lambda(all_facets);
  model.constants.M_lambda = derive_M_lambda(all_facets, dom.box);

  double model_eps = kInf;
  double lam_max = 0.0;
  for (const IntegerFacet& f : all_facets) {
    model_eps =
        std::min(model_eps, 1.0 / static_cast<double>(f.anchor_value));
    double hi = static_cast<double>(f.b);
    double lo = static_cast<double>(f.b);
    for (int h = 0; h < n; ++h) {
      const double c = static_cast<double>(f.c[static_cast<std::size_t>(h)]);
      hi += c >= 0 ? c * dom.box.hi[static_cast<std::size_t>(h)]
                   : c * dom.box.lo[static_cast<std::size_t>(h)];
      lo += c >= 0 ? c * dom.box.lo[static_cast<std::size_t>(h)]
                   : c * dom.box.hi[static_cast<std::size_t>(h)];
    }
    lam_max = std::max(lam_max, std::max(std::abs(hi), std::abs(lo)) /
                                    static_cast<double>(f.anchor_value));
  }
  model.constants.model_eps_lambda =
      opts.force_eps_lambda ? *opts.force_eps_lambda : model_eps;
  model.constants.model_M_lambda = lam_max + model_eps;
  model.constants.provenance =
      opts.force_eps_lambda
          ? "separation threshold forced by caller; other constants closed-form"
          : "closed-form box maxima; integer facets via continued-fraction "
            "rationalization";

  for (std::size_t i = 0; i < model.cuts.size(); ++i) {
    model.cuts[i].M = opts.shared_M_eta ? model.constants.M_eta
                                        : model.constants.M_per_cut[i];
  }

  // ---- variables and rows -------------------------------------------------
  LpModel& lp = model.lp;
  const std::int32_t v_eta = lp.add_var("eta", VarKind::Continuous, l_f, kInf);
  std::vector<std::int32_t> v_x(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) {
    v_x[static_cast<std::size_t>(h)] =
        lp.add_var("x_" + std::to_string(h), VarKind::Integer,
                   dom.box.lo[static_cast<std::size_t>(h)],
                   dom.box.hi[static_cast<std::size_t>(h)]);
  }
  const double Ml = model.constants.model_M_lambda;
  const double eps = model.constants.model_eps_lambda;

  for (std::size_t i = 0; i < model.cuts.size(); ++i) {
    const CpfCut& cut = model.cuts[i];
    const std::string ci = std::to_string(i);
    std::vector<std::int32_t> v_z(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      v_z[static_cast<std::size_t>(j)] =
          lp.add_var("z_" + ci + "_" + std::to_string(j), VarKind::Binary, 0, 1);
    }
    // lambda before w: matches first textual appearance in the rows.
    std::vector<std::int32_t> v_lam(static_cast<std::size_t>(m) * m, -1);
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l < m; ++l) {
        if (l == j) continue;
        v_lam[static_cast<std::size_t>(j) * m + l] = lp.add_var(
            "lam_" + ci + "_" + std::to_string(j) + "_" + std::to_string(l),
            VarKind::Continuous, -Ml, Ml);
      }
    }
    std::vector<std::int32_t> v_w(static_cast<std::size_t>(m) * m, -1);
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l < m; ++l) {
        if (l == j) continue;
        v_w[static_cast<std::size_t>(j) * m + l] = lp.add_var(
            "w_" + ci + "_" + std::to_string(j) + "_" + std::to_string(l),
            VarKind::Binary, 0, 1);
      }
    }

    // Cut activation: eta >= c^T x + b - M (1 - sum z).
    {
      LpRow row;
      row.name = "cut" + ci + "_eta";
      add_term(row, v_eta, 1.0);
      for (int h = 0; h < n; ++h) {
        add_term(row, v_x[static_cast<std::size_t>(h)],
                 -cut.model.c[static_cast<std::size_t>(h)]);
      }
      for (int j = 0; j < m; ++j) {
        add_term(row, v_z[static_cast<std::size_t>(j)], -cut.M);
      }
      row.sense = RowSense::GE;
      row.rhs = cut.model.b - cut.M;
      lp.rows.push_back(std::move(row));
    }
    // At most one cone selected.
    {
      LpRow row;
      row.name = "cut" + ci + "_onecone";
      for (int j = 0; j < m; ++j) {
        add_term(row, v_z[static_cast<std::size_t>(j)], 1.0);
      }
      row.sense = RowSense::LE;
      row.rhs = 1.0;
      lp.rows.push_back(std::move(row));
    }
    // Cone coordinates: x = anchor_j + sum_l lam_l (anchor_j - point_l).
    for (int j = 0; j < m; ++j) {
      const Point& xj = cut.points[static_cast<std::size_t>(j)];
      for (int h = 0; h < n; ++h) {
        LpRow row;
        row.name = "cut" + ci + "_fix" + std::to_string(j) + "_" +
                   std::to_string(h);
        add_term(row, v_x[static_cast<std::size_t>(h)], 1.0);
        for (int l = 0; l < m; ++l) {
          if (l == j) continue;
          const double d = static_cast<double>(
              xj[static_cast<std::size_t>(h)] -
              cut.points[static_cast<std::size_t>(l)][static_cast<std::size_t>(h)]);
          add_term(row, v_lam[static_cast<std::size_t>(j) * m + l], -d);
        }
        row.sense = RowSense::EQ;
        row.rhs = static_cast<double>(xj[static_cast<std::size_t>(h)]);
        lp.rows.push_back(std::move(row));
      }
    }
    // Selected cone must have nonnegative coordinates.
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l < m; ++l) {
        if (l == j) continue;
        LpRow row;
        row.name = "cut" + ci + "_pos" + std::to_string(j) + "_" +
                   std::to_string(l);
        add_term(row, v_lam[static_cast<std::size_t>(j) * m + l], 1.0);
        add_term(row, v_z[static_cast<std::size_t>(j)], -Ml);
        row.sense = RowSense::GE;
        row.rhs = -Ml;
        lp.rows.push_back(std::move(row));
      }
    }
    // Unselected cones must exhibit a separating coordinate (w = 0).
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l < m; ++l) {
        if (l == j) continue;
        LpRow row;
        row.name = "cut" + ci + "_sep" + std::to_string(j) + "_" +
                   std::to_string(l);
        add_term(row, v_lam[static_cast<std::size_t>(j) * m + l], 1.0);
        add_term(row, v_w[static_cast<std::size_t>(j) * m + l], -Ml);
        row.sense = RowSense::LE;
        row.rhs = -eps;
        lp.rows.push_back(std::move(row));
      }
    }
    // Link w to z: all w = 1 when selected, some w = 0 when not.
    for (int j = 0; j < m; ++j) {
      {
        LpRow row;
        row.name = "cut" + ci + "_wlo" + std::to_string(j);
        add_term(row, v_z[static_cast<std::size_t>(j)], static_cast<double>(n));
        for (int l = 0; l < m; ++l) {
          if (l == j) continue;
          add_term(row, v_w[static_cast<std::size_t>(j) * m + l], -1.0);
        }
        row.sense = RowSense::LE;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
      }
      {
        LpRow row;
        row.name = "cut" + ci + "_whi" + std::to_string(j);
        for (int l = 0; l < m; ++l) {
          if (l == j) continue;
          add_term(row, v_w[static_cast<std::size_t>(j) * m + l], 1.0);
        }
        add_term(row, v_z[static_cast<std::size_t>(j)], -1.0);
        row.sense = RowSense::LE;
        row.rhs = static_cast<double>(n) - 1.0;
        lp.rows.push_back(std::move(row));
      }
    }
  }

  if (opts.with_no_good) {
    // One-hot coordinate encoding shared by all excluded points.
    std::vector<std::vector<std::int32_t>> v_xi(static_cast<std::size_t>(n));
    for (int h = 0; h < n; ++h) {
      const int span = dom.box.hi[static_cast<std::size_t>(h)] -
                       dom.box.lo[static_cast<std::size_t>(h)] + 1;
      for (int t = 0; t < span; ++t) {
        v_xi[static_cast<std::size_t>(h)].push_back(
            lp.add_var("xi_" + std::to_string(h) + "_" + std::to_string(t),
                       VarKind::Binary, 0, 1));
      }
    }
    for (int h = 0; h < n; ++h) {
      LpRow row;
      row.name = "ng_link" + std::to_string(h);
      add_term(row, v_x[static_cast<std::size_t>(h)], 1.0);
      const int lo = dom.box.lo[static_cast<std::size_t>(h)];
      for (std::size_t t = 0; t < v_xi[static_cast<std::size_t>(h)].size();
           ++t) {
        add_term(row, v_xi[static_cast<std::size_t>(h)][t],
                 -static_cast<double>(lo + static_cast<int>(t)));
      }
      row.sense = RowSense::EQ;
      row.rhs = 0.0;
      lp.rows.push_back(std::move(row));
    }
    for (int h = 0; h < n; ++h) {
      LpRow row;
      row.name = "ng_onehot" + std::to_string(h);
      for (const std::int32_t v : v_xi[static_cast<std::size_t>(h)]) {
        add_term(row, v, 1.0);
      }
      row.sense = RowSense::EQ;
      row.rhs = 1.0;
      lp.rows.push_back(std::move(row));
    }
    // Each evaluated point x^k forces eta >= f^k when x = x^k; any other
    // point flips at least two one-hot bits, relaxing the row by 2 M_ng.
    const double M_ng = (max_f - l_f) / 2.0;
    for (std::size_t k = 0; k < evaluated.size(); ++k) {
      const Point& xk = evaluated[k].first;
      LpRow row;
      row.name = "ng_seen" + std::to_string(k);
      add_term(row, v_eta, 1.0);
      for (int h = 0; h < n; ++h) {
        const int hot = xk[static_cast<std::size_t>(h)] -
                        dom.box.lo[static_cast<std::size_t>(h)];
        for (std::size_t t = 0; t < v_xi[static_cast<std::size_t>(h)].size();
             ++t) {
          const double sgn = static_cast<int>(t) == hot ? -1.0 : 1.0;
          add_term(row, v_xi[static_cast<std::size_t>(h)][t], sgn * M_ng);
        }
      }
      row.sense = RowSense::GE;
      row.rhs = evaluated[k].second - M_ng * static_cast<double>(n);
      lp.rows.push_back(std::move(row));
    }
  }

  lp.objective.push_back({v_eta, 1.0});
  return model;
}

void export_lp(const CpfModel& model, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailureError("cannot open '" + path + "' for writing");
    out << write_lp(model.lp);
    if (!out) throw IoFailureError("write failed for '" + path + "'");
  }
  const std::string side = path + ".constants.txt";
  std::ofstream out(side, std::ios::binary);
  if (!out) throw IoFailureError("cannot open '" + side + "' for writing");
  const ConstantBundle& cb = model.constants;
  out << "# constants for " << path << "\n";
  out << "derivation: " << cb.provenance << "\n";
  out << "l_f = " << fmt_num(cb.l_f) << "\n";
  out << "activation constants: "
      << (model.cuts.empty() || model.cuts[0].M == cb.M_eta ? "" : "per-cut ")
      << "max = " << fmt_num(cb.M_eta) << "\n";
  for (std::size_t i = 0; i < cb.M_per_cut.size(); ++i) {
    out << "M[" << i << "] = " << fmt_num(cb.M_per_cut[i]) << "\n";
  }
  out << "separation threshold (cone-multiplier units) = "
      << fmt_num(cb.model_eps_lambda) << "\n";
  out << "multiplier big-M = " << fmt_num(cb.model_M_lambda) << "\n";
  out << "reference distance-space values: eps = " << fmt_num(cb.eps_lambda)
      << ", M = " << fmt_num(cb.M_lambda) << "\n";
  out << "exclusion block: " << (model.with_no_good ? "on" : "off")
      << "; xi_h_t encodes x_h = box_lo_h + t\n";
  if (!out) throw IoFailureError("write failed for '" + side + "'");
}

std::unordered_map<std::string, double> cpf_assignment(
    const CpfModel& model, const Point& x, std::optional<double> eta_value) {
  const int n = model.n;
  const int m = n + 1;
  std::unordered_map<std::string, double> a;
  for (int h = 0; h < n; ++h) {
    a["x_" + std::to_string(h)] = static_cast<double>(x[static_cast<std::size_t>(h)]);
  }
  double eta_req = model.constants.l_f;
  const double eps = model.constants.model_eps_lambda;

  for (std::size_t i = 0; i < model.cuts.size(); ++i) {
    const CpfCut& cut = model.cuts[i];
    const std::string ci = std::to_string(i);
    std::vector<double> v(static_cast<std::size_t>(m));
    int positives = 0;
    int member = -1;
    for (int l = 0; l < m; ++l) {
      v[static_cast<std::size_t>(l)] =
          cut.facets[static_cast<std::size_t>(l)].eval(x);
      if (v[static_cast<std::size_t>(l)] > kMembershipTol) {
        ++positives;
        member = l;
      }
    }
    if (positives != 1) member = -1;
    if (member >= 0) eta_req = std::max(eta_req, cut.model.eval(x));
    for (int j = 0; j < m; ++j) {
      a["z_" + ci + "_" + std::to_string(j)] = j == member ? 1.0 : 0.0;
      for (int l = 0; l < m; ++l) {
        if (l == j) continue;
        a["lam_" + ci + "_" + std::to_string(j) + "_" + std::to_string(l)] =
            -v[static_cast<std::size_t>(l)];
        double w;
        if (j == member) {
          w = 1.0;
        } else {
          // Witness a separating facet where the multiplier is provably
          // below the threshold.
          w = v[static_cast<std::size_t>(l)] >= eps ? 0.0 : 1.0;
        }
        a["w_" + ci + "_" + std::to_string(j) + "_" + std::to_string(l)] = w;
      }
    }
  }

  if (model.with_no_good) {
    for (int h = 0; h < n; ++h) {
      const int span = model.box.hi[static_cast<std::size_t>(h)] -
                       model.box.lo[static_cast<std::size_t>(h)] + 1;
      const int hot = x[static_cast<std::size_t>(h)] -
                      model.box.lo[static_cast<std::size_t>(h)];
      for (int t = 0; t < span; ++t) {
        a["xi_" + std::to_string(h) + "_" + std::to_string(t)] =
            t == hot ? 1.0 : 0.0;
      }
    }
    for (const auto& [p, f] : model.evaluated) {
      if (p == x) eta_req = std::max(eta_req, f);
    }
  }
  a["eta"] = eta_value ? *eta_value : eta_req;
  return a;
}

}  // namespace sucil
