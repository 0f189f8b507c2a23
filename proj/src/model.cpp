#include "wrmc/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wrmc/exact.hpp"

namespace wrmc {

using nlohmann::json;

namespace {

constexpr double kTol = 1e-12;

std::string label_pair(const StateSpace& st, int x, int y) {
  return "(" + st.labels[x] + "," + st.labels[y] + ")";
}

std::string set_to_string(const StateSpace& st, const std::vector<int>& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += st.labels[set[i]];
  }
  return out + "}";
}

/// Numbers may be JSON numbers, exact rational strings like "21/60", or
/// plain decimal strings. Rationals are parsed as integers and divided
/// once, which keeps hand-written probability tables faithful to the last
/// double bit.
double parse_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty()) throw ParseError(where + ": empty numeric string");
    const auto slash = s.find('/');
    errno = 0;
    char* end = nullptr;
    if (slash != std::string::npos) {
      const std::string num = s.substr(0, slash);
      const std::string den = s.substr(slash + 1);
      const long long p = std::strtoll(num.c_str(), &end, 10);
      if (end == num.c_str() || *end != '\0' || errno == ERANGE)
        throw ParseError(where + ": bad rational numerator in '" + s + "'");
      errno = 0;
      const long long q = std::strtoll(den.c_str(), &end, 10);
      if (end == den.c_str() || *end != '\0' || errno == ERANGE || q == 0)
        throw ParseError(where + ": bad rational denominator in '" + s + "'");
      return static_cast<double>(p) / static_cast<double>(q);
    }
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw ParseError(where + ": cannot parse number '" + s + "'");
    return v;
  }
  throw ParseError(where + ": expected a number or a numeric string");
}

double parse_finite(const json& j, const std::string& where) {
  const double v = parse_number(j, where);
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
  return v;
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const char* k : required)
    if (!j.contains(k)) throw ParseError(where + ": missing field '" + k + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const bool known = std::any_of(required.begin(), required.end(),
                                   [&](const char* r) { return k == r; }) ||
                       std::any_of(optional.begin(), optional.end(),
                                   [&](const char* o) { return k == o; });
    if (!known) throw ParseError(where + ": unknown field '" + k + "'");
  }
}

Matrix parse_matrix(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw ParseError(where + ": expected " + std::to_string(n) + " rows");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != n)
      throw ParseError(where + ": row " + std::to_string(i) + " must have " + std::to_string(n) +
                       " entries");
    for (std::size_t k = 0; k < n; ++k)
      m(i, k) = parse_finite(row[k], where + "[" + std::to_string(i) + "][" + std::to_string(k) +
                                         "]");
  }
  return m;
}

std::vector<int> parse_state_set(const json& j, const StateSpace& states,
                                 const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty label array");
  std::vector<int> set;
  set.reserve(j.size());
  for (const json& e : j) {
    if (!e.is_string()) throw ParseError(where + ": set members must be state labels");
    const int idx = states.index_of(e.get<std::string>());
    if (idx < 0) throw ParseError(where + ": unknown state label '" + e.get<std::string>() + "'");
    set.push_back(idx);
  }
  std::sort(set.begin(), set.end());
  if (std::adjacent_find(set.begin(), set.end()) != set.end())
    throw ParseError(where + ": duplicate member in proposal set");
  return set;
}

AcceptanceRule parse_acceptance(const json& j, std::size_t n) {
  require_keys(j, "single.acceptance", {"type"}, {"alpha", "rho"});
  const std::string type = j.at("type").get<std::string>();
  AcceptanceRule rule;
  if (type == "metropolis") {
    if (j.contains("alpha") || j.contains("rho"))
      throw ParseError("single.acceptance: metropolis takes neither 'alpha' nor 'rho'");
    rule.variant = AcceptanceVariant::kMetropolis;
  } else if (type == "alpha_barker") {
    if (!j.contains("alpha") || j.contains("rho"))
      throw ParseError("single.acceptance: alpha_barker needs 'alpha' and forbids 'rho'");
    rule.variant = AcceptanceVariant::kAlphaBarker;
    rule.alpha = parse_finite(j.at("alpha"), "single.acceptance.alpha");
  } else if (type == "explicit") {
    if (!j.contains("rho") || j.contains("alpha"))
      throw ParseError("single.acceptance: explicit needs 'rho' and forbids 'alpha'");
    rule.variant = AcceptanceVariant::kExplicitRho;
    rule.rho = parse_matrix(j.at("rho"), n, "single.acceptance.rho");
  } else {
    throw ParseError("single.acceptance: unknown type '" + type + "'");
  }
  return rule;
}

struct Graph {
  // reach[x][y]: y reachable from x through positive off-diagonal weights
  static std::vector<std::vector<bool>> reachability(std::size_t n,
                                                     const std::vector<std::vector<bool>>& edge) {
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::size_t> stack{s};
      reach[s][s] = true;
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (std::size_t y = 0; y < n; ++y)
          if (edge[x][y] && !reach[s][y]) {
            reach[s][y] = true;
            stack.push_back(y);
          }
      }
    }
    return reach;
  }

  static std::vector<std::string> missing_pairs(const StateSpace& st,
                                                const std::vector<std::vector<bool>>& edge) {
    const std::size_t n = st.size();
    const auto reach = reachability(n, edge);
    std::vector<std::string> missing;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (!reach[x][y]) missing.push_back(st.labels[x] + "->" + st.labels[y]);
    return missing;
  }
};

std::string join(const std::vector<std::string>& v, std::size_t cap = 8) {
  std::string out;
  for (std::size_t i = 0; i < v.size() && i < cap; ++i) {
    if (i) out += ", ";
    out += v[i];
  }
  if (v.size() > cap) out += ", ...";
  return out;
}

}  // namespace

int StateSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

double MultiProposalKernel::weight(int x, const std::vector<int>& set) const {
  const int s = set_index(x, set);
  return s < 0 ? 0.0 : support[x][s].prob;
}

int MultiProposalKernel::set_index(int x, const std::vector<int>& set) const {
  const auto& sets = support[x];
  for (std::size_t s = 0; s < sets.size(); ++s)
    if (sets[s].states == set) return static_cast<int>(s);
  return -1;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass) return c.name + ": " + c.detail;
  return {};
}

Model parse_model_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  require_keys(root, "model", {"states", "pi"}, {"single", "multi"});
  if (root.contains("single") == root.contains("multi"))
    throw ParseError("model: exactly one of 'single' or 'multi' must be present");

  Model m;
  const json& jstates = root.at("states");
  if (!jstates.is_array() || jstates.empty())
    throw ParseError("model.states: expected a non-empty array of labels");
  for (const json& s : jstates) {
    if (!s.is_string()) throw ParseError("model.states: labels must be strings");
    m.states.labels.push_back(s.get<std::string>());
  }
  const std::size_t n = m.states.size();

  const json& jpi = root.at("pi");
  if (!jpi.is_array() || jpi.size() != n)
    throw ParseError("model.pi: expected " + std::to_string(n) + " entries");
  for (std::size_t i = 0; i < n; ++i)
    m.target.pi.push_back(parse_finite(jpi[i], "model.pi[" + std::to_string(i) + "]"));

  if (root.contains("single")) {
    const json& js = root.at("single");
    require_keys(js, "single", {"Q", "acceptance"});
    SingleProposal sp;
    sp.selection.q = parse_matrix(js.at("Q"), n, "single.Q");
    sp.acceptance = parse_acceptance(js.at("acceptance"), n);
    m.single = std::move(sp);
  } else {
    const json& jm = root.at("multi");
    require_keys(jm, "multi", {"kernel", "selection"});
    MultiProposal mp;
    const json& jkernel = jm.at("kernel");
    if (!jkernel.is_array() || jkernel.size() != n)
      throw ParseError("multi.kernel: expected one entry list per state");
    mp.kernel.support.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      const json& jlist = jkernel[x];
      const std::string where = "multi.kernel[" + m.states.labels[x] + "]";
      if (!jlist.is_array()) throw ParseError(where + ": expected an array of proposal sets");
      for (const json& je : jlist) {
        require_keys(je, where, {"set", "prob"});
        ProposalSet ps;
        ps.states = parse_state_set(je.at("set"), m.states, where + ".set");
        ps.prob = parse_finite(je.at("prob"), where + ".prob");
        mp.kernel.support[x].push_back(std::move(ps));
      }
    }

    const json& jsel = jm.at("selection");
    require_keys(jsel, "multi.selection", {"type"}, {"table"});
    const std::string type = jsel.at("type").get<std::string>();
    if (type == "metropolis") {
      mp.selection.variant = SelectionVariant::kMetropolisKappa;
    } else if (type == "boltzmann") {
      mp.selection.variant = SelectionVariant::kBoltzmannKappa;
    } else if (type == "explicit") {
      mp.selection.variant = SelectionVariant::kExplicitKappa;
    } else {
      throw ParseError("multi.selection: unknown type '" + type + "'");
    }
    if ((type == "explicit") != jsel.contains("table"))
      throw ParseError("multi.selection: 'table' is required for explicit and forbidden otherwise");
    if (type == "explicit") {
      mp.selection.table.assign(n, {});
      for (std::size_t x = 0; x < n; ++x)
        mp.selection.table[x].resize(mp.kernel.support[x].size());
      std::vector<std::vector<bool>> filled(n);
      for (std::size_t x = 0; x < n; ++x) filled[x].assign(mp.kernel.support[x].size(), false);
      for (const json& je : jsel.at("table")) {
        require_keys(je, "multi.selection.table entry", {"x", "set", "kappa"});
        const int x = m.states.index_of(je.at("x").get<std::string>());
        if (x < 0)
          throw ParseError("multi.selection.table: unknown state '" +
                           je.at("x").get<std::string>() + "'");
        const std::vector<int> set =
            parse_state_set(je.at("set"), m.states, "multi.selection.table.set");
        const int s = mp.kernel.set_index(x, set);
        if (s < 0)
          throw ParseError("multi.selection.table: set " + set_to_string(m.states, set) +
                           " is not in the support of state " + m.states.labels[x]);
        if (filled[x][s])
          throw ParseError("multi.selection.table: duplicate entry for state " +
                           m.states.labels[x] + " and set " + set_to_string(m.states, set));
        const json& jk = je.at("kappa");
        if (!jk.is_array() || jk.size() != set.size())
          throw ParseError("multi.selection.table: kappa must have one entry per set member");
        Vec kv;
        for (std::size_t i = 0; i < jk.size(); ++i)
          kv.push_back(parse_finite(jk[i], "multi.selection.table.kappa"));
        mp.selection.table[x][s] = std::move(kv);
        filled[x][s] = true;
      }
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t s = 0; s < filled[x].size(); ++s)
          if (!filled[x][s])
            throw ParseError("multi.selection.table: missing entry for state " +
                             m.states.labels[x] + " and set " +
                             set_to_string(m.states, mp.kernel.support[x][s].states));
    }
    m.multi = std::move(mp);
  }
  return m;
}

Matrix rho_matrix(const Vec& pi, const Matrix& q, const AcceptanceRule& rule) {
  const std::size_t n = q.dim();
  Matrix rho(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (q(x, y) <= 0.0) continue;
      switch (rule.variant) {
        case AcceptanceVariant::kMetropolis: {
          const double u = pi[y] * q(y, x) / (pi[x] * q(x, y));
          rho(x, y) = std::min(1.0, u);
          break;
        }
        case AcceptanceVariant::kAlphaBarker: {
          const double u = pi[y] * q(y, x) / (pi[x] * q(x, y));
          rho(x, y) = rule.alpha * u / (1.0 + u);
          break;
        }
        case AcceptanceVariant::kExplicitRho:
          rho(x, y) = rule.rho(x, y);
          break;
      }
    }
  return rho;
}

namespace {

void validate_common(const Model& m, ValidationReport& r) {
  const std::size_t n = m.states.size();
  {
    ValidationCheck c{"state_count", n >= 2, 0.0, ""};
    if (!c.pass) c.detail = "state space must have at least 2 states, got " + std::to_string(n);
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"labels_distinct", true, 0.0, ""};
    std::set<std::string> seen;
    for (const auto& l : m.states.labels)
      if (!seen.insert(l).second) {
        c.pass = false;
        c.detail = "duplicate state label '" + l + "'";
        break;
      }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"pi_positive", true, 0.0, ""};
    for (std::size_t i = 0; i < n; ++i)
      if (!(m.target.pi[i] > 0.0)) {
        c.pass = false;
        c.detail = "pi(" + m.states.labels[i] + ") = " + std::to_string(m.target.pi[i]) +
                   " is not strictly positive";
        break;
      }
    r.checks.push_back(c);
  }
  {
    double sum = 0.0;
    for (double p : m.target.pi) sum += p;
    ValidationCheck c{"pi_normalized", std::abs(sum - 1.0) <= kTol, std::abs(sum - 1.0), ""};
    if (!c.pass) c.detail = "pi sums to " + std::to_string(sum);
    r.checks.push_back(c);
  }
}

void validate_single(const Model& m, ValidationReport& r) {
  const std::size_t n = m.states.size();
  const Matrix& q = m.single->selection.q;
  const AcceptanceRule& rule = m.single->acceptance;
  const Vec& pi = m.target.pi;

  {
    ValidationCheck c{"q_row_stochastic", true, 0.0, ""};
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y)
        if (q(x, y) < 0.0) {
          c.pass = false;
          c.detail = "Q" + label_pair(m.states, x, y) + " is negative";
        }
      const double res = std::abs(q.row_sum(x) - 1.0);
      c.residual = std::max(c.residual, res);
      if (res > kTol && c.detail.empty()) {
        c.pass = false;
        c.detail = "row " + m.states.labels[x] + " sums to " + std::to_string(q.row_sum(x));
      }
    }
    if (c.residual > kTol) c.pass = false;
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"q_zero_symmetry", true, 0.0, ""};
    for (std::size_t x = 0; x < n && c.pass; ++x)
      for (std::size_t y = 0; y < n && c.pass; ++y)
        if (x != y && q(x, y) > 0.0 && q(y, x) == 0.0) {
          c.pass = false;
          c.detail = "Q" + label_pair(m.states, x, y) + " > 0 but Q" +
                     label_pair(m.states, y, x) + " = 0";
        }
    r.checks.push_back(c);
  }
  {
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (x != y && q(x, y) > 0.0) edge[x][y] = true;
    const auto missing = Graph::missing_pairs(m.states, edge);
    ValidationCheck c{"q_irreducible", missing.empty(), 0.0, ""};
    if (!c.pass) c.detail = "unreachable pairs: " + join(missing);
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"acceptance_range", true, 0.0, ""};
    try {
      if (rule.variant == AcceptanceVariant::kAlphaBarker) {
        if (!(rule.alpha > 0.0 && rule.alpha < 2.0)) {
          c.pass = false;
          c.detail = "alpha must lie in (0,2), got " + std::to_string(rule.alpha);
        } else {
          double min_ratio = std::numeric_limits<double>::infinity();
          for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
              if (x != y && q(x, y) > 0.0)
                min_ratio = std::min(min_ratio, pi[y] * q(y, x) / (pi[x] * q(x, y)));
          if (rule.alpha > 1.0 + min_ratio + kTol) {
            c.pass = false;
            c.residual = rule.alpha - (1.0 + min_ratio);
            c.detail = "alpha = " + std::to_string(rule.alpha) +
                       " exceeds 1 + min pi(y)Q(y,x)/(pi(x)Q(x,y)) = " +
                       std::to_string(1.0 + min_ratio);
          }
        }
      }
      if (c.pass) {
        const Matrix rho = rho_matrix(pi, q, rule);
        for (std::size_t x = 0; x < n && c.pass; ++x)
          for (std::size_t y = 0; y < n && c.pass; ++y) {
            if (q(x, y) <= 0.0) continue;
            if (!(rho(x, y) > 0.0) || rho(x, y) > 1.0 + kTol) {
              c.pass = false;
              c.residual = std::max(c.residual, rho(x, y) - 1.0);
              c.detail = "rho" + label_pair(m.states, x, y) + " = " + std::to_string(rho(x, y)) +
                         " is outside (0,1]";
            }
          }
      }
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"detailed_balance", true, 0.0, ""};
    try {
      const Matrix rho = rho_matrix(pi, q, rule);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
          if (q(x, y) <= 0.0 && q(y, x) <= 0.0) continue;
          const double lhs = q(x, y) > 0.0 ? rho(x, y) * pi[x] * q(x, y) : 0.0;
          const double rhs = q(y, x) > 0.0 ? rho(y, x) * pi[y] * q(y, x) : 0.0;
          const double res = std::abs(lhs - rhs);
          if (res > c.residual) {
            c.residual = res;
            if (res > kTol) {
              c.pass = false;
              c.detail = "rho(x,y)pi(x)Q(x,y) != rho(y,x)pi(y)Q(y,x) at " +
                         label_pair(m.states, x, y) + ", residual " + std::to_string(res);
            }
          }
        }
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    r.checks.push_back(c);
  }
}

void validate_multi(const Model& m, ValidationReport& r) {
  const std::size_t n = m.states.size();
  const MultiProposalKernel& kern = m.multi->kernel;
  const SelectionKernelSpec& spec = m.multi->selection;
  const Vec& pi = m.target.pi;

  {
    ValidationCheck c{"kernel_weights", true, 0.0, ""};
    for (std::size_t x = 0; x < n; ++x) {
      double sum = 0.0;
      for (const auto& ps : kern.support[x]) {
        if (ps.prob < 0.0) {
          c.pass = false;
          c.detail = "negative weight for set " + set_to_string(m.states, ps.states) +
                     " at state " + m.states.labels[x];
        }
        sum += ps.prob;
      }
      const double res = std::abs(sum - 1.0);
      c.residual = std::max(c.residual, res);
      if (res > kTol && c.detail.empty()) {
        c.pass = false;
        c.detail = "weights of state " + m.states.labels[x] + " sum to " + std::to_string(sum);
      }
    }
    if (c.residual > kTol) c.pass = false;
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"kernel_contains_start", true, 0.0, ""};
    for (std::size_t x = 0; x < n && c.pass; ++x)
      for (const auto& ps : kern.support[x])
        if (!std::binary_search(ps.states.begin(), ps.states.end(), static_cast<int>(x))) {
          c.pass = false;
          c.detail = "set " + set_to_string(m.states, ps.states) + " of state " +
                     m.states.labels[x] + " does not contain it";
          break;
        }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"kernel_sets_distinct", true, 0.0, ""};
    for (std::size_t x = 0; x < n && c.pass; ++x) {
      const auto& sets = kern.support[x];
      for (std::size_t a = 0; a < sets.size() && c.pass; ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b)
          if (sets[a].states == sets[b].states) {
            c.pass = false;
            c.detail = "state " + m.states.labels[x] + " lists set " +
                       set_to_string(m.states, sets[a].states) + " twice";
            break;
          }
    }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"selection_rows", true, 0.0, ""};
    try {
      for (std::size_t x = 0; x < n; ++x)
        for (const auto& ps : kern.support[x]) {
          const Vec kv = kappa_of(pi, kern, spec, static_cast<int>(x), ps.states);
          double sum = 0.0;
          for (double w : kv) {
            sum += w;
            if (w < -kTol || w > 1.0 + kTol) {
              c.pass = false;
              c.detail = "kappa(" + m.states.labels[x] + "," +
                         set_to_string(m.states, ps.states) + ",.) has an entry outside [0,1]";
            }
          }
          const double res = std::abs(sum - 1.0);
          c.residual = std::max(c.residual, res);
          if (res > kTol && c.detail.empty()) {
            c.pass = false;
            c.detail = "kappa(" + m.states.labels[x] + "," + set_to_string(m.states, ps.states) +
                       ",.) sums to " + std::to_string(sum);
          }
        }
      if (c.residual > kTol) c.pass = false;
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"reversibility", true, 0.0, ""};
    try {
      for (std::size_t x = 0; x < n; ++x)
        for (const auto& ps : kern.support[x]) {
          if (ps.prob <= 0.0) continue;
          const Vec kx = kappa_of(pi, kern, spec, static_cast<int>(x), ps.states);
          for (std::size_t i = 0; i < ps.states.size(); ++i) {
            const int y = ps.states[i];
            const double lhs = pi[x] * ps.prob * kx[i];
            double rhs = 0.0;
            const double qy = kern.weight(y, ps.states);
            if (qy > 0.0) {
              const Vec ky = kappa_of(pi, kern, spec, y, ps.states);
              const auto pos =
                  std::lower_bound(ps.states.begin(), ps.states.end(), static_cast<int>(x)) -
                  ps.states.begin();
              rhs = pi[y] * qy * ky[pos];
            }
            const double res = std::abs(lhs - rhs);
            if (res > c.residual) {
              c.residual = res;
              if (res > kTol) {
                c.pass = false;
                c.detail = "pi(x)Q(x,A)kappa(x,A,y) != pi(y)Q(y,A)kappa(y,A,x) at x=" +
                           m.states.labels[x] + " A=" + set_to_string(m.states, ps.states) +
                           " y=" + m.states.labels[y] + ", residual " + std::to_string(res);
              }
            }
          }
        }
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    r.checks.push_back(c);
  }
  {
    ValidationCheck c{"irreducibility", true, 0.0, ""};
    try {
      std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
      for (std::size_t x = 0; x < n; ++x)
        for (const auto& ps : kern.support[x]) {
          if (ps.prob <= 0.0) continue;
          const Vec kv = kappa_of(pi, kern, spec, static_cast<int>(x), ps.states);
          for (std::size_t i = 0; i < ps.states.size(); ++i)
            if (ps.states[i] != static_cast<int>(x) && kv[i] > 0.0)
              edge[x][ps.states[i]] = true;
        }
      const auto missing = Graph::missing_pairs(m.states, edge);
      c.pass = missing.empty();
      if (!c.pass) c.detail = "unreachable pairs: " + join(missing);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    r.checks.push_back(c);
  }
}

void validate_p(const Model& m, ValidationReport& r) {
  ValidationCheck c{"p_construction", true, 0.0, ""};
  try {
    const TransitionMatrix tm = build_p(m);
    const std::size_t n = tm.p.dim();
    for (std::size_t x = 0; x < n; ++x) {
      c.residual = std::max(c.residual, std::abs(tm.p.row_sum(x) - 1.0));
      for (std::size_t y = 0; y < n; ++y)
        c.residual = std::max(c.residual, std::abs(m.target.pi[x] * tm.p(x, y) -
                                                   m.target.pi[y] * tm.p(y, x)));
    }
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = e.what();
  }
  r.checks.push_back(c);
}

}  // namespace

ValidationReport validate_model(const Model& m) {
  ValidationReport r;
  validate_common(m, r);
  if (m.single)
    validate_single(m, r);
  else if (m.multi)
    validate_multi(m, r);
  // The structural checks above guard the heavier construction check.
  if (r.ok()) validate_p(m, r);
  return r;
}

void compile_model(Model& m) {
  if (m.single) {
    m.single->rho = rho_matrix(m.target.pi, m.single->selection.q, m.single->acceptance);
  } else if (m.multi) {
    auto& mp = *m.multi;
    mp.kappa.assign(m.size(), {});
    for (std::size_t x = 0; x < m.size(); ++x)
      for (const auto& ps : mp.kernel.support[x])
        mp.kappa[x].push_back(kappa_of(m.target.pi, mp.kernel, mp.selection,
                                       static_cast<int>(x), ps.states));
  }
}

Model load_model(const std::string& text) {
  Model m = parse_model_json(text);
  const ValidationReport report = validate_model(m);
  if (!report.ok()) throw ValidationError("model validation failed: " + report.first_failure());
  compile_model(m);
  return m;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

Model pair_embedding(const Model& m) {
  if (!m.single) throw std::invalid_argument("pair_embedding expects a single-proposal model");
  const std::size_t n = m.size();
  const Matrix& q = m.single->selection.q;
  const Matrix rho = rho_matrix(m.target.pi, q, m.single->acceptance);

  Model out;
  out.states = m.states;
  out.target = m.target;
  MultiProposal mp;
  mp.kernel.support.resize(n);
  mp.selection.variant = SelectionVariant::kExplicitKappa;
  mp.selection.table.resize(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (q(x, y) <= 0.0) continue;
      ProposalSet ps;
      if (y == x) {
        ps.states = {static_cast<int>(x)};
        ps.prob = q(x, y);
        mp.selection.table[x].push_back(Vec{1.0});
      } else {
        ps.states = {static_cast<int>(std::min(x, y)), static_cast<int>(std::max(x, y))};
        ps.prob = q(x, y);
        // probability rho(x,y) of landing on y, laid out in sorted order
        Vec kv(2);
        const std::size_t y_pos = y > x ? 1 : 0;
        kv[y_pos] = rho(x, y);
        kv[1 - y_pos] = 1.0 - rho(x, y);
        mp.selection.table[x].push_back(std::move(kv));
      }
      mp.kernel.support[x].push_back(std::move(ps));
    }
  out.multi = std::move(mp);
  compile_model(out);
  return out;
}

Vec parse_function_json(const std::string& text, const StateSpace& states) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("function file is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("function file: expected an object label -> value");
  Vec values(states.size(), 0.0);
  std::vector<bool> seen(states.size(), false);
  for (auto it = root.begin(); it != root.end(); ++it) {
    const int idx = states.index_of(it.key());
    if (idx < 0) throw ParseError("function file: unknown state label '" + it.key() + "'");
    values[idx] = parse_finite(it.value(), "function[" + it.key() + "]");
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!seen[i])
      throw ParseError("function file: missing value for state '" + states.labels[i] + "'");
  return values;
}

Vec load_function_file(const std::string& path, const StateSpace& states) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open function file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_function_json(ss.str(), states);
}

}  // namespace wrmc
