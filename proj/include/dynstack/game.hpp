// Copyright 2026 The dynstack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNSTACK_GAME_HPP
#define DYNSTACK_GAME_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynstack {

inline constexpr double kProbTol = 1e-12;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Player { leader, follower };

struct JointAction {
  int leader = 0;
  int follower = 0;
};

// Controlled Markov kernel for one player's private state:
// p(x' | x, a_l, a_f), rows (x, a_l, a_f) over columns x'.
struct Kernel {
  int n_states = 0;
  int n_al = 0;
  int n_af = 0;
  std::vector<double> p;

  static Kernel zeros(int n_states, int n_al, int n_af) {
    Kernel k;
    k.n_states = n_states;
    k.n_al = n_al;
    k.n_af = n_af;
    k.p.assign(static_cast<std::size_t>(n_states) * n_al * n_af * n_states, 0.0);
    return k;
  }

  static Kernel identity(int n_states, int n_al, int n_af) {
    Kernel k = zeros(n_states, n_al, n_af);
    for (int x = 0; x < n_states; ++x)
      for (int al = 0; al < n_al; ++al)
        for (int af = 0; af < n_af; ++af) k.at(x, al, af, x) = 1.0;
    return k;
  }

  std::size_t row_offset(int x, int al, int af) const {
    return ((static_cast<std::size_t>(x) * n_al + al) * n_af + af) * n_states;
  }
  double operator()(int x, int al, int af, int xn) const {
    return p[row_offset(x, al, af) + xn];
  }
  double& at(int x, int al, int af, int xn) {
    return p[row_offset(x, al, af) + xn];
  }

  bool operator==(const Kernel&) const = default;
};

// Reward tensor R(x_l, x_f, a_l, a_f), optionally one slice per time step.
struct RewardTensor {
  int n_xl = 0;
  int n_xf = 0;
  int n_al = 0;
  int n_af = 0;
  // slices.size() == 1 means time-homogeneous; otherwise slices[t-1] is R_t.
  std::vector<std::vector<double>> slices;

  static RewardTensor zeros(int n_xl, int n_xf, int n_al, int n_af) {
    RewardTensor r;
    r.n_xl = n_xl;
    r.n_xf = n_xf;
    r.n_al = n_al;
    r.n_af = n_af;
    r.slices.assign(
        1, std::vector<double>(
               static_cast<std::size_t>(n_xl) * n_xf * n_al * n_af, 0.0));
    return r;
  }

  std::size_t flat(int xl, int xf, int al, int af) const {
    return ((static_cast<std::size_t>(xl) * n_xf + xf) * n_al + al) * n_af + af;
  }
  // t is 1-based; clamped to the single slice for homogeneous rewards.
  double at(int t, int xl, int xf, int al, int af) const {
    const std::size_t s = slices.size() == 1
                              ? 0
                              : static_cast<std::size_t>(
                                    std::clamp<int>(t - 1, 0,
                                                    (int)slices.size() - 1));
    return slices[s][flat(xl, xf, al, af)];
  }
  double& set(int t, int xl, int xf, int al, int af) {
    const std::size_t s = slices.size() == 1 ? 0 : static_cast<std::size_t>(t - 1);
    return slices[s][flat(xl, xf, al, af)];
  }
  bool time_homogeneous() const { return slices.size() == 1; }
  double max_abs() const {
    double m = 0.0;
    for (const auto& s : slices)
      for (double v : s) m = std::max(m, std::fabs(v));
    return m;
  }

  bool operator==(const RewardTensor&) const = default;
};

inline constexpr int kInfiniteHorizon = -1;

// Full description of a two-player dynamic Stackelberg game with
// conditionally independent private Markovian types.
struct GameSpec {
  std::vector<std::string> x_l_states;
  std::vector<std::string> x_f_states;
  std::vector<std::string> a_l_actions;
  std::vector<std::string> a_f_actions;
  Kernel q_l;
  Kernel q_f;
  RewardTensor r_l;
  RewardTensor r_f;
  double delta = 1.0;
  int horizon = 1;  // kInfiniteHorizon for the infinite-horizon game
  std::vector<double> prior_l;
  std::vector<double> prior_f;

  int nxl() const { return static_cast<int>(x_l_states.size()); }
  int nxf() const { return static_cast<int>(x_f_states.size()); }
  int nal() const { return static_cast<int>(a_l_actions.size()); }
  int naf() const { return static_cast<int>(a_f_actions.size()); }
  bool infinite() const { return horizon == kInfiniteHorizon; }

  double rl(int t, int xl, int xf, int al, int af) const {
    return r_l.at(t, xl, xf, al, af);
  }
  double rf(int t, int xl, int xf, int al, int af) const {
    return r_f.at(t, xl, xf, al, af);
  }
  double max_abs_reward() const {
    return std::max(r_l.max_abs(), r_f.max_abs());
  }

  bool operator==(const GameSpec&) const = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      out += v;
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline void check_distribution(const std::vector<double>& p,
                               const std::string& what,
                               std::vector<std::string>& out) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0)
      out.push_back(what + ": negative entry " + std::to_string(i));
    sum += p[i];
  }
  if (std::fabs(sum - 1.0) > kProbTol)
    out.push_back(what + ": sums to " + std::to_string(sum) + ", expected 1");
}

inline void check_kernel(const Kernel& q, const std::string& name,
                         std::vector<std::string>& out) {
  for (int x = 0; x < q.n_states; ++x)
    for (int al = 0; al < q.n_al; ++al)
      for (int af = 0; af < q.n_af; ++af) {
        double sum = 0.0;
        bool neg = false;
        for (int xn = 0; xn < q.n_states; ++xn) {
          const double v = q(x, al, af, xn);
          if (v < 0.0) neg = true;
          sum += v;
        }
        const std::string row = name + " row (x=" + std::to_string(x) +
                                ", a_l=" + std::to_string(al) +
                                ", a_f=" + std::to_string(af) + ")";
        if (neg) out.push_back(row + ": negative entry");
        if (std::fabs(sum - 1.0) > kProbTol)
          out.push_back(row + ": sums to " + std::to_string(sum) +
                        ", expected 1");
      }
}

}  // namespace detail

inline ValidationReport validate_spec(const GameSpec& spec) {
  ValidationReport report;
  auto& out = report.violations;
  if (spec.x_l_states.empty()) out.push_back("leader state set is empty");
  if (spec.x_f_states.empty()) out.push_back("follower state set is empty");
  if (spec.a_l_actions.empty()) out.push_back("leader action set is empty");
  if (spec.a_f_actions.empty()) out.push_back("follower action set is empty");
  if (!out.empty()) return report;

  if (spec.q_l.n_states != spec.nxl() || spec.q_l.n_al != spec.nal() ||
      spec.q_l.n_af != spec.naf())
    out.push_back("leader kernel dimensions do not match state/action sets");
  if (spec.q_f.n_states != spec.nxf() || spec.q_f.n_al != spec.nal() ||
      spec.q_f.n_af != spec.naf())
    out.push_back("follower kernel dimensions do not match state/action sets");
  for (const RewardTensor* r : {&spec.r_l, &spec.r_f}) {
    if (r->n_xl != spec.nxl() || r->n_xf != spec.nxf() ||
        r->n_al != spec.nal() || r->n_af != spec.naf())
      out.push_back("reward tensor dimensions do not match state/action sets");
  }
  if (!out.empty()) return report;

  detail::check_kernel(spec.q_l, "leader kernel", out);
  detail::check_kernel(spec.q_f, "follower kernel", out);
  detail::check_distribution(spec.prior_l, "leader prior", out);
  detail::check_distribution(spec.prior_f, "follower prior", out);
  if (spec.prior_l.size() != spec.x_l_states.size())
    out.push_back("leader prior length does not match state set");
  if (spec.prior_f.size() != spec.x_f_states.size())
    out.push_back("follower prior length does not match state set");

  if (!(spec.delta > 0.0 && spec.delta <= 1.0))
    out.push_back("discount must lie in (0, 1]");
  if (spec.infinite() && spec.delta >= 1.0)
    out.push_back("discount must be < 1 for infinite horizon");
  if (!spec.infinite() && spec.horizon < 1)
    out.push_back("horizon must be a positive integer or infinite");
  if (spec.infinite() &&
      (!spec.r_l.time_homogeneous() || !spec.r_f.time_homogeneous()))
    out.push_back("infinite horizon requires time-homogeneous rewards");
  for (const RewardTensor* r : {&spec.r_l, &spec.r_f}) {
    if (!r->time_homogeneous() && !spec.infinite() &&
        (int)r->slices.size() != spec.horizon)
      out.push_back("per-time reward list length does not match horizon");
  }
  return report;
}

// The repeated security game: binary follower type (static), binary actions
// for both players, dummy singleton leader state, discount 0.6.
// Action order: leader {D1, D2}, follower {A1, A2}.
// Reward pair convention: first coordinate leader/defender, second follower.
inline GameSpec example_security_game(bool swap_payoffs = false) {
  GameSpec g;
  g.x_l_states = {"none"};
  g.x_f_states = {"low", "high"};
  g.a_l_actions = {"D1", "D2"};
  g.a_f_actions = {"A1", "A2"};
  g.q_l = Kernel::identity(1, 2, 2);
  g.q_f = Kernel::identity(2, 2, 2);  // defender type is static
  g.r_l = RewardTensor::zeros(1, 2, 2, 2);
  g.r_f = RewardTensor::zeros(1, 2, 2, 2);
  // (leader, follower) payoffs; rows D1/D2, columns A1/A2.
  const double low[2][2][2] = {{{2, 1}, {4, 0}}, {{1, 0}, {3, 2}}};
  const double high[2][2][2] = {{{3, 2}, {2, 0}}, {{0, 1}, {1, 1}}};
  for (int al = 0; al < 2; ++al)
    for (int af = 0; af < 2; ++af) {
      const int li = swap_payoffs ? 1 : 0;
      g.r_l.set(1, 0, 0, al, af) = low[al][af][li];
      g.r_f.set(1, 0, 0, al, af) = low[al][af][1 - li];
      g.r_l.set(1, 0, 1, al, af) = high[al][af][li];
      g.r_f.set(1, 0, 1, al, af) = high[al][af][1 - li];
    }
  g.delta = 0.6;
  g.horizon = kInfiniteHorizon;
  g.prior_l = {1.0};
  g.prior_f = {0.5, 0.5};
  return g;
}

// ---------------------------------------------------------------------------
// Text format (see README for the grammar). Sections: [states] [actions]
// [discount] [horizon] [priors] [kernels] [rewards].

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_number(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" +
                     tok + "'");
  }
  if (pos != tok.size())
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" +
                     tok + "'");
  return v;
}

inline int parse_index(const std::string& tok, int limit, const std::string& what,
                       int line) {
  int v = -1;
  try {
    v = std::stoi(tok);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected " + what +
                     " index, got '" + tok + "'");
  }
  if (v < 0 || v >= limit)
    throw ParseError("line " + std::to_string(line) + ": " + what + " index " +
                     tok + " out of range [0, " + std::to_string(limit) + ")");
  return v;
}

}  // namespace detail

inline std::string save_spec_to_string(const GameSpec& spec) {
  std::ostringstream os;
  auto names = [&](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ' ';
      s += v[i];
    }
    return s;
  };
  os << "[states]\n";
  os << "leader = " << names(spec.x_l_states) << "\n";
  os << "follower = " << names(spec.x_f_states) << "\n";
  os << "[actions]\n";
  os << "leader = " << names(spec.a_l_actions) << "\n";
  os << "follower = " << names(spec.a_f_actions) << "\n";
  os << "[discount]\n" << detail::fmt_double(spec.delta) << "\n";
  os << "[horizon]\n";
  if (spec.infinite())
    os << "infinite\n";
  else
    os << spec.horizon << "\n";
  os << "[priors]\n";
  os << "leader =";
  for (double v : spec.prior_l) os << ' ' << detail::fmt_double(v);
  os << "\nfollower =";
  for (double v : spec.prior_f) os << ' ' << detail::fmt_double(v);
  os << "\n[kernels]\n";
  auto dump_kernel = [&](const Kernel& q, const char* who) {
    for (int x = 0; x < q.n_states; ++x)
      for (int al = 0; al < q.n_al; ++al)
        for (int af = 0; af < q.n_af; ++af) {
          os << who << ' ' << x << ' ' << al << ' ' << af << " =";
          for (int xn = 0; xn < q.n_states; ++xn)
            os << ' ' << detail::fmt_double(q(x, al, af, xn));
          os << "\n";
        }
  };
  dump_kernel(spec.q_l, "leader");
  dump_kernel(spec.q_f, "follower");
  os << "[rewards]\n";
  auto dump_rewards = [&](const RewardTensor& r, const char* who) {
    for (std::size_t s = 0; s < r.slices.size(); ++s)
      for (int xl = 0; xl < r.n_xl; ++xl)
        for (int xf = 0; xf < r.n_xf; ++xf)
          for (int al = 0; al < r.n_al; ++al) {
            os << who;
            if (r.slices.size() > 1) os << " t" << (s + 1);
            os << ' ' << xl << ' ' << xf << ' ' << al << " =";
            for (int af = 0; af < r.n_af; ++af)
              os << ' '
                 << detail::fmt_double(r.slices[s][r.flat(xl, xf, al, af)]);
            os << "\n";
          }
  };
  dump_rewards(spec.r_l, "leader");
  dump_rewards(spec.r_f, "follower");
  return os.str();
}

inline void save_spec(const GameSpec& spec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << save_spec_to_string(spec);
}

inline GameSpec load_spec_from_string(const std::string& text) {
  GameSpec spec;
  spec.delta = -1.0;
  spec.horizon = 0;

  std::istringstream is(text);
  std::string raw;
  int line = 0;
  std::string section;
  bool have_states = false, have_actions = false;
  std::vector<bool> seen_ql, seen_qf;
  // reward rows seen, per player, keyed (slice, xl, xf, al)
  std::vector<std::vector<bool>> seen_rl, seen_rf;
  int t_slices_l = 1, t_slices_f = 1;

  auto ensure_dims = [&](int l) {
    if (!have_states || !have_actions)
      throw ParseError("line " + std::to_string(l) +
                       ": [states] and [actions] must precede kernels/rewards");
    if (spec.q_l.p.empty()) {
      spec.q_l = Kernel::zeros(spec.nxl(), spec.nal(), spec.naf());
      spec.q_f = Kernel::zeros(spec.nxf(), spec.nal(), spec.naf());
      spec.r_l = RewardTensor::zeros(spec.nxl(), spec.nxf(), spec.nal(), spec.naf());
      spec.r_f = RewardTensor::zeros(spec.nxl(), spec.nxf(), spec.nal(), spec.naf());
      seen_ql.assign(spec.q_l.p.size() / spec.nxl(), false);
      seen_qf.assign(spec.q_f.p.size() / spec.nxf(), false);
      seen_rl.assign(1, std::vector<bool>(spec.r_l.slices[0].size() / spec.naf(), false));
      seen_rf = seen_rl;
    }
  };

  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto toks = detail::split_ws(s);
    if (toks.empty()) continue;
    if (toks[0].front() == '[') {
      if (toks.size() != 1 || toks[0].back() != ']')
        throw ParseError("line " + std::to_string(line) + ": malformed section header");
      section = toks[0].substr(1, toks[0].size() - 2);
      continue;
    }
    if (section == "states" || section == "actions") {
      if (toks.size() < 3 || toks[1] != "=" ||
          (toks[0] != "leader" && toks[0] != "follower"))
        throw ParseError("line " + std::to_string(line) +
                         ": expected 'leader|follower = name...'");
      std::vector<std::string> names(toks.begin() + 2, toks.end());
      if (section == "states")
        (toks[0] == "leader" ? spec.x_l_states : spec.x_f_states) = names;
      else
        (toks[0] == "leader" ? spec.a_l_actions : spec.a_f_actions) = names;
      have_states = !spec.x_l_states.empty() && !spec.x_f_states.empty();
      have_actions = !spec.a_l_actions.empty() && !spec.a_f_actions.empty();
    } else if (section == "discount") {
      spec.delta = detail::parse_number(toks[0], line);
    } else if (section == "horizon") {
      if (toks[0] == "infinite")
        spec.horizon = kInfiniteHorizon;
      else {
        spec.horizon = detail::parse_index(toks[0], 1 << 30, "horizon", line);
        if (spec.horizon < 1)
          throw ParseError("line " + std::to_string(line) + ": horizon must be >= 1");
      }
    } else if (section == "priors") {
      if (toks.size() < 3 || toks[1] != "=" ||
          (toks[0] != "leader" && toks[0] != "follower"))
        throw ParseError("line " + std::to_string(line) +
                         ": expected 'leader|follower = p...'");
      std::vector<double> p;
      for (std::size_t i = 2; i < toks.size(); ++i)
        p.push_back(detail::parse_number(toks[i], line));
      (toks[0] == "leader" ? spec.prior_l : spec.prior_f) = p;
    } else if (section == "kernels") {
      ensure_dims(line);
      if (toks.size() < 5 || (toks[0] != "leader" && toks[0] != "follower"))
        throw ParseError("line " + std::to_string(line) +
                         ": expected 'leader|follower x a_l a_f = p...'");
      const bool is_l = toks[0] == "leader";
      Kernel& q = is_l ? spec.q_l : spec.q_f;
      const int x = detail::parse_index(toks[1], q.n_states, "state", line);
      const int al = detail::parse_index(toks[2], spec.nal(), "leader action", line);
      const int af = detail::parse_index(toks[3], spec.naf(), "follower action", line);
      if (toks[4] != "=")
        throw ParseError("line " + std::to_string(line) + ": expected '='");
      if ((int)toks.size() - 5 != q.n_states)
        throw ParseError("line " + std::to_string(line) + ": kernel row needs " +
                         std::to_string(q.n_states) + " entries");
      for (int xn = 0; xn < q.n_states; ++xn)
        q.at(x, al, af, xn) = detail::parse_number(toks[5 + xn], line);
      auto& seen = is_l ? seen_ql : seen_qf;
      seen[q.row_offset(x, al, af) / q.n_states] = true;
    } else if (section == "rewards") {
      ensure_dims(line);
      if (toks.size() < 2 || (toks[0] != "leader" && toks[0] != "follower"))
        throw ParseError("line " + std::to_string(line) +
                         ": expected 'leader|follower [tK] x_l x_f a_l = v...'");
      const bool is_l = toks[0] == "leader";
      RewardTensor& r = is_l ? spec.r_l : spec.r_f;
      auto& seen = is_l ? seen_rl : seen_rf;
      int& n_slices = is_l ? t_slices_l : t_slices_f;
      std::size_t arg = 1;
      int slice = 0;
      if (toks.size() > 1 && toks[1].size() > 1 && toks[1][0] == 't' &&
          std::isdigit(static_cast<unsigned char>(toks[1][1]))) {
        slice = detail::parse_index(toks[1].substr(1), 1 << 30, "time", line) - 1;
        if (slice < 0)
          throw ParseError("line " + std::to_string(line) + ": time index must be >= 1");
        ++arg;
      }
      if (toks.size() < arg + 5)
        throw ParseError("line " + std::to_string(line) +
                         ": expected 'leader|follower [tK] x_l x_f a_l = v...'");
      const int xl = detail::parse_index(toks[arg + 0], spec.nxl(), "leader state", line);
      const int xf = detail::parse_index(toks[arg + 1], spec.nxf(), "follower state", line);
      const int al = detail::parse_index(toks[arg + 2], spec.nal(), "leader action", line);
      if (toks[arg + 3] != "=")
        throw ParseError("line " + std::to_string(line) + ": expected '='");
      if ((int)(toks.size() - arg - 4) != spec.naf())
        throw ParseError("line " + std::to_string(line) + ": reward row needs " +
                         std::to_string(spec.naf()) + " entries");
      while ((int)r.slices.size() <= slice) {
        r.slices.push_back(r.slices[0]);
        seen.push_back(std::vector<bool>(seen[0].size(), false));
      }
      n_slices = std::max(n_slices, slice + 1);
      for (int af = 0; af < spec.naf(); ++af)
        r.slices[slice][r.flat(xl, xf, al, af)] =
            detail::parse_number(toks[arg + 4 + af], line);
      seen[slice][r.flat(xl, xf, al, 0) / spec.naf()] = true;
    } else if (section.empty()) {
      throw ParseError("line " + std::to_string(line) + ": content before any section");
    } else {
      throw ParseError("line " + std::to_string(line) + ": unknown section [" +
                       section + "]");
    }
  }

  if (!have_states) throw ParseError("missing [states] section");
  if (!have_actions) throw ParseError("missing [actions] section");
  if (spec.delta < 0.0) throw ParseError("missing [discount] section");
  if (spec.horizon == 0) throw ParseError("missing [horizon] section");
  if (spec.prior_l.empty() || spec.prior_f.empty())
    throw ParseError("missing [priors] section");
  if (spec.q_l.p.empty()) throw ParseError("missing [kernels] section");

  auto check_seen = [&](const std::vector<bool>& seen, const char* what,
                        auto describe) {
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw ParseError(std::string("missing ") + what + " entry " + describe(i));
  };
  check_seen(seen_ql, "leader kernel", [&](std::size_t i) {
    const int af = (int)(i % spec.naf()), al = (int)(i / spec.naf() % spec.nal());
    const int x = (int)(i / spec.naf() / spec.nal());
    return "(x=" + std::to_string(x) + ", a_l=" + std::to_string(al) +
           ", a_f=" + std::to_string(af) + ")";
  });
  check_seen(seen_qf, "follower kernel", [&](std::size_t i) {
    const int af = (int)(i % spec.naf()), al = (int)(i / spec.naf() % spec.nal());
    const int x = (int)(i / spec.naf() / spec.nal());
    return "(x=" + std::to_string(x) + ", a_l=" + std::to_string(al) +
           ", a_f=" + std::to_string(af) + ")";
  });
  auto describe_reward = [&](std::size_t i) {
    const int al = (int)(i % spec.nal()), xf = (int)(i / spec.nal() % spec.nxf());
    const int xl = (int)(i / spec.nal() / spec.nxf());
    return "(x_l=" + std::to_string(xl) + ", x_f=" + std::to_string(xf) +
           ", a_l=" + std::to_string(al) + ")";
  };
  for (const auto& s : seen_rl) check_seen(s, "leader reward", describe_reward);
  for (const auto& s : seen_rf) check_seen(s, "follower reward", describe_reward);

  ValidationReport report = validate_spec(spec);
  if (!report.ok())
    throw ValidationError("spec failed validation:\n" + report.to_string());
  return spec;
}

inline GameSpec load_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_spec_from_string(ss.str());
}

}  // namespace dynstack

#endif  // DYNSTACK_GAME_HPP
