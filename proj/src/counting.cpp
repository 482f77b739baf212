#include "rw/counting.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "rw/compiled.hpp"
#include "rw/errors.hpp"
#include "rw/world.hpp"

namespace rw {

const char* method_name(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Naive: return "exact";
    case Method::Unary: return "unary";
  }
  return "?";
}

std::uint64_t parse_budget(const std::string& text) {
  try {
    if (text.rfind("2^", 0) == 0) {
      std::size_t used = 0;
      unsigned long e = std::stoul(text.substr(2), &used);
      if (used != text.size() - 2 || e > 63) throw Error("bad exponent");
      return std::uint64_t{1} << e;
    }
    std::size_t used = 0;
    unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || v == 0 || text[0] == '-') throw Error("bad value");
    return v;
  } catch (const std::exception&) {
    throw Error("a budget must be a positive integer or 2^k with k <= 63, got '" + text + "'");
  }
}

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("RW_BUDGET");
  if (!env || !*env) return fallback;
  try {
    return parse_budget(env);
  } catch (const Error& e) {
    throw Error(std::string("RW_BUDGET: ") + e.what());
  }
}

std::string CondProb::str() const { return defined ? mpq_str(value) : "undefined"; }

mpz_class total_worlds(const Vocabulary& vocab, unsigned N) {
  mpz_class out = 1;
  mpz_class n = N;
  for (const auto& p : vocab.predicates()) {
    mpz_class tuples;
    mpz_pow_ui(tuples.get_mpz_t(), n.get_mpz_t(), p.arity);
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 2, tuples.get_ui());
    out *= t;
  }
  mpz_class c;
  mpz_pow_ui(c.get_mpz_t(), n.get_mpz_t(), vocab.constants().size());
  return out * c;
}

mpz_class naive_cost(const Vocabulary& vocab, unsigned N) { return total_worlds(vocab, N); }

mpz_class unary_cost(std::size_t atoms, std::size_t constants, unsigned N) {
  if (atoms == 0) return 0;
  mpz_class compositions;
  mpz_bin_uiui(compositions.get_mpz_t(), N + atoms - 1, atoms - 1);
  mpz_class patterns;
  mpz_ui_pow_ui(patterns.get_mpz_t(), atoms, constants);
  return compositions * patterns;
}

namespace {

void check_budget(const mpz_class& cost, std::uint64_t budget, const std::string& what) {
  if (cost > mpz_class(std::to_string(budget))) throw BudgetExceeded(what, cost.get_str(), std::to_string(budget));
}

std::size_t words_for(std::size_t bits) { return bits / 64 + 2; }

// ---------------------------------------------------------------- naive

struct Targets {
  std::vector<CompiledFormula> kbs;
  std::vector<CompiledFormula> queries;
  std::vector<int> query_of;
};

struct Tally {
  std::vector<std::uint64_t> kb, joint;
};

// Evaluates all targets on one world and adds `weight` where they hold.
template <class Add>
void visit(const Targets& t, const PackedWorld& w, std::vector<signed char>& qcache, Add&& add) {
  std::fill(qcache.begin(), qcache.end(), -1);
  for (std::size_t i = 0; i < t.kbs.size(); ++i) {
    if (!t.kbs[i].eval(w)) continue;
    bool joint = false;
    int q = t.query_of[i];
    if (q >= 0) {
      if (qcache[q] < 0) qcache[q] = t.queries[q].eval(w) ? 1 : 0;
      joint = qcache[q] == 1;
    }
    add(i, joint);
  }
}

BatchCounts naive(const Vocabulary& vocab, unsigned N, const Targets& t, const CountOptions& opts) {
  std::size_t bits = table_bits(vocab, N);
  std::size_t m = vocab.constants().size();
  mpz_class cost = naive_cost(vocab, N);
  check_budget(cost, opts.budget, "naive enumeration of all worlds at N=" + std::to_string(N));
  if (bits > 62) throw BudgetExceeded("naive enumeration needs " + std::to_string(bits) + " table bits",
                                      cost.get_str(), std::to_string(opts.budget));
  std::uint64_t total = cost.get_ui();
  std::uint64_t per_const = std::uint64_t{1} << bits;

  unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(total)));
  std::vector<Tally> tallies(threads, Tally{std::vector<std::uint64_t>(t.kbs.size()),
                                            std::vector<std::uint64_t>(t.kbs.size())});
  auto work = [&](unsigned id) {
    std::uint64_t lo = total / threads * id + std::min<std::uint64_t>(id, total % threads);
    std::uint64_t hi = lo + total / threads + (id < total % threads ? 1 : 0);
    std::vector<std::uint64_t> words(words_for(bits), 0);
    std::vector<unsigned> consts(m + 1, 0);
    std::vector<signed char> qcache(t.queries.size());
    Tally& tally = tallies[id];
    std::uint64_t c = lo / per_const;
    for (std::size_t i = 0; i < m; ++i) {
      consts[i] = static_cast<unsigned>(c % N);
      c /= N;
    }
    std::uint64_t b = lo % per_const;
    PackedWorld w{N, words.data(), consts.data()};
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      words[0] = b;
      visit(t, w, qcache, [&](std::size_t i, bool joint) {
        ++tally.kb[i];
        if (joint) ++tally.joint[i];
      });
      if (++b == per_const) {
        b = 0;
        for (std::size_t i = 0; i < m; ++i) {
          if (++consts[i] < N) break;
          consts[i] = 0;
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  BatchCounts out;
  out.method = Method::Naive;
  out.total = cost;
  out.kb.assign(t.kbs.size(), 0);
  out.joint.assign(t.kbs.size(), 0);
  for (const auto& tally : tallies)
    for (std::size_t i = 0; i < t.kbs.size(); ++i) {
      out.kb[i] += mpz_class(std::to_string(tally.kb[i]));
      out.joint[i] += mpz_class(std::to_string(tally.joint[i]));
    }
  return out;
}

// ---------------------------------------------------------------- unary

// Atom j asserts predicate i positively iff bit (k-1-i) of j is clear, so
// atom 0 is P1 and ... and Pk, and the last atom is all negative.
bool atom_has(std::size_t atom, std::size_t pred, std::size_t k) { return !((atom >> (k - 1 - pred)) & 1); }

// Truth of a quantifier-free formula in one variable over unary predicates
// at an atom; nullopt when the formula has another shape.
std::optional<bool> eval_at_atom(const Formula& f, const std::string& var, const Vocabulary& vocab,
                                 std::size_t atom) {
  const auto& ps = vocab.predicates();
  switch (f.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Predicate: {
      if (f.args.size() != 1 || f.args[0].kind != Term::Kind::Variable || f.args[0].name != var) return std::nullopt;
      auto it = std::find_if(ps.begin(), ps.end(), [&](const Symbol& s) { return s.name == f.symbol; });
      if (it == ps.end()) return std::nullopt;
      return atom_has(atom, static_cast<std::size_t>(it - ps.begin()), ps.size());
    }
    case FormulaKind::Not: {
      auto a = eval_at_atom(f.sub[0], var, vocab, atom);
      if (!a) return std::nullopt;
      return !*a;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff: {
      auto a = eval_at_atom(f.sub[0], var, vocab, atom);
      auto b = eval_at_atom(f.sub[1], var, vocab, atom);
      if (!a || !b) return std::nullopt;
      if (f.kind == FormulaKind::And) return *a && *b;
      if (f.kind == FormulaKind::Or) return *a || *b;
      if (f.kind == FormulaKind::Implies) return !*a || *b;
      return *a == *b;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<std::vector<bool>> atom_mask(const Vocabulary& vocab, const Formula& f, const std::string& var) {
  std::size_t atoms = std::size_t{1} << vocab.predicates().size();
  std::vector<bool> out(atoms);
  for (std::size_t j = 0; j < atoms; ++j) {
    auto v = eval_at_atom(f, var, vocab, j);
    if (!v) return std::nullopt;
    out[j] = *v;
  }
  return out;
}

namespace {

// Atoms that may be nonempty in a world satisfying f, judged from its
// top-level universal conjuncts.
std::vector<bool> usable_atoms(const Vocabulary& vocab, const Formula& f) {
  std::size_t atoms = std::size_t{1} << vocab.predicates().size();
  std::vector<bool> ok(atoms, true);
  for (const auto& c : conjuncts(f)) {
    const Formula* body = nullptr;
    bool negate = false;
    if (c.kind == FormulaKind::Forall) body = &c;
    if (c.kind == FormulaKind::Not && c.sub[0].kind == FormulaKind::Exists) {
      body = &c.sub[0];
      negate = true;
    }
    if (!body) continue;
    for (std::size_t j = 0; j < atoms; ++j) {
      auto v = eval_at_atom(body->sub[0], body->var, vocab, j);
      if (!v) break;
      if (*v == negate) ok[j] = false;
    }
  }
  return ok;
}

struct UnaryJob {
  const Vocabulary* vocab;
  unsigned N;
  std::size_t k, m;
  std::vector<std::size_t> atoms;        // usable atoms, enumeration order
  std::vector<CompiledFormula> cf;       // constant-free part of each KB
  std::vector<CompiledFormula> rest;     // the remaining conjuncts
  std::vector<bool> has_rest;
  const Targets* targets;
  std::vector<mpz_class> fact;
};

struct UnaryState {
  const UnaryJob* job;
  std::vector<unsigned> n;                // count per usable atom
  std::vector<unsigned> start;            // first element of each usable atom
  std::vector<std::uint64_t> pred_mask;   // per predicate
  std::vector<std::uint64_t> words;
  std::vector<unsigned> consts;
  std::vector<unsigned> used;             // elements of each atom taken by constants
  std::vector<signed char> qcache;
  std::vector<bool> cf_pass;
  std::vector<std::uint64_t> pat_kb, pat_joint;
  std::vector<mpz_class> kb, joint;
  mpz_class weight;

  void write_tables() {
    std::fill(words.begin(), words.end(), 0);
    const unsigned N = job->N;
    for (std::size_t i = 0; i < job->k; ++i) {
      std::size_t off = i * N;
      words[off >> 6] |= pred_mask[i] << (off & 63);
      if ((off & 63) && (off & 63) + N > 64) words[(off >> 6) + 1] |= pred_mask[i] >> (64 - (off & 63));
    }
  }

  // Assigns constants c.. to elements; `pw` is the falling-factorial weight.
  void patterns(std::size_t c, std::uint64_t pw) {
    if (c == job->m) {
      PackedWorld w{job->N, words.data(), consts.data()};
      std::fill(qcache.begin(), qcache.end(), -1);
      for (std::size_t i = 0; i < job->cf.size(); ++i) {
        if (!cf_pass[i]) continue;
        if (job->has_rest[i] && !job->rest[i].eval(w)) continue;
        pat_kb[i] += pw;
        int q = job->targets->query_of[i];
        if (q >= 0) {
          if (qcache[q] < 0) qcache[q] = job->targets->queries[q].eval(w) ? 1 : 0;
          if (qcache[q] == 1) pat_joint[i] += pw;
        }
      }
      return;
    }
    // Same element as an earlier constant: one choice per distinct earlier
    // element, so only reuse the first constant of each block.
    for (std::size_t d = 0; d < c; ++d) {
      bool first = true;
      for (std::size_t e = 0; e < d; ++e)
        if (consts[e] == consts[d]) first = false;
      if (!first) continue;
      consts[c] = consts[d];
      patterns(c + 1, pw);
    }
    // A fresh element inside some atom.
    for (std::size_t a = 0; a < job->atoms.size(); ++a) {
      if (used[a] >= n[a]) continue;
      consts[c] = start[a] + used[a];
      std::uint64_t choices = n[a] - used[a];
      ++used[a];
      patterns(c + 1, pw * choices);
      --used[a];
    }
  }

  void leaf() {
    write_tables();
    PackedWorld w{job->N, words.data(), consts.data()};
    bool any = false;
    for (std::size_t i = 0; i < job->cf.size(); ++i) {
      cf_pass[i] = job->cf[i].eval(w);
      any = any || cf_pass[i];
    }
    if (!any) return;
    std::fill(pat_kb.begin(), pat_kb.end(), 0);
    std::fill(pat_joint.begin(), pat_joint.end(), 0);
    patterns(0, 1);
    // multinomial(N; n)
    weight = job->fact[job->N];
    for (unsigned v : n) weight /= job->fact[v];
    for (std::size_t i = 0; i < kb.size(); ++i) {
      if (pat_kb[i]) kb[i] += weight * mpz_class(std::to_string(pat_kb[i]));
      if (pat_joint[i]) joint[i] += weight * mpz_class(std::to_string(pat_joint[i]));
    }
  }

  void compose(std::size_t a, unsigned remaining, unsigned at) {
    const auto& atoms = job->atoms;
    if (a + 1 == atoms.size()) {
      place(a, remaining, at);
      leaf();
      unplace(a);
      return;
    }
    for (unsigned v = 0; v <= remaining; ++v) {
      place(a, v, at);
      compose(a + 1, remaining - v, at + v);
      unplace(a);
    }
  }

  void place(std::size_t a, unsigned v, unsigned at) {
    n[a] = v;
    start[a] = at;
    std::uint64_t range = v == 0 ? 0 : (v == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << v) - 1) << at);
    for (std::size_t i = 0; i < job->k; ++i)
      if (atom_has(job->atoms[a], i, job->k)) pred_mask[i] |= range;
  }

  void unplace(std::size_t a) {
    std::uint64_t range =
        n[a] == 0 ? 0 : (n[a] == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n[a]) - 1) << start[a]);
    for (std::size_t i = 0; i < job->k; ++i)
      if (atom_has(job->atoms[a], i, job->k)) pred_mask[i] &= ~range;
    n[a] = 0;
  }
};

BatchCounts unary(const Vocabulary& vocab, unsigned N, const std::vector<Formula>& kbs, const Targets& t,
                  const CountOptions& opts) {
  if (!vocab.is_unary())
    throw UnsupportedFeature("the atom-count path needs a vocabulary of unary predicates and constants");
  if (N > CompiledFormula::kMaxDomain) throw UnsupportedFeature("unary path supports N <= 64");
  UnaryJob job;
  job.vocab = &vocab;
  job.N = N;
  job.k = vocab.predicates().size();
  job.m = vocab.constants().size();
  job.targets = &t;
  if (job.k > 20) throw UnsupportedFeature("too many predicates for the atom-count path");
  std::size_t atoms = std::size_t{1} << job.k;
  std::vector<bool> usable(atoms, false);
  for (const auto& f : kbs) {
    auto u = usable_atoms(vocab, f);
    for (std::size_t j = 0; j < atoms; ++j) usable[j] = usable[j] || u[j];
  }
  for (std::size_t j = 0; j < atoms; ++j)
    if (usable[j]) job.atoms.push_back(j);

  mpz_class cost = unary_cost(job.atoms.size(), job.m, N);
  check_budget(cost, opts.budget, "atom-count classes at N=" + std::to_string(N));

  for (const auto& f : kbs) {
    std::vector<Formula> free_part, rest;
    for (const auto& c : conjuncts(f)) (constants_of(c).empty() ? free_part : rest).push_back(c);
    job.cf.emplace_back(vocab, N, Formula::all_of(free_part));
    job.has_rest.push_back(!rest.empty());
    job.rest.emplace_back(vocab, N, Formula::all_of(rest));
  }
  job.fact.resize(N + 1);
  job.fact[0] = 1;
  for (unsigned i = 1; i <= N; ++i) job.fact[i] = job.fact[i - 1] * i;

  BatchCounts out;
  out.method = Method::Unary;
  out.total = total_worlds(vocab, N);
  out.kb.assign(kbs.size(), 0);
  out.joint.assign(kbs.size(), 0);
  if (job.atoms.empty()) return out;

  auto make_state = [&]() {
    UnaryState s;
    s.job = &job;
    s.n.assign(job.atoms.size(), 0);
    s.start.assign(job.atoms.size(), 0);
    s.pred_mask.assign(job.k, 0);
    s.words.assign(words_for(job.k * N), 0);
    s.consts.assign(job.m + 1, 0);
    s.used.assign(job.atoms.size(), 0);
    s.qcache.assign(t.queries.size(), -1);
    s.cf_pass.assign(kbs.size(), false);
    s.pat_kb.assign(kbs.size(), 0);
    s.pat_joint.assign(kbs.size(), 0);
    s.kb.assign(kbs.size(), 0);
    s.joint.assign(kbs.size(), 0);
    return s;
  };

  // Work items: the count of the first usable atom. Items are dealt
  // round-robin, and exact sums make the result independent of the split.
  unsigned threads = std::max(1u, std::min(opts.threads, N + 1));
  std::vector<UnaryState> states;
  for (unsigned i = 0; i < threads; ++i) states.push_back(make_state());
  auto work = [&](unsigned id) {
    UnaryState& s = states[id];
    for (unsigned v = id; v <= N; v += threads) {
      if (job.atoms.size() == 1) {
        if (v != N) continue;
        s.place(0, N, 0);
        s.leaf();
        s.unplace(0);
        continue;
      }
      s.place(0, v, 0);
      s.compose(1, N - v, v);
      s.unplace(0);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  for (const auto& s : states)
    for (std::size_t i = 0; i < kbs.size(); ++i) {
      out.kb[i] += s.kb[i];
      out.joint[i] += s.joint[i];
    }
  return out;
}

Targets compile_targets(const Vocabulary& vocab, unsigned N, const std::vector<Formula>& kbs,
                        const std::vector<Formula>& queries, const std::vector<int>& query_of) {
  if (query_of.size() != kbs.size()) throw Error("query_of must have one entry per KB");
  Targets t;
  for (const auto& f : kbs) t.kbs.emplace_back(vocab, N, f);
  for (const auto& q : queries) t.queries.emplace_back(vocab, N, q);
  for (int q : query_of)
    if (q >= static_cast<int>(queries.size())) throw Error("query index out of range");
  t.query_of = query_of;
  return t;
}

}  // namespace

BatchCounts count_batch(const Vocabulary& vocab, unsigned N, const std::vector<Formula>& ground_kbs,
                        const std::vector<Formula>& ground_queries, const std::vector<int>& query_of,
                        const CountOptions& opts) {
  if (N == 0) throw Error("domain size must be at least 1");
  if (!vocab.functions().empty())
    throw UnsupportedFeature("function symbol '" + vocab.functions().front().name +
                             "' is not supported by the counting engine");
  Targets t = compile_targets(vocab, N, ground_kbs, ground_queries, query_of);
  Method m = opts.method;
  if (m == Method::Auto) m = vocab.is_unary() ? Method::Unary : Method::Naive;
  if (m == Method::Unary) return unary(vocab, N, ground_kbs, t, opts);
  return naive(vocab, N, t, opts);
}

WorldCount count_worlds(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol, const Formula& f,
                        const CountOptions& opts) {
  BatchCounts b = count_batch(vocab, N, {ground(f, tol)}, {}, {-1}, opts);
  return {b.kb[0], b.total};
}

WorldCount unary_count(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol, const Formula& f,
                       const CountOptions& opts) {
  CountOptions o = opts;
  o.method = Method::Unary;
  return count_worlds(vocab, N, tol, f, o);
}

CondProb conditional_probability(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol,
                                 const Formula& query, const Formula& kb, const CountOptions& opts) {
  return conditional_probabilities(vocab, N, {tol}, query, kb, opts).front();
}

std::vector<CondProb> conditional_probabilities(const Vocabulary& vocab, unsigned N,
                                                const std::vector<ToleranceVector>& stages, const Formula& query,
                                                const Formula& kb, const CountOptions& opts) {
  std::vector<Formula> kbs, queries;
  std::vector<int> query_of;
  bool query_depends = !tolerance_indices(query).empty() || has_approximate_parts(query);
  for (const auto& tol : stages) {
    kbs.push_back(ground(kb, tol));
    if (query_depends || queries.empty()) queries.push_back(ground(query, tol));
    query_of.push_back(static_cast<int>(queries.size()) - 1);
  }
  BatchCounts b = count_batch(vocab, N, kbs, queries, query_of, opts);
  std::vector<CondProb> out;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    CondProb p;
    p.kb_count = b.kb[i];
    p.joint_count = b.joint[i];
    p.defined = b.kb[i] > 0;
    if (p.defined) {
      p.value = mpq_class(b.joint[i], b.kb[i]);
      p.value.canonicalize();
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace rw
