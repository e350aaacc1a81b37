#include "pisynth/sysmodel.hpp"

#include <algorithm>
#include <set>

namespace pisynth {

ControlAffineSystem ControlAffineSystem::make(std::vector<std::string> states, std::vector<Expr> f,
                                              std::vector<Expr> g, Point params,
                                              std::string time) {
  ControlAffineSystem s{std::move(states), std::move(f), std::move(g), std::move(params),
                        std::move(time)};
  validate(s);
  return s;
}

std::vector<std::string> ControlAffineSystem::symbols() const {
  std::vector<std::string> out = states;
  for (const auto& [name, _] : params) out.push_back(name);
  if (!time.empty()) out.push_back(time);
  return out;
}

bool ControlAffineSystem::knows(const std::string& name) const {
  return std::find(states.begin(), states.end(), name) != states.end() || params.count(name) > 0 ||
         (!time.empty() && name == time);
}

std::size_t ControlAffineSystem::index_of(const std::string& state) const {
  auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) throw InvalidSystem("no state named '" + state + "'");
  return static_cast<std::size_t>(it - states.begin());
}

void validate(const ControlAffineSystem& sys) {
  const std::size_t n = sys.states.size();
  if (n == 0) throw InvalidSystem("system has no states");
  if (sys.f.size() != n || sys.g.size() != n)
    throw InvalidSystem("f and g must both have one entry per state");
  std::set<std::string> names;
  for (const auto& s : sys.symbols())
    if (!names.insert(s).second) throw InvalidSystem("name '" + s + "' declared twice");
  for (std::size_t i = 0; i < n; ++i)
    for (const Expr* e : {&sys.f[i], &sys.g[i]})
      for (const auto& s : free_symbols(*e))
        if (!names.count(s))
          throw InvalidSystem("row " + std::to_string(i + 1) + " uses undeclared symbol '" + s + "'");
}

Expr substitute_params(const Expr& e, const Point& params) { return bind_values(e, params); }

ControlAffineSystem bind_params(const ControlAffineSystem& sys, const Point& values) {
  Point all = sys.params;
  for (const auto& [k, v] : values) {
    if (!sys.params.count(k)) throw InvalidSystem("unknown parameter '" + k + "'");
    all[k] = v;
  }
  ControlAffineSystem out = sys;
  for (auto& e : out.f) e = bind_values(e, all);
  for (auto& e : out.g) e = bind_values(e, all);
  out.params.clear();
  return out;
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::GenericPI: return "generic-PI";
    case Provenance::Psf: return "psf";
    case Provenance::Feedforward: return "feedforward";
    case Provenance::Nontriangular: return "nontriangular";
    case Provenance::CatalogReference: return "catalog-reference";
  }
  return "?";
}

std::vector<Expr> closed_loop(const ControlAffineSystem& sys, const ControlLaw& law) {
  for (const auto& s : free_symbols(law.u))
    if (!sys.knows(s)) throw SymbolMismatch(s);
  std::vector<Expr> out;
  out.reserve(sys.dim());
  for (std::size_t i = 0; i < sys.dim(); ++i) out.push_back(sys.f[i] + sys.g[i] * law.u);
  return out;
}

void validate(const TargetDynamics& t, const ControlAffineSystem& sys) {
  if (t.eta.empty() || t.eta.size() >= sys.dim())
    throw InvalidSystem("target dimension must satisfy 0 < h < n");
  if (t.beta.size() != t.eta.size()) throw InvalidSystem("beta must have one entry per eta");
  if (t.pi.size() != sys.dim()) throw InvalidSystem("pi must have one entry per state");
  std::set<std::string> allowed(t.eta.begin(), t.eta.end());
  for (const auto& [p, _] : sys.params) allowed.insert(p);
  for (const auto& v : {t.beta, t.pi})
    for (const auto& e : v)
      for (const auto& s : free_symbols(e))
        if (!allowed.count(s)) throw InvalidSystem("target map uses unknown symbol '" + s + "'");
}

}  // namespace pisynth
