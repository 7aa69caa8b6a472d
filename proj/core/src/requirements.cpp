#include "inflam/requirements.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "inflam/errors.hpp"

namespace inflam {

namespace {

constexpr double kSignTol = 1e-8;
constexpr double kAnchorTol = 1e-10;
constexpr int kBoundSearchDoublings = 20;

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

struct Sample {
  PointState state;
  NonlocalValues nonlocal;
};

using Terms = std::vector<const MechanismTerm*>;

// Shared sampling context for one model.
class Checker {
 public:
  Checker(const ModelDefinition& model, const SampleSpec& spec)
      : model_(model),
        spec_(spec),
        boxes_(sampling_boxes(model)),
        qr_(model.components.size() + 2, spec.seed) {
    chi_max_ = 1.0 / model.theta.area();
    integral_max_ = 1.0;
    for (std::size_t c = 0; c < model.components.size(); ++c)
      if (model.components[c].role == ComponentRole::Virus) integral_max_ = boxes_[c].upper;
  }

  std::size_t budget() const { return spec_.points_per_rule; }
  const ModelDefinition& model() const { return model_; }

  double upper(const std::string& comp) const { return boxes_[*model_.component_index(comp)].upper; }

  // k-th quasi-random point of the invariant box (including nonlocal inputs).
  Sample sample(std::size_t k) const {
    const auto u = qr_.point(k + 1);
    Sample s;
    for (std::size_t c = 0; c < boxes_.size(); ++c) s.state[boxes_[c].name] = u[c] * boxes_[c].upper;
    s.nonlocal[std::string(kChiThetaKey)] = u[boxes_.size()] * chi_max_;
    s.nonlocal[std::string(kVirusIntegralKey)] = u[boxes_.size() + 1] * integral_max_;
    return s;
  }

  Terms terms(const std::string& target, MechanismGroup group) const {
    Terms out;
    for (const auto& t : model_.reaction_terms)
      if (t.target == target && kind_info(t.kind).group == group) out.push_back(&t);
    return out;
  }

  Terms all_terms(const std::string& target) const {
    Terms out;
    for (const auto& t : model_.reaction_terms)
      if (t.target == target) out.push_back(&t);
    return out;
  }

  std::vector<std::string> components(std::function<bool(ComponentRole)> pred) const {
    std::vector<std::string> out;
    for (const auto& c : model_.components)
      if (pred(c.role)) out.push_back(c.name);
    return out;
  }

 private:
  const ModelDefinition& model_;
  SampleSpec spec_;
  std::vector<ComponentBox> boxes_;
  QuasiRandom qr_;
  double chi_max_ = 1.0;
  double integral_max_ = 1.0;
};

double sum_value(const Terms& terms, const Sample& s) {
  double v = 0.0;
  for (const auto* t : terms) v += eval_term(*t, s.state, {}, s.nonlocal);
  return v;
}

double sum_derivative(const Terms& terms, const std::string& wrt, const Sample& s) {
  double v = 0.0;
  for (const auto* t : terms) v += eval_term_derivative(*t, wrt, s.state, {}, s.nonlocal);
  return v;
}

RuleResult not_applicable(const std::string& id, std::string why) {
  RuleResult r;
  r.id = id;
  r.verdict = Verdict::NotApplicable;
  r.detail = std::move(why);
  return r;
}

RuleResult vacuous_pass(const std::string& id, std::string why) {
  RuleResult r;
  r.id = id;
  r.verdict = Verdict::Pass;
  r.detail = std::move(why);
  return r;
}

// Evaluates `quantity` on `count` generated samples and requires `ok` on each.
RuleResult sampled_rule(const std::string& id, const std::string& component, std::size_t count,
                        const std::function<Sample(std::size_t)>& generate,
                        const std::function<double(const Sample&)>& quantity, const std::function<bool(double)>& ok,
                        std::string detail) {
  RuleResult r;
  r.id = id;
  r.detail = std::move(detail);
  for (std::size_t k = 0; k < count; ++k) {
    const Sample s = generate(k);
    const double v = quantity(s);
    ++r.samples_used;
    if (!ok(v) || !std::isfinite(v)) {
      r.verdict = Verdict::Fail;
      Witness w;
      w.component = component;
      w.state = s.state;
      w.chi = s.nonlocal.at(std::string(kChiThetaKey));
      w.virus_integral = s.nonlocal.at(std::string(kVirusIntegralKey));
      w.value = v;
      r.witness = std::move(w);
      return r;
    }
  }
  r.verdict = Verdict::Pass;
  return r;
}

// Folds per-component results of one rule into a single verdict.
RuleResult combine(const std::string& id, const std::vector<RuleResult>& parts, const std::string& none_reason) {
  RuleResult out;
  out.id = id;
  bool any_applicable = false;
  for (const auto& p : parts) {
    out.samples_used += p.samples_used;
    if (p.verdict == Verdict::NotApplicable) continue;
    any_applicable = true;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += p.detail;
    if (p.verdict == Verdict::Fail && out.verdict != Verdict::Fail) {
      out.verdict = Verdict::Fail;
      out.witness = p.witness;
    }
  }
  if (!any_applicable) {
    out.verdict = Verdict::NotApplicable;
    out.detail = parts.empty() ? none_reason : parts.front().detail;
  } else if (out.verdict != Verdict::Fail) {
    out.verdict = Verdict::Pass;
  }
  return out;
}

bool ge(double v) { return v >= -kSignTol; }
bool le(double v) { return v <= kSignTol; }
bool anchor_zero(double v) { return std::abs(v) <= kAnchorTol; }
bool anchor_ge(double v) { return v >= -kAnchorTol; }

// Input name filling a role of a term, empty if the kind lacks the role.
std::string input_for_role(const MechanismTerm& t, std::string_view role) {
  const auto& roles = kind_info(t.kind).input_roles;
  for (std::size_t r = 0; r < roles.size(); ++r)
    if (roles[r] == role) return t.inputs[r];
  return {};
}

RuleResult aniso_rule(const Checker& ck, const std::string& id, const std::vector<std::string>& comps) {
  std::size_t checked = 0;
  for (const auto& taxis : ck.model().taxis_terms) {
    if (taxis.kind != TaxisKind::AnisoDiffusion) continue;
    if (std::find(comps.begin(), comps.end(), taxis.target) == comps.end()) continue;
    for (int j = 0; j <= 40; ++j) {
      for (int i = 0; i <= 40; ++i) {
        ++checked;
        const double x = i / 40.0;
        const double y = j / 40.0;
        const auto a = taxis.anisotropy.at(x, y);
        if (!a.positive_definite()) {
          RuleResult r;
          r.id = id;
          r.verdict = Verdict::Fail;
          r.samples_used = checked;
          r.detail = "A(x) not positive definite for '" + taxis.target + "'";
          Witness w;
          w.component = taxis.target;
          w.state = {{"x", x}, {"y", y}};
          w.value = a.a11 * a.a22 - a.a12 * a.a12;
          r.witness = w;
          return r;
        }
      }
    }
  }
  if (checked == 0) return vacuous_pass(id, "no anisotropic diffusion");
  RuleResult r = vacuous_pass(id, "A(x) positive definite on a 41x41 lattice");
  r.samples_used = checked;
  return r;
}

// Searches C = base * 2^k such that dF/dq < 0 strictly on the ray [C, 10C].
RuleResult bound_rule(const Checker& ck, const std::string& id, const std::string& comp,
                      std::optional<double>* found = nullptr) {
  const Terms terms = ck.all_terms(comp);
  for (const auto* t : terms)
    if (t->kind == MechanismKind::ND_Constant)
      return not_applicable(id, "'" + comp + "' uses ND_Constant, which has no derivative at 0");

  const double base = ck.upper(comp);
  const std::size_t n = ck.budget();
  RuleResult last;
  std::size_t used = 0;
  for (int k = 0; k <= kBoundSearchDoublings; ++k) {
    const double c = base * std::ldexp(1.0, k);
    auto gen = [&](std::size_t i) {
      Sample s = ck.sample(i);
      s.state[comp] = c + 9.0 * c * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      return s;
    };
    last = sampled_rule(
        id, comp, n, gen, [&](const Sample& s) { return sum_derivative(terms, comp, s); },
        [](double v) { return v < 0.0; },
        "'" + comp + "' reaction strictly decreasing beyond C=" + std::to_string(c));
    used += last.samples_used;
    if (last.verdict == Verdict::Pass) {
      if (found) *found = c;
      break;
    }
  }
  last.samples_used = used;
  if (last.verdict == Verdict::Fail) last.detail = "'" + comp + "': no C found with decreasing reaction sum";
  return last;
}

std::vector<RuleResult> virus_rules(const Checker& ck) {
  const auto viruses = ck.components([](ComponentRole r) { return r == ComponentRole::Virus; });
  std::vector<RuleResult> out;
  const std::size_t n = ck.budget();
  std::array<std::vector<RuleResult>, 6> parts;

  for (const auto& v : viruses) {
    const Terms growth = ck.terms(v, MechanismGroup::Growth);
    const Terms killing = ck.terms(v, MechanismGroup::Killing);

    if (growth.empty()) {
      for (int r = 0; r < 3; ++r) parts[r].push_back(not_applicable("", "no growth term on '" + v + "'"));
    } else {
      double eps = 0.0;
      double capacity = -1.0;
      for (const auto* t : growth) {
        if (t->kind == MechanismKind::M1_Allee) eps = std::max(eps, t->param("eps"));
        if (t->params.count("C")) capacity = std::max(capacity, t->param("C"));
      }
      const double top = capacity > 0.0 ? capacity : ck.upper(v);

      // Growth is non-negative above the Allee threshold.
      parts[0].push_back(sampled_rule(
          "R.1.1", v, n,
          [&](std::size_t k) {
            Sample s = ck.sample(k);
            s.state[v] = eps + (top - eps) * (static_cast<double>(k) + 1.0) / static_cast<double>(n);
            return s;
          },
          [&](const Sample& s) { return sum_value(growth, s); }, ge, "growth >= 0 on (eps, C]"));

      parts[1].push_back(sampled_rule(
          "R.1.2", v, n,
          [&](std::size_t k) {
            Sample s = ck.sample(k);
            s.state[v] = 0.0;
            return s;
          },
          [&](const Sample& s) { return sum_value(growth, s); }, anchor_zero, "growth vanishes at 0"));

      if (capacity <= 0.0) {
        RuleResult r;
        r.id = "R.1.3";
        r.verdict = Verdict::Fail;
        r.samples_used = 1;
        r.detail = "growth of '" + v + "' has no capacity root";
        Sample s = ck.sample(0);
        s.state[v] = top;
        Witness w;
        w.component = v;
        w.state = s.state;
        w.value = sum_value(growth, s);
        r.witness = w;
        parts[2].push_back(r);
      } else if (!(capacity > eps)) {
        parts[2].push_back(not_applicable("", "capacity not above the Allee threshold"));
      } else {
        parts[2].push_back(sampled_rule(
            "R.1.3", v, n,
            [&](std::size_t k) {
              Sample s = ck.sample(k);
              s.state[v] = capacity;
              return s;
            },
            [&](const Sample& s) { return sum_value(growth, s); }, anchor_zero,
            "growth vanishes at C=" + std::to_string(capacity)));
      }
    }

    if (killing.empty()) {
      parts[3].push_back(not_applicable("", "no killing term on '" + v + "'"));
      parts[4].push_back(not_applicable("", "no killing term on '" + v + "'"));
    } else {
      // The first anchor sample uses one unit of killer cells.
      parts[3].push_back(sampled_rule(
          "R.1.4", v, n,
          [&](std::size_t k) {
            Sample s = ck.sample(k);
            s.state[v] = 0.0;
            if (k == 0)
              for (const auto* t : killing) s.state[input_for_role(*t, "killer")] = 1.0;
            return s;
          },
          [&](const Sample& s) { return sum_value(killing, s); }, anchor_ge, "killing vanishes without virus"));

      std::vector<RuleResult> slope;
      for (const auto* t : killing) {
        const std::string killer = input_for_role(*t, "killer");
        slope.push_back(sampled_rule(
            "R.1.5", v, n, [&](std::size_t k) { return ck.sample(k); },
            [&](const Sample& s) { return sum_derivative(killing, killer, s); }, le,
            "killing non-increasing in '" + killer + "'"));
      }
      parts[4].push_back(combine("R.1.5", slope, ""));
    }
    parts[5].push_back(aniso_rule(ck, "R.1.6", {v}));
  }

  const char* ids[] = {"R.1.1", "R.1.2", "R.1.3", "R.1.4", "R.1.5", "R.1.6"};
  for (int r = 0; r < 6; ++r) out.push_back(combine(ids[r], parts[r], "model has no virus component"));
  return out;
}

std::vector<RuleResult> tcell_rules(const Checker& ck) {
  const auto tcells = ck.components(is_tcell_role);
  const std::size_t n = ck.budget();
  std::array<std::vector<RuleResult>, 7> parts;

  for (const auto& c : tcells) {
    const Terms production = ck.terms(c, MechanismGroup::Production);
    const Terms decay = ck.terms(c, MechanismGroup::TCellDecay);

    if (production.empty()) {
      parts[0].push_back(not_applicable("", "no production term on '" + c + "'"));
      parts[1].push_back(not_applicable("", "no production term on '" + c + "'"));
    } else {
      std::vector<RuleResult> slope;
      for (const auto* t : production) {
        const std::string virus = input_for_role(*t, "virus");
        slope.push_back(sampled_rule(
            "R.2.1", c, n, [&](std::size_t k) { return ck.sample(k); },
            [&](const Sample& s) { return sum_derivative(production, virus, s); }, ge,
            "production of '" + c + "' non-decreasing in '" + virus + "'"));
      }
      parts[0].push_back(combine("R.2.1", slope, ""));
      parts[1].push_back(sampled_rule(
          "R.2.2", c, n, [&](std::size_t k) { return ck.sample(k); },
          [&](const Sample& s) { return sum_value(production, s); }, ge, "production of '" + c + "' >= 0"));
    }

    if (decay.empty()) {
      parts[2].push_back(not_applicable("", "no decay term on '" + c + "'"));
      parts[3].push_back(not_applicable("", "no decay term on '" + c + "'"));
    } else {
      parts[2].push_back(sampled_rule(
          "R.2.3", c, n, [&](std::size_t k) { return ck.sample(k); },
          [&](const Sample& s) { return sum_derivative(decay, c, s); }, le, "decay of '" + c + "' non-increasing"));
      parts[3].push_back(sampled_rule(
          "R.2.4", c, n,
          [&](std::size_t k) {
            Sample s = ck.sample(k);
            s.state[c] = 0.0;
            return s;
          },
          [&](const Sample& s) { return sum_value(decay, s); }, anchor_ge, "decay of '" + c + "' >= 0 at zero"));
    }

    parts[4].push_back(bound_rule(ck, "R.2.5", c));
    parts[5].push_back(aniso_rule(ck, "R.2.6", {c}));

    RuleResult carrier = vacuous_pass("R.2.7", "no chemotaxis on '" + c + "'");
    for (const auto& taxis : ck.model().taxis_terms) {
      if (taxis.kind != TaxisKind::Chemotaxis || taxis.target != c) continue;
      carrier.samples_used = 1;
      if (!taxis.carrier_dependent) {
        carrier.verdict = Verdict::Fail;
        carrier.detail = "chemotactic flux of '" + c + "' does not depend on '" + c + "'";
        Witness w;
        w.component = c;
        w.state = {{c, 0.0}};
        w.value = taxis.coefficient.value;
        carrier.witness = w;
        break;
      }
      carrier.detail = "chemotactic flux of '" + c + "' carries '" + c + "'";
    }
    parts[6].push_back(carrier);
  }

  const char* ids[] = {"R.2.1", "R.2.2", "R.2.3", "R.2.4", "R.2.5", "R.2.6", "R.2.7"};
  std::vector<RuleResult> out;
  for (int r = 0; r < 7; ++r) out.push_back(combine(ids[r], parts[r], "model has no T-cell component"));
  return out;
}

std::vector<RuleResult> cytokine_rules(const Checker& ck) {
  const auto cytokines = ck.components([](ComponentRole r) { return r == ComponentRole::Cytokine; });
  const std::size_t n = ck.budget();
  std::array<std::vector<RuleResult>, 6> parts;

  for (const auto& c : cytokines) {
    const Terms production = ck.terms(c, MechanismGroup::Cytokine);
    const Terms decay = ck.terms(c, MechanismGroup::NaturalDecay);

    if (production.empty()) {
      parts[0].push_back(not_applicable("", "no cytokine production on '" + c + "'"));
      parts[1].push_back(not_applicable("", "no cytokine production on '" + c + "'"));
    } else {
      std::vector<std::string> drivers;
      for (const auto* t : production)
        for (auto role : {"virus", "helper"})
          if (auto in = input_for_role(*t, role); !in.empty() && in != c &&
                                                  std::find(drivers.begin(), drivers.end(), in) == drivers.end())
            drivers.push_back(in);
      std::vector<RuleResult> slope;
      for (const auto& d : drivers)
        slope.push_back(sampled_rule(
            "R.3.1", c, n, [&](std::size_t k) { return ck.sample(k); },
            [&](const Sample& s) { return sum_derivative(production, d, s); }, ge,
            "production of '" + c + "' non-decreasing in '" + d + "'"));
      parts[0].push_back(slope.empty() ? vacuous_pass("R.3.1", "no virus or helper dependency")
                                       : combine("R.3.1", slope, ""));
      parts[1].push_back(sampled_rule(
          "R.3.2", c, n, [&](std::size_t k) { return ck.sample(k); },
          [&](const Sample& s) { return sum_value(production, s); }, ge, "production of '" + c + "' >= 0"));
    }

    if (decay.empty()) {
      parts[2].push_back(not_applicable("", "no natural decay on '" + c + "'"));
      parts[3].push_back(not_applicable("", "no natural decay on '" + c + "'"));
    } else {
      parts[2].push_back(sampled_rule(
          "R.3.3", c, n, [&](std::size_t k) { return ck.sample(k); },
          [&](const Sample& s) { return sum_value(decay, s); }, le, "natural decay of '" + c + "' <= 0"));
      parts[3].push_back(sampled_rule(
          "R.3.4", c, n,
          [&](std::size_t k) {
            Sample s = ck.sample(k);
            s.state[c] = 0.0;
            return s;
          },
          [&](const Sample& s) { return sum_value(decay, s); }, anchor_zero, "natural decay of '" + c + "' vanishes at 0"));
    }
    parts[4].push_back(bound_rule(ck, "R.3.5", c));
    parts[5].push_back(aniso_rule(ck, "R.3.6", {c}));
  }

  const char* ids[] = {"R.3.1", "R.3.2", "R.3.3", "R.3.4", "R.3.5", "R.3.6"};
  std::vector<RuleResult> out;
  for (int r = 0; r < 6; ++r) out.push_back(combine(ids[r], parts[r], "model has no cytokine component"));
  return out;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

const RuleResult& RequirementReport::rule(std::string_view id) const {
  for (const auto& r : rules)
    if (r.id == id) return r;
  throw ConfigError("report has no rule " + std::string(id));
}

std::size_t RequirementReport::count(Verdict v) const {
  return static_cast<std::size_t>(std::count_if(rules.begin(), rules.end(), [v](const auto& r) { return r.verdict == v; }));
}

std::vector<std::string> RequirementReport::failed() const {
  std::vector<std::string> out;
  for (const auto& r : rules)
    if (r.verdict == Verdict::Fail) out.push_back(r.id);
  return out;
}

const std::vector<std::string>& requirement_ids() {
  static const std::vector<std::string> ids = {"R.1.1", "R.1.2", "R.1.3", "R.1.4", "R.1.5", "R.1.6", "R.2.1",
                                               "R.2.2", "R.2.3", "R.2.4", "R.2.5", "R.2.6", "R.2.7", "R.3.1",
                                               "R.3.2", "R.3.3", "R.3.4", "R.3.5", "R.3.6"};
  return ids;
}

std::vector<ComponentBox> sampling_boxes(const ModelDefinition& model) {
  std::vector<ComponentBox> boxes;
  double largest = 0.0;
  for (const auto& c : model.components) {
    ComponentBox b;
    b.name = c.name;
    for (const auto& t : model.reaction_terms) {
      if (t.target != c.name || !t.params.count("C")) continue;
      const auto group = kind_info(t.kind).group;
      // Capacities that bound the target itself; M6 capacity refers to the virus.
      const bool bounds_target = group == MechanismGroup::Growth ||
                                 t.kind == MechanismKind::M2_LocalBounded ||
                                 t.kind == MechanismKind::M2_GlobalSaturated ||
                                 t.kind == MechanismKind::M3_HelperBounded ||
                                 t.kind == MechanismKind::M3_ProductBounded;
      if (!bounds_target) continue;
      b.upper = b.bounded ? std::max(b.upper, t.param("C")) : t.param("C");
      b.bounded = true;
    }
    if (b.bounded) largest = std::max(largest, b.upper);
    boxes.push_back(b);
  }
  const double fallback = 10.0 * (largest > 0.0 ? largest : 1.0);
  for (auto& b : boxes)
    if (!b.bounded) b.upper = fallback;
  return boxes;
}

QuasiRandom::QuasiRandom(std::size_t dim, std::uint64_t seed) : shift_(dim) {
  if (dim > kPrimes.size()) throw ConfigError("quasi-random dimension too large");
  std::mt19937_64 rng(seed);
  for (auto& s : shift_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> QuasiRandom::point(std::size_t index) const {
  std::vector<double> p(shift_.size());
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double v = radical_inverse(index, kPrimes[d]) + shift_[d];
    p[d] = v - std::floor(v);
  }
  return p;
}

std::optional<double> decay_bound(const ModelDefinition& model, const std::string& component,
                                  const SampleSpec& sampler) {
  if (!model.component_index(component)) throw ConfigError("unknown component '" + component + "'");
  const Checker ck(model, sampler);
  std::optional<double> c;
  bound_rule(ck, "", component, &c);
  return c;
}

RequirementReport check_requirements(const ModelDefinition& model, const SampleSpec& sampler) {
  if (sampler.points_per_rule == 0) throw ConfigError("requirement checker needs a positive sampling budget");
  model.validate();

  const Checker ck(model, sampler);
  RequirementReport report;
  report.model = model.name;
  report.sampler = sampler;
  for (auto&& group : {virus_rules(ck), tcell_rules(ck), cytokine_rules(ck)})
    for (auto r : group) report.rules.push_back(std::move(r));
  return report;
}

}  // namespace inflam
