#include "probinc/knowledge_base.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "probinc/error.hpp"
#include "probinc/feasibility.hpp"

namespace probinc {

std::string format_probability(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), d, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

std::string to_string(const ProbabilisticConstraint& c, const Signature& sig) {
  std::string out = "(" + to_string(c.consequent, sig);
  if (c.antecedent.kind() != Formula::Kind::kTop) {
    out += " | " + to_string(c.antecedent, sig);
  }
  out += ")[" + format_probability(c.probability) + "]";
  return out;
}

bool check_self_consistency(const ProbabilisticConstraint& c,
                            const Signature& sig, std::size_t max_worlds) {
  const ProbabilisticConstraint pair[] = {
      {c.consequent, c.antecedent, c.probability, {}},
      {c.antecedent, Formula::top(), 1.0, {}},
  };
  return solve_feasibility(build_cs(sig, pair, max_worlds)).consistent;
}

KnowledgeBase::KnowledgeBase(Signature sig,
                             std::vector<ProbabilisticConstraint> constraints,
                             std::size_t max_worlds)
    : sig_(std::move(sig)), constraints_(std::move(constraints)) {
  std::set<std::string> labels;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    if (!c.consequent.well_formed(sig_) || !c.antecedent.well_formed(sig_)) {
      throw Error("constraint " + std::to_string(i + 1) +
                  " refers to an unknown variable or value");
    }
    if (!(c.probability >= 0.0 && c.probability <= 1.0)) {
      throw Error("constraint " + std::to_string(i + 1) +
                  " has probability outside [0,1]");
    }
    if (!c.label.empty() && !labels.insert(c.label).second) {
      throw Error("duplicate constraint label '" + c.label + "'");
    }
    if (!check_self_consistency(c, sig_, max_worlds)) {
      throw SelfConsistencyError("constraint " + std::to_string(i + 1) + " " +
                                     to_string(c, sig_) +
                                     " is not self-consistent",
                                 i);
    }
  }
}

KnowledgeBase KnowledgeBase::subset(std::uint64_t mask) const {
  std::vector<ProbabilisticConstraint> out;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if ((mask >> i) & 1u) out.push_back(constraints_[i]);
  }
  return KnowledgeBase(Unchecked{}, sig_, std::move(out));
}

KnowledgeBase KnowledgeBase::subset(std::span<const std::size_t> indices) const {
  std::vector<ProbabilisticConstraint> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(constraints_.at(i));
  return KnowledgeBase(Unchecked{}, sig_, std::move(out));
}

KnowledgeBase KnowledgeBase::with(ProbabilisticConstraint c) const {
  auto cs = constraints_;
  cs.push_back(std::move(c));
  return KnowledgeBase(sig_, std::move(cs));
}

std::string KnowledgeBase::display_label(std::size_t i) const {
  const auto& l = constraints_[i].label;
  return l.empty() ? "r" + std::to_string(i + 1) : l;
}

KnowledgeBase characteristic(const KnowledgeBase& kb,
                             std::span<const double> x) {
  if (x.size() != kb.size()) {
    throw Error("characteristic: expected " + std::to_string(kb.size()) +
                " probabilities, got " + std::to_string(x.size()));
  }
  auto cs = kb.constraints();
  for (std::size_t i = 0; i < cs.size(); ++i) cs[i].probability = x[i];
  return KnowledgeBase(kb.signature(), std::move(cs));
}

CompiledKB::CompiledKB(KnowledgeBase kb, std::size_t max_worlds)
    : kb_(std::move(kb)) {
  const Signature& sig = kb_.signature();
  check_world_cap(sig, max_worlds);
  world_count_ = sig.world_count();
  const auto m = static_cast<Eigen::Index>(kb_.size());
  const auto n = static_cast<Eigen::Index>(world_count_);
  ab_.resize(m, n);
  b_.resize(m, n);
  d_.resize(m);
  for (std::size_t i = 0; i < kb_.size(); ++i) {
    const auto& c = kb_[i];
    WorldSet mb = models(c.antecedent, sig, max_worlds);
    WorldSet mab = models(c.consequent, sig, max_worlds) & mb;
    const auto r = static_cast<Eigen::Index>(i);
    ab_.row(r) = mab.indicator().transpose();
    b_.row(r) = mb.indicator().transpose();
    d_[r] = c.probability;
    mod_ab_.push_back(std::move(mab));
    mod_b_.push_back(std::move(mb));
  }

  // Worlds with the same membership pattern in every Mod(A_i B_i) and
  // Mod(B_i) are interchangeable for all constraint probabilities.
  std::unordered_map<std::string, std::size_t> ids;
  std::string key(2 * kb_.size(), '0');
  for (std::size_t w = 0; w < world_count_; ++w) {
    for (std::size_t i = 0; i < kb_.size(); ++i) {
      key[2 * i] = mod_ab_[i].contains(w) ? '1' : '0';
      key[2 * i + 1] = mod_b_[i].contains(w) ? '1' : '0';
    }
    auto [it, inserted] = ids.emplace(key, classes_.size());
    if (inserted) classes_.emplace_back();
    classes_[it->second].push_back(w);
  }
  const auto k = static_cast<Eigen::Index>(classes_.size());
  reduced_ab_.resize(m, k);
  reduced_b_.resize(m, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto rep = static_cast<Eigen::Index>(classes_[static_cast<std::size_t>(c)][0]);
    reduced_ab_.col(c) = ab_.col(rep);
    reduced_b_.col(c) = b_.col(rep);
  }
}

Eigen::VectorXd CompiledKB::expand(const Eigen::VectorXd& class_mass) const {
  Eigen::VectorXd alpha =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(world_count_));
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const double share = class_mass[static_cast<Eigen::Index>(c)] /
                         static_cast<double>(classes_[c].size());
    for (auto w : classes_[c]) alpha[static_cast<Eigen::Index>(w)] = share;
  }
  return alpha;
}

Eigen::VectorXd CompiledKB::reduce(const Eigen::VectorXd& alpha) const {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(classes_.size()));
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    for (auto w : classes_[c]) {
      mass[static_cast<Eigen::Index>(c)] += alpha[static_cast<Eigen::Index>(w)];
    }
  }
  return mass;
}

std::string serialize_kb(const KnowledgeBase& kb) {
  const Signature& sig = kb.signature();
  std::string out;
  for (std::size_t v = 0; v < sig.size(); ++v) {
    out += "var " + sig[v].name;
    const auto& dom = sig[v].domain;
    if (!(dom.size() == 2 && dom[0] == "true" && dom[1] == "false")) {
      out += ":";
      for (std::size_t k = 0; k < dom.size(); ++k) {
        out += (k == 0 ? " " : ", ") + dom[k];
      }
    }
    out += "\n";
  }
  for (const auto& c : kb.constraints()) {
    if (!c.label.empty()) out += c.label + ": ";
    out += to_string(c, sig) + "\n";
  }
  return out;
}

}  // namespace probinc
