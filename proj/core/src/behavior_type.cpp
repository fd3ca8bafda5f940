#include "sheafmach/behavior_type.hpp"

#include <sstream>

#include "sheafmach/errors.hpp"

namespace sheafmach {

ValueDomain ValueDomain::tensor(std::vector<ValueDomain> components) {
  if (components.empty()) throw TypeError("tensor domain needs at least one component");
  std::string name = "⊙(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) name += ",";
    name += components[i].name();
  }
  name += ")";
  ValueDomain d(std::move(name));
  d.components_ = std::move(components);
  return d;
}

bool ValueDomain::contains(const Value& v) const {
  if (is_tensor()) {
    if (!v.is_record() || v.as_record().empty()) return false;
    for (const auto& e : v.as_record()) {
      if (e.slot >= components_.size() || !components_[e.slot].contains(e.value)) return false;
    }
    return true;
  }
  if (name_ == "real") return v.is_real();
  if (name_ == "integer") return v.is_integer();
  if (name_ == "text") return v.is_text();
  if (name_ == "polarity") return v.is_integer() && (v.as_integer() == 1 || v.as_integer() == -1);
  return false;
}

BehaviorType BehaviorType::event(ValueDomain d) {
  BehaviorType t;
  t.kind_ = Kind::Event;
  t.domain_ = std::move(d);
  return t;
}

BehaviorType BehaviorType::continuous(ValueDomain d, std::optional<double> lipschitz, bool codiscrete) {
  if (lipschitz && !(*lipschitz >= 0.0)) throw TypeError("Lipschitz bound must be >= 0");
  BehaviorType t;
  t.kind_ = Kind::Continuous;
  t.domain_ = std::move(d);
  t.lipschitz_ = lipschitz;
  t.codiscrete_ = codiscrete;
  return t;
}

BehaviorType BehaviorType::clock(Duration period) {
  if (period.is_zero()) throw TypeError("clock period must be positive");
  BehaviorType t;
  t.kind_ = Kind::Clock;
  t.period_ = period;
  return t;
}

BehaviorType BehaviorType::product(std::vector<BehaviorType> parts) {
  BehaviorType t;
  t.kind_ = Kind::Product;
  for (auto& p : parts) {
    if (p.kind_ == Kind::Product) {
      t.parts_.insert(t.parts_.end(), p.parts_.begin(), p.parts_.end());
    } else {
      t.parts_.push_back(std::move(p));
    }
  }
  return t;
}

const ValueDomain& BehaviorType::domain() const {
  if (!domain_) throw TypeError("behavior type " + to_string() + " has no value domain");
  return *domain_;
}

std::vector<BehaviorType> BehaviorType::ports() const {
  if (kind_ == Kind::Product) return parts_;
  return {*this};
}

bool BehaviorType::accepts(const BehaviorType& produced) const {
  if (kind_ != produced.kind_) return false;
  switch (kind_) {
    case Kind::Event:
      return domain_ == produced.domain_;
    case Kind::Continuous:
      if (!(domain_ == produced.domain_)) return false;
      if (lipschitz_ && (!produced.lipschitz_ || *produced.lipschitz_ > *lipschitz_)) return false;
      if (!codiscrete_ && produced.codiscrete_) return false;
      return true;
    case Kind::Clock:
      return period_ == produced.period_;
    case Kind::Product:
      if (parts_.size() != produced.parts_.size()) return false;
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (!parts_[i].accepts(produced.parts_[i])) return false;
      }
      return true;
  }
  return false;
}

bool BehaviorType::admits(const Section& s) const {
  switch (kind_) {
    case Kind::Event:
      if (s.kind() != Section::Kind::Event) return false;
      for (const auto& e : s.events().events()) {
        if (!domain_->contains(e.value)) return false;
      }
      return true;
    case Kind::Continuous:
      if (s.kind() != Section::Kind::Continuous) return false;
      if (lipschitz_ && !s.continuous().lipschitz_bound()) return false;
      return true;
    case Kind::Clock:
      return s.kind() == Section::Kind::Clock && s.clock().period() == period_;
    case Kind::Product:
      if (s.kind() != Section::Kind::Product || s.parts().size() != parts_.size()) return false;
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (!parts_[i].admits(s.parts()[i])) return false;
      }
      return true;
  }
  return false;
}

std::string BehaviorType::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Event:
      os << "Ev(" << domain_->name() << ")";
      break;
    case Kind::Continuous:
      os << (codiscrete_ ? "Cd(" : "C(") << domain_->name();
      if (lipschitz_) os << ", K=" << *lipschitz_;
      os << ")";
      break;
    case Kind::Clock:
      os << "Clock(" << format_seconds(period_) << ")";
      break;
    case Kind::Product:
      if (parts_.empty()) {
        os << "1";
        break;
      }
      for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? " × " : "") << parts_[i].to_string();
      break;
  }
  return os.str();
}

bool operator==(const BehaviorType& a, const BehaviorType& b) {
  return a.kind_ == b.kind_ && a.domain_ == b.domain_ && a.lipschitz_ == b.lipschitz_ &&
         a.codiscrete_ == b.codiscrete_ && a.period_ == b.period_ && a.parts_ == b.parts_;
}

}  // namespace sheafmach
