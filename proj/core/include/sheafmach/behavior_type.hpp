#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sheafmach/section.hpp"

namespace sheafmach {

/// Set of values a wire may carry, identified by name.
class ValueDomain {
 public:
  static ValueDomain real() { return ValueDomain("real"); }
  static ValueDomain integer() { return ValueDomain("integer"); }
  static ValueDomain text() { return ValueDomain("text"); }
  /// Integers -1 and +1.
  static ValueDomain polarity() { return ValueDomain("polarity"); }
  /// A_0 ⊙ ... ⊙ A_{n-1}, carried as Value records.
  static ValueDomain tensor(std::vector<ValueDomain> components);

  const std::string& name() const noexcept { return name_; }
  const std::vector<ValueDomain>& components() const noexcept { return components_; }
  bool is_tensor() const noexcept { return !components_.empty(); }

  bool contains(const Value& v) const;

  friend bool operator==(const ValueDomain& a, const ValueDomain& b) { return a.name_ == b.name_; }

 private:
  explicit ValueDomain(std::string name) : name_(std::move(name)) {}
  std::string name_;
  std::vector<ValueDomain> components_;
};

/// Runtime type tag of a wire.
class BehaviorType {
 public:
  static constexpr double kAnyLipschitz = std::numeric_limits<double>::infinity();

  enum class Kind { Event, Continuous, Clock, Product };

  static BehaviorType event(ValueDomain d);
  /// `lipschitz`: a bound every section of this type carries a certificate for;
  /// kAnyLipschitz asks for some finite certified bound.
  static BehaviorType continuous(ValueDomain d, std::optional<double> lipschitz = std::nullopt,
                                 bool codiscrete = false);
  static BehaviorType clock(Duration period);
  /// Nested products are flattened.
  static BehaviorType product(std::vector<BehaviorType> parts);
  static BehaviorType unit() { return product({}); }

  Kind kind() const noexcept { return kind_; }
  /// Throws TypeError for clocks and products.
  const ValueDomain& domain() const;
  const std::optional<double>& lipschitz_bound() const noexcept { return lipschitz_; }
  bool codiscrete() const noexcept { return codiscrete_; }
  Duration period() const noexcept { return period_; }
  const std::vector<BehaviorType>& parts() const noexcept { return parts_; }
  bool is_unit() const noexcept { return kind_ == Kind::Product && parts_.empty(); }

  /// Wire ports: the parts of a product, or the type itself.
  std::vector<BehaviorType> ports() const;

  /// True if a wire of this type can be fed by a machine producing `produced`:
  /// same shape and domains, the producer certifies any bound expected here, and
  /// a jump-free wire is not fed by a codiscrete producer.
  bool accepts(const BehaviorType& produced) const;

  /// Checks the shape of a section and the domain of its event values.
  bool admits(const Section& s) const;

  std::string to_string() const;

  friend bool operator==(const BehaviorType&, const BehaviorType&);

 private:
  BehaviorType() = default;
  Kind kind_ = Kind::Product;
  std::optional<ValueDomain> domain_;
  std::optional<double> lipschitz_;
  bool codiscrete_ = false;
  Duration period_;
  std::vector<BehaviorType> parts_;
};

}  // namespace sheafmach
