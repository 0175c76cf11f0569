#pragma once

#include "hoikit/refine/tournament.h"

#include <functional>
#include <memory>

namespace hoikit::refine {

/// Picks the lowest penetration; ties go to the lower candidate id.
class PenetrationSelector : public Selector {
 public:
  SelectorReply select(std::span<const Candidate> group) override;
  std::string name() const override { return "mock:penetration"; }
};

/// Picks the translation closest to `base`; ties go to the lower id.
class ClosestSelector : public Selector {
 public:
  explicit ClosestSelector(const Vec3& base) : base_(base) {}
  SelectorReply select(std::span<const Candidate> group) override;
  std::string name() const override { return "mock:closest"; }

 private:
  Vec3 base_;
};

class FirstSelector : public Selector {
 public:
  SelectorReply select(std::span<const Candidate> group) override;
  std::string name() const override { return "mock:first"; }
};

/// Picks the maximum under a strict total order on candidate ids.
class OrderSelector : public Selector {
 public:
  using Less = std::function<bool(std::size_t, std::size_t)>;
  explicit OrderSelector(Less less) : less_(std::move(less)) {}
  SelectorReply select(std::span<const Candidate> group) override;
  std::string name() const override { return "mock:order"; }
  std::size_t calls() const { return calls_; }

 private:
  Less less_;
  std::size_t calls_ = 0;
};

/// "mock:penetration", "mock:closest" (relative to `base`) or "mock:first".
/// Throws InvalidArgument for anything else.
std::unique_ptr<Selector> make_mock_selector(const std::string& name, const Vec3& base);

}  // namespace hoikit::refine
