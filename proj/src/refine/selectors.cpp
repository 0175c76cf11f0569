#include "hoikit/refine/selectors.h"

namespace hoikit::refine {

namespace {

SelectorReply reply(std::size_t choice) {
  SelectorReply r;
  r.choice = choice;
  r.raw = "{\"selection\": " + std::to_string(choice + 1) + "}";
  return r;
}

void require_group(std::span<const Candidate> group) {
  if (group.empty()) throw SelectorError("empty group", {});
}

template <typename Key>
std::size_t argmin(std::span<const Candidate> group, Key key) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < group.size(); ++i) {
    const double a = key(group[i]), b = key(group[best]);
    if (a < b || (a == b && group[i].id < group[best].id)) best = i;
  }
  return best;
}

}  // namespace

SelectorReply PenetrationSelector::select(std::span<const Candidate> group) {
  require_group(group);
  return reply(argmin(group, [](const Candidate& c) { return c.penetration; }));
}

SelectorReply ClosestSelector::select(std::span<const Candidate> group) {
  require_group(group);
  return reply(argmin(group, [&](const Candidate& c) { return (c.translation - base_).squaredNorm(); }));
}

SelectorReply FirstSelector::select(std::span<const Candidate> group) {
  require_group(group);
  return reply(0);
}

SelectorReply OrderSelector::select(std::span<const Candidate> group) {
  require_group(group);
  ++calls_;
  std::size_t best = 0;
  for (std::size_t i = 1; i < group.size(); ++i)
    if (less_(group[best].id, group[i].id)) best = i;
  return reply(best);
}

std::unique_ptr<Selector> make_mock_selector(const std::string& name, const Vec3& base) {
  if (name == "mock:penetration") return std::make_unique<PenetrationSelector>();
  if (name == "mock:closest") return std::make_unique<ClosestSelector>(base);
  if (name == "mock:first") return std::make_unique<FirstSelector>();
  throw InvalidArgument("unknown selector '" + name + "'");
}

}  // namespace hoikit::refine
