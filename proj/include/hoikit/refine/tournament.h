#pragma once

#include "hoikit/error.h"
#include "hoikit/geometry/types.h"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoikit::refine {

using geometry::Vec3;

inline constexpr std::size_t kDefaultBatch = 3;

/// One survivor as shown to a selector.
struct Candidate {
  std::size_t id = 0;
  Vec3 translation = Vec3::Zero();
  double penetration = 0.0;
  /// Encoded render; empty when the selector does not look at images.
  std::vector<std::uint8_t> png;
};

struct SelectorReply {
  /// 0-based position within the group.
  std::size_t choice = 0;
  std::string raw;
  std::vector<std::string> log;
};

/// A selector gave up on a group. `log` holds every attempt.
class SelectorError : public Error {
 public:
  SelectorError(const std::string& what, std::vector<std::string> log) : Error(what), log(std::move(log)) {}
  std::vector<std::string> log;
};

class Selector {
 public:
  virtual ~Selector() = default;
  virtual SelectorReply select(std::span<const Candidate> group) = 0;
  virtual bool needs_images() const { return false; }
  virtual std::string name() const = 0;
};

struct GroupRecord {
  std::size_t round = 0;
  std::vector<std::size_t> members;
  /// 1-based position of the chosen member; 0 for a failed group.
  std::size_t selection = 0;
  std::size_t winner = 0;
  std::string raw;
  std::vector<std::string> log;
};

struct SelectionTranscript {
  std::string selector;
  std::size_t batch = kDefaultBatch;
  std::vector<std::size_t> entrants;
  std::vector<GroupRecord> groups;
  std::size_t winner = 0;
};

class TournamentError : public Error {
 public:
  TournamentError(const std::string& what, SelectionTranscript transcript)
      : Error(what), transcript(std::move(transcript)) {}
  SelectionTranscript transcript;
};

struct TournamentResult {
  std::size_t winner = 0;
  SelectionTranscript transcript;
};

/// Splits the survivors, in order, into consecutive groups of at most
/// `batch` and keeps each group's pick until one remains. A group of one
/// advances without a selector call.
TournamentResult tournament_select(std::span<const Candidate> candidates, Selector& selector,
                                   std::size_t batch = kDefaultBatch);

/// Re-derives the winner from the recorded selections, checking that every
/// round partitions the previous round's winners. Throws InvalidArgument on
/// any inconsistency.
std::size_t replay(const SelectionTranscript& transcript);

nlohmann::json to_json(const SelectionTranscript& transcript);
SelectionTranscript transcript_from_json(const nlohmann::json& j);

}  // namespace hoikit::refine
