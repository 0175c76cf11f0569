#include "hoikit/refine/tournament.h"

#include <algorithm>

namespace hoikit::refine {

TournamentResult tournament_select(std::span<const Candidate> candidates, Selector& selector, std::size_t batch) {
  if (candidates.empty()) throw InvalidArgument("tournament needs at least one candidate");
  if (batch < 2) throw InvalidArgument("tournament batch must be at least 2");
  TournamentResult result;
  SelectionTranscript& tr = result.transcript;
  tr.selector = selector.name();
  tr.batch = batch;
  std::vector<const Candidate*> alive;
  for (const auto& c : candidates) {
    tr.entrants.push_back(c.id);
    alive.push_back(&c);
  }
  for (std::size_t round = 0; alive.size() > 1; ++round) {
    std::vector<const Candidate*> next;
    for (std::size_t begin = 0; begin < alive.size(); begin += batch) {
      const std::size_t end = std::min(alive.size(), begin + batch);
      if (end - begin == 1) {
        next.push_back(alive[begin]);
        continue;
      }
      std::vector<Candidate> group;
      GroupRecord rec;
      rec.round = round;
      for (std::size_t i = begin; i < end; ++i) {
        group.push_back(*alive[i]);
        rec.members.push_back(alive[i]->id);
      }
      try {
        SelectorReply reply = selector.select(group);
        if (reply.choice >= group.size()) throw SelectorError("selector returned an out-of-range choice", reply.log);
        rec.selection = reply.choice + 1;
        rec.winner = group[reply.choice].id;
        rec.raw = std::move(reply.raw);
        rec.log = std::move(reply.log);
      } catch (const SelectorError& e) {
        rec.log = e.log;
        rec.log.push_back(e.what());
        tr.groups.push_back(std::move(rec));
        throw TournamentError(std::string("selector failed in round ") + std::to_string(round) + ": " + e.what(),
                              tr);
      }
      next.push_back(alive[begin + rec.selection - 1]);
      tr.groups.push_back(std::move(rec));
    }
    alive = std::move(next);
  }
  result.winner = alive.front()->id;
  tr.winner = result.winner;
  return result;
}

std::size_t replay(const SelectionTranscript& tr) {
  if (tr.entrants.empty()) throw InvalidArgument("transcript has no entrants");
  if (tr.batch < 2) throw InvalidArgument("transcript batch must be at least 2");
  std::vector<std::size_t> alive = tr.entrants;
  std::size_t g = 0;
  for (std::size_t round = 0; alive.size() > 1; ++round) {
    std::vector<std::size_t> next;
    for (std::size_t begin = 0; begin < alive.size(); begin += tr.batch) {
      const std::size_t end = std::min(alive.size(), begin + tr.batch);
      if (end - begin == 1) {
        next.push_back(alive[begin]);
        continue;
      }
      if (g >= tr.groups.size()) throw InvalidArgument("transcript ends early");
      const GroupRecord& rec = tr.groups[g++];
      const std::vector<std::size_t> members(alive.begin() + static_cast<std::ptrdiff_t>(begin),
                                             alive.begin() + static_cast<std::ptrdiff_t>(end));
      if (rec.round != round || rec.members != members) throw InvalidArgument("transcript group does not match replay");
      if (rec.selection < 1 || rec.selection > members.size()) throw InvalidArgument("transcript selection out of range");
      if (rec.winner != members[rec.selection - 1]) throw InvalidArgument("transcript winner does not match selection");
      next.push_back(rec.winner);
    }
    alive = std::move(next);
  }
  if (g != tr.groups.size()) throw InvalidArgument("transcript has extra groups");
  if (alive.front() != tr.winner) throw InvalidArgument("transcript winner does not match replay");
  return alive.front();
}

nlohmann::json to_json(const SelectionTranscript& tr) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : tr.groups)
    groups.push_back({{"round", g.round},
                      {"members", g.members},
                      {"selection", g.selection},
                      {"winner", g.winner},
                      {"raw", g.raw},
                      {"log", g.log}});
  return {{"selector", tr.selector}, {"batch", tr.batch}, {"entrants", tr.entrants},
          {"groups", groups},        {"winner", tr.winner}};
}

SelectionTranscript transcript_from_json(const nlohmann::json& j) {
  try {
    SelectionTranscript tr;
    tr.selector = j.at("selector").get<std::string>();
    tr.batch = j.at("batch").get<std::size_t>();
    tr.entrants = j.at("entrants").get<std::vector<std::size_t>>();
    tr.winner = j.at("winner").get<std::size_t>();
    for (const auto& g : j.at("groups")) {
      GroupRecord rec;
      rec.round = g.at("round").get<std::size_t>();
      rec.members = g.at("members").get<std::vector<std::size_t>>();
      rec.selection = g.at("selection").get<std::size_t>();
      rec.winner = g.at("winner").get<std::size_t>();
      rec.raw = g.at("raw").get<std::string>();
      rec.log = g.at("log").get<std::vector<std::string>>();
      tr.groups.push_back(std::move(rec));
    }
    return tr;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("transcript: ") + e.what());
  }
}

}  // namespace hoikit::refine
