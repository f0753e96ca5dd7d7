#include "advlane/rollout.h"

#include <algorithm>
#include <thread>

namespace advlane {

const char* PlayerName(Player p) {
  return p == Player::kProtagonist ? "protagonist" : "adversary";
}

void Trajectory::Push(std::vector<double> o, const ActionSample& p, const ActionSample& a,
                      double rew1, double rew2) {
  obs.push_back(std::move(o));
  a1_raw.push_back(p.raw);
  a1.push_back(p.action);
  a2_raw.push_back(a.raw);
  a2.push_back(a.action);
  logp1.push_back(p.log_prob);
  logp2.push_back(a.log_prob);
  r1.push_back(rew1);
  r2.push_back(rew2);
}

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return MixSeed(MixSeed(MixSeed(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

EpisodeStreams::EpisodeStreams(std::uint64_t seed, std::uint64_t episode)
    : env(DeriveSeed(seed, episode, 1)),
      protagonist(DeriveSeed(seed, episode, 2)),
      adversary(DeriveSeed(seed, episode, 3)),
      extra(DeriveSeed(seed, episode, 4)) {}

Trajectory RunEpisode(const EnvBundle& bundle, const Actor& protagonist,
                      const Actor& adversary, EpisodeStreams& streams) {
  Trajectory traj;
  GameState g = Reset(bundle.env, streams.env);
  while (!g.terminal) {
    const Observation o = Observe(g, bundle.env);
    const ActionSample p = protagonist.Act(o, streams.protagonist);
    const ActionSample a = adversary.Act(o, streams.adversary);
    const StepResult res = Step(g, {p.action[0], p.action[1]}, {a.action[0], a.action[1]},
                                bundle);
    traj.Push(std::vector<double>(o.begin(), o.end()), p, a, res.r1, res.r2);
    traj.failure = res.failure;
    g = res.next;
  }
  traj.terminal = true;
  return traj;
}

std::vector<Trajectory> Rollout(const EnvBundle& bundle, const Actor& protagonist,
                                const Actor& adversary, int step_budget, std::uint64_t seed,
                                int workers) {
  std::vector<Trajectory> paths;
  std::size_t steps = 0;
  std::uint64_t next_episode = 0;
  workers = std::max(1, workers);
  do {
    // Each round runs `workers` episodes; surplus ones past the budget are
    // discarded so the output is the same for any worker count.
    std::vector<Trajectory> round(workers);
    if (workers == 1) {
      EpisodeStreams streams(seed, next_episode);
      round[0] = RunEpisode(bundle, protagonist, adversary, streams);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          EpisodeStreams streams(seed, next_episode + w);
          round[w] = RunEpisode(bundle, protagonist, adversary, streams);
        });
      }
      for (auto& t : threads) t.join();
    }
    next_episode += workers;
    for (Trajectory& t : round) {
      if (static_cast<int>(steps) >= step_budget && !paths.empty()) break;
      steps += t.size();
      paths.push_back(std::move(t));
    }
  } while (static_cast<int>(steps) < step_budget);
  return paths;
}

std::size_t TotalSteps(const std::vector<Trajectory>& paths) {
  std::size_t n = 0;
  for (const auto& t : paths) n += t.size();
  return n;
}

}  // namespace advlane
