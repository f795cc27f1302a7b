#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padwerk/evaluation.hpp"
#include "padwerk/machine.hpp"
#include "padwerk/random.hpp"
#include "padwerk/simulator.hpp"

namespace padwerk {

inline constexpr double kTransitionProbability = 0.3;
inline constexpr std::uint64_t kMaxRandomShiftUsec = 10'000;

/// Family drawn uniformly from all seven (none included). Delay scales span
/// 10 us to 100 ms log-uniformly and get a shift in [0, 10 ms]; length
/// scales span 1 to 300 cells and are never shifted.
DistSpec random_distribution(SamplePurpose purpose, Rng& rng);

/// Each event edge present with probability 0.3, target uniform.
std::array<std::optional<std::size_t>, kEventCount> random_transitions(std::size_t state_count, Rng& rng);

StateSpec random_state(std::size_t state_count, Rng& rng);

MachineSpec random_machine(Endpoint role, PaddingBudget budget, Rng& rng, std::size_t states = kMaxStates);

/// Child states a[0..cut) followed by b[cut..n). Budget, start state and role
/// come from `a`.
MachineSpec crossover_at(const MachineSpec& a, const MachineSpec& b, std::size_t cut);

/// Cut drawn uniformly from 1..n-1. A single-state pair returns a copy of a.
MachineSpec crossover(const MachineSpec& a, const MachineSpec& b, Rng& rng);

enum class StatePart : std::uint8_t { iat, length, transitions };

/// Flags per state and part recording which slots were redrawn.
using MutationLog = std::vector<std::array<bool, 3>>;

/// Redraws each part of each state with probability p. Returns how many parts
/// were redrawn.
std::size_t mutate_in_place(MachineSpec& machine, double p, Rng& rng, MutationLog* log = nullptr);

MachineSpec mutate(const MachineSpec& machine, double p, Rng& rng);

struct Individual {
    MachinePair pair;
    std::optional<double> fitness;
};

/// Index drawn proportionally to fitness; uniform when every fitness is zero.
/// Throws ValidationError on an empty or unevaluated population.
std::size_t select_parent(std::span<const Individual> population, Rng& rng);

/// Maps a machine pair and an evaluation seed to a fitness in [0, 1].
using FitnessFn = std::function<double(const MachinePair&, std::uint64_t seed)>;

struct EvolutionConfig {
    std::size_t population_size = 10;
    std::size_t elite_count = 1;
    /// Fresh random individuals injected each generation.
    std::size_t diversity_count = 0;
    double mutation_prob = 0.1;
    std::uint64_t seed = 1;
    PaddingBudget budget{1500, 50};
    std::size_t states = kMaxStates;
    std::size_t workers = 0;  // 0: hardware concurrency
};

void validate(const EvolutionConfig& config);

/// Random generation zero, evaluated.
std::vector<Individual> initial_population(const EvolutionConfig& config, const FitnessFn& fitness);

/// Population indices ordered by fitness, best first, ties by lower index.
std::vector<std::size_t> rank_population(std::span<const Individual> population);

/// Elites copied verbatim, then diversity newcomers, then children whose
/// client and relay genomes are bred from client and relay parents
/// separately. Only new individuals are evaluated.
std::vector<Individual> next_generation(std::span<const Individual> population, const EvolutionConfig& config,
                                        const FitnessFn& fitness, std::size_t generation);

/// Fitness 1 - max recall of `classifier` on one fold of `dataset` defended
/// by the candidate pair.
FitnessFn make_recall_fitness(const Dataset& dataset, FoldPlan fold, Classifier& classifier,
                              SimulationOptions options = {}, std::size_t length = kDefaultSequenceLength);

struct GenerationSummary {
    std::size_t generation = 0;
    double best = 0;
    double mean = 0;
    std::filesystem::path best_path;
};

/// Generation loop with optional on-disk checkpoints. A checkpoint directory
/// holds gen-NNNN/ per generation (ind-NN.machine and fitness.csv), the
/// latest generation index in state.txt and the log in evolution.log.
class Evolution {
public:
    Evolution(EvolutionConfig config, FitnessFn fitness, std::filesystem::path checkpoint_dir = {});

    /// Continues from the newest generation saved under `checkpoint_dir`.
    static Evolution resume(EvolutionConfig config, FitnessFn fitness, const std::filesystem::path& checkpoint_dir);

    GenerationSummary step();
    std::vector<GenerationSummary> run(std::size_t generations);

    std::size_t generation() const { return generation_; }
    const std::vector<Individual>& population() const { return population_; }
    const Individual& best() const;
    GenerationSummary summary() const;

private:
    Evolution(EvolutionConfig config, FitnessFn fitness, std::filesystem::path checkpoint_dir,
              std::vector<Individual> population, std::size_t generation);

    void checkpoint();
    std::filesystem::path individual_path(std::size_t index) const;

    EvolutionConfig config_;
    FitnessFn fitness_;
    std::filesystem::path dir_;
    std::vector<Individual> population_;
    std::size_t generation_ = 0;
};

/// "gen,best,mean,path"
std::string format_log_line(const GenerationSummary& summary);

}  // namespace padwerk
