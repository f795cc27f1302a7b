#include "padwerk/evolver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "padwerk/catalog.hpp"
#include "padwerk/error.hpp"
#include "padwerk/machine_format.hpp"
#include "padwerk/parallel.hpp"

namespace padwerk {

namespace fs = std::filesystem;

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::size_t workers_of(const EvolutionConfig& cfg) {
    return cfg.workers == 0 ? default_worker_count() : cfg.workers;
}

}  // namespace

DistSpec random_distribution(SamplePurpose purpose, Rng& rng) {
    const bool delay = purpose == SamplePurpose::delay;
    const double lo = delay ? 10.0 : 1.0;
    const double hi = delay ? 100'000.0 : 300.0;

    DistSpec d;
    d.family = kAllFamilies[rng.below(kAllFamilies.size())];
    switch (d.family) {
        case DistFamily::none:
            break;
        case DistFamily::uniform:
            d.param1 = log_uniform(rng, lo, hi);
            d.param2 = d.param1 + log_uniform(rng, lo, hi);
            break;
        case DistFamily::logistic:
            d.param1 = log_uniform(rng, lo, hi);
            d.param2 = d.param1 * rng.uniform(0.05, 1.0);
            break;
        case DistFamily::log_logistic:
            d.param1 = log_uniform(rng, lo, hi);
            d.param2 = rng.uniform(0.5, 4.0);
            break;
        case DistFamily::geometric:
            d.param1 = 1.0 / (1.0 + log_uniform(rng, lo, hi));
            break;
        case DistFamily::weibull:
            d.param1 = rng.uniform(0.5, 3.0);
            d.param2 = log_uniform(rng, lo, hi);
            break;
        case DistFamily::pareto:
            d.param1 = log_uniform(rng, lo, hi);
            d.param2 = rng.uniform(0.5, 3.0);
            break;
    }
    if (delay && d.family != DistFamily::none) d.added_shift_usec = rng.below(kMaxRandomShiftUsec + 1);
    return d;
}

std::array<std::optional<std::size_t>, kEventCount> random_transitions(std::size_t state_count, Rng& rng) {
    std::array<std::optional<std::size_t>, kEventCount> out{};
    for (auto& slot : out) {
        if (rng.bernoulli(kTransitionProbability)) slot = rng.below(state_count);
    }
    return out;
}

StateSpec random_state(std::size_t state_count, Rng& rng) {
    StateSpec s;
    s.iat = random_distribution(SamplePurpose::delay, rng);
    s.length = random_distribution(SamplePurpose::length, rng);
    s.transitions = random_transitions(state_count, rng);
    return s;
}

MachineSpec random_machine(Endpoint role, PaddingBudget budget, Rng& rng, std::size_t states) {
    if (states == 0 || states > kMaxStates) throw ValidationError("machines have 1 to 4 states");
    MachineSpec m;
    m.role = role;
    m.budget = budget;
    m.start_state = 0;
    for (std::size_t i = 0; i < states; ++i) m.states.push_back(random_state(states, rng));
    return m;
}

MachineSpec crossover_at(const MachineSpec& a, const MachineSpec& b, std::size_t cut) {
    if (a.states.size() != b.states.size()) throw ValidationError("crossover parents differ in state count");
    if (cut > a.states.size()) throw ValidationError("crossover cut out of range");
    MachineSpec child = a;
    std::copy(b.states.begin() + static_cast<std::ptrdiff_t>(cut), b.states.end(),
              child.states.begin() + static_cast<std::ptrdiff_t>(cut));
    return child;
}

MachineSpec crossover(const MachineSpec& a, const MachineSpec& b, Rng& rng) {
    if (a.states.size() != b.states.size()) throw ValidationError("crossover parents differ in state count");
    const std::size_t n = a.states.size();
    if (n < 2) return a;
    return crossover_at(a, b, 1 + rng.below(n - 1));
}

std::size_t mutate_in_place(MachineSpec& m, double p, Rng& rng, MutationLog* log) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("mutation probability must be in [0, 1]");
    if (log) log->assign(m.states.size(), {false, false, false});
    const std::size_t n = m.states.size();
    std::size_t redrawn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        StateSpec& s = m.states[i];
        for (std::size_t part = 0; part < 3; ++part) {
            if (!rng.bernoulli(p)) continue;
            switch (static_cast<StatePart>(part)) {
                case StatePart::iat: s.iat = random_distribution(SamplePurpose::delay, rng); break;
                case StatePart::length: s.length = random_distribution(SamplePurpose::length, rng); break;
                case StatePart::transitions: s.transitions = random_transitions(n, rng); break;
            }
            if (log) (*log)[i][part] = true;
            ++redrawn;
        }
    }
    return redrawn;
}

MachineSpec mutate(const MachineSpec& m, double p, Rng& rng) {
    MachineSpec out = m;
    mutate_in_place(out, p, rng);
    return out;
}

std::size_t select_parent(std::span<const Individual> population, Rng& rng) {
    if (population.empty()) throw ValidationError("cannot select from an empty population");
    double total = 0;
    for (const auto& ind : population) {
        if (!ind.fitness) throw ValidationError("selection requires evaluated individuals");
        total += *ind.fitness;
    }
    if (total <= 0) return rng.below(population.size());
    const double target = rng.uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        acc += *population[i].fitness;
        if (target < acc) return i;
    }
    // Rounding left target at the very top: last positive-weight individual.
    for (std::size_t i = population.size(); i-- > 0;) {
        if (*population[i].fitness > 0) return i;
    }
    return population.size() - 1;
}

void validate(const EvolutionConfig& c) {
    if (c.population_size == 0) throw ValidationError("population size must be positive");
    if (c.elite_count + c.diversity_count >= c.population_size) {
        throw ValidationError("elite and diversity counts must leave room for children");
    }
    if (!(c.mutation_prob >= 0.0 && c.mutation_prob <= 1.0)) {
        throw ValidationError("mutation probability must be in [0, 1]");
    }
    if (c.states == 0 || c.states > kMaxStates) throw ValidationError("machines have 1 to 4 states");
    validate(c.budget);
}

namespace {

constexpr std::uint64_t kFitnessStream = 0x666974;
constexpr std::uint64_t kRandomStream = 0x726e64;
constexpr std::uint64_t kBreedStream = 0x627264;

double checked_fitness(const FitnessFn& fn, const MachinePair& pair, std::uint64_t seed) {
    const double f = fn(pair, seed);
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("fitness must lie in [0, 1]");
    return f;
}

MachinePair random_pair(const EvolutionConfig& c, std::uint64_t seed) {
    Rng rng{seed};
    MachinePair pair;
    pair.client = random_machine(Endpoint::client, c.budget, rng, c.states);
    pair.relay = random_machine(Endpoint::relay, c.budget, rng, c.states);
    return pair;
}

void evaluate_missing(std::vector<Individual>& pop, const EvolutionConfig& c, const FitnessFn& fitness,
                      std::size_t generation) {
    parallel_for(
        pop.size(),
        [&](std::size_t i) {
            if (pop[i].fitness) return;
            pop[i].fitness = checked_fitness(fitness, pop[i].pair, derive_seed(c.seed, {kFitnessStream, generation, i}));
        },
        workers_of(c));
}

}  // namespace

std::vector<Individual> initial_population(const EvolutionConfig& c, const FitnessFn& fitness) {
    validate(c);
    std::vector<Individual> pop(c.population_size);
    for (std::size_t i = 0; i < pop.size(); ++i) pop[i].pair = random_pair(c, derive_seed(c.seed, {kRandomStream, 0, i}));
    evaluate_missing(pop, c, fitness, 0);
    return pop;
}

std::vector<std::size_t> rank_population(std::span<const Individual> population) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return population[a].fitness.value_or(-1.0) > population[b].fitness.value_or(-1.0);
    });
    return order;
}

std::vector<Individual> next_generation(std::span<const Individual> population, const EvolutionConfig& c,
                                        const FitnessFn& fitness, std::size_t generation) {
    validate(c);
    if (population.size() != c.population_size) throw ValidationError("population size does not match config");
    for (const auto& ind : population) {
        if (!ind.fitness) throw ValidationError("population must be evaluated before breeding");
    }
    std::vector<Individual> next;
    next.reserve(c.population_size);
    const auto order = rank_population(population);
    for (std::size_t e = 0; e < c.elite_count; ++e) next.push_back(population[order[e]]);
    for (std::size_t d = 0; d < c.diversity_count; ++d) {
        next.push_back({random_pair(c, derive_seed(c.seed, {kRandomStream, generation, d})), std::nullopt});
    }
    for (std::size_t slot = next.size(); slot < c.population_size; ++slot) {
        Rng rng{derive_seed(c.seed, {kBreedStream, generation, slot})};
        MachinePair child;
        {
            const auto& a = population[select_parent(population, rng)].pair.client;
            const auto& b = population[select_parent(population, rng)].pair.client;
            child.client = mutate(crossover(a, b, rng), c.mutation_prob, rng);
        }
        {
            const auto& a = population[select_parent(population, rng)].pair.relay;
            const auto& b = population[select_parent(population, rng)].pair.relay;
            child.relay = mutate(crossover(a, b, rng), c.mutation_prob, rng);
        }
        next.push_back({std::move(child), std::nullopt});
    }
    evaluate_missing(next, c, fitness, generation);
    return next;
}

FitnessFn make_recall_fitness(const Dataset& dataset, FoldPlan fold, Classifier& classifier,
                              SimulationOptions options, std::size_t length) {
    return [&dataset, fold, &classifier, options, length](const MachinePair& pair, std::uint64_t seed) {
        const auto defended = simulate_dataset(MachineSource::fixed(pair), dataset, seed, 1, options);
        const ScoreMatrix scores = classifier.classify(split_fold(to_sequences(defended, length), fold));
        return 1.0 - max_recall(scores);
    };
}

Evolution::Evolution(EvolutionConfig config, FitnessFn fitness, fs::path checkpoint_dir)
    : config_{std::move(config)}, fitness_{std::move(fitness)}, dir_{std::move(checkpoint_dir)} {
    population_ = initial_population(config_, fitness_);
    checkpoint();
}

Evolution::Evolution(EvolutionConfig config, FitnessFn fitness, fs::path checkpoint_dir,
                     std::vector<Individual> population, std::size_t generation)
    : config_{std::move(config)},
      fitness_{std::move(fitness)},
      dir_{std::move(checkpoint_dir)},
      population_{std::move(population)},
      generation_{generation} {}

namespace {

std::string generation_dir_name(std::size_t generation) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "gen-%04zu", generation);
    return buf;
}

std::string individual_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ind-%02zu.machine", index);
    return buf;
}

std::string format_fitness(double f) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, f);
    return std::string(buf, ptr);
}

}  // namespace

Evolution Evolution::resume(EvolutionConfig config, FitnessFn fitness, const fs::path& dir) {
    validate(config);
    std::istringstream state{read_text_file(dir / "state.txt")};
    std::string key;
    std::size_t generation = 0;
    if (!(state >> key >> generation) || key != "generation") {
        throw DataError("malformed checkpoint state in " + dir.string());
    }
    const fs::path gen_dir = dir / generation_dir_name(generation);
    std::vector<Individual> pop;
    std::istringstream table{read_text_file(gen_dir / "fitness.csv")};
    std::string line;
    std::getline(table, line);  // header
    while (std::getline(table, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("malformed fitness.csv in " + gen_dir.string());
        const std::size_t index = std::stoul(line.substr(0, comma));
        if (index != pop.size()) throw DataError("fitness.csv rows out of order in " + gen_dir.string());
        double f = 0;
        const std::string value = line.substr(comma + 1);
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), f);
        if (ec != std::errc{}) throw DataError("malformed fitness value in " + gen_dir.string());
        pop.push_back({parse_machine_spec(read_text_file(gen_dir / individual_file_name(index))), f});
    }
    if (pop.size() != config.population_size) throw DataError("checkpoint population does not match config");
    return Evolution{std::move(config), std::move(fitness), dir, std::move(pop), generation};
}

fs::path Evolution::individual_path(std::size_t index) const {
    if (dir_.empty()) return {};
    return dir_ / generation_dir_name(generation_) / individual_file_name(index);
}

void Evolution::checkpoint() {
    if (dir_.empty()) return;
    const fs::path gen_dir = dir_ / generation_dir_name(generation_);
    fs::create_directories(gen_dir);
    std::string table = "index,fitness\n";
    for (std::size_t i = 0; i < population_.size(); ++i) {
        write_text_file(individual_path(i), serialize_machine_spec(population_[i].pair));
        table += std::to_string(i) + ',' + format_fitness(*population_[i].fitness) + '\n';
    }
    write_text_file(gen_dir / "fitness.csv", table);
    write_text_file(dir_ / "state.txt", "generation " + std::to_string(generation_) + "\n");

    std::string log;
    if (fs::exists(dir_ / "evolution.log")) log = read_text_file(dir_ / "evolution.log");
    else log = "gen,best,mean,path\n";
    log += format_log_line(summary()) + '\n';
    write_text_file(dir_ / "evolution.log", log);
}

GenerationSummary Evolution::step() {
    population_ = next_generation(population_, config_, fitness_, generation_ + 1);
    ++generation_;
    checkpoint();
    return summary();
}

std::vector<GenerationSummary> Evolution::run(std::size_t generations) {
    std::vector<GenerationSummary> out;
    for (std::size_t g = 0; g < generations; ++g) out.push_back(step());
    return out;
}

const Individual& Evolution::best() const { return population_[rank_population(population_).front()]; }

GenerationSummary Evolution::summary() const {
    GenerationSummary s;
    s.generation = generation_;
    const std::size_t best_index = rank_population(population_).front();
    s.best = *population_[best_index].fitness;
    double sum = 0;
    for (const auto& ind : population_) sum += *ind.fitness;
    s.mean = sum / static_cast<double>(population_.size());
    s.best_path = individual_path(best_index);
    return s;
}

std::string format_log_line(const GenerationSummary& s) {
    return std::to_string(s.generation) + ',' + format_fitness(s.best) + ',' + format_fitness(s.mean) + ',' +
           s.best_path.string();
}

}  // namespace padwerk
