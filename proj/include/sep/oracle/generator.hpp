#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sep/core/config.hpp"
#include "sep/core/lattice.hpp"
#include "sep/dynamics/gillespie.hpp"

namespace sep::oracle {

using dynamics::Process;

/// Thrown when an exact computation would exceed its state-space cap.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxStates = std::size_t{1} << 20;

/// Enumeration of all configurations over a finite alphabet.
/// State index = sum_i digit(site i) * k^i, digit = position in `alphabet`.
class StateSpace {
 public:
  StateSpace(std::vector<Symbol> alphabet, std::size_t sites);

  std::size_t size() const { return size_; }
  std::size_t sites() const { return sites_; }
  std::span<const Symbol> alphabet() const { return alphabet_; }

  std::vector<Symbol> decode(std::size_t index) const;
  std::size_t encode(std::span<const Symbol> values) const;

 private:
  std::vector<Symbol> alphabet_;
  std::size_t sites_;
  std::size_t size_;
};

struct Transition {
  std::uint32_t target;
  double rate;
};

/// Sparse rate matrix Q: off-diagonal transitions per row, diagonal = -exit rate.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(std::vector<std::vector<Transition>> rows);

  std::size_t size() const { return rows_.size(); }
  std::span<const Transition> row(std::size_t i) const { return rows_[i]; }
  double exit_rate(std::size_t i) const { return exit_[i]; }
  double max_exit_rate() const { return max_exit_; }
  double rate(std::size_t i, std::size_t j) const;

  /// Incoming transitions of state j as (source, rate) in CSR form.
  std::span<const Transition> incoming(std::size_t j) const {
    return {in_.data() + in_start_[j], in_.data() + in_start_[j + 1]};
  }

 private:
  std::vector<std::vector<Transition>> rows_;
  std::vector<double> exit_;
  double max_exit_ = 0.0;
  std::vector<std::size_t> in_start_;
  std::vector<Transition> in_;
};

struct GeneratorOptions {
  double annihilation_rate = 2.0;
};

/// Generator of a lattice process on every configuration of the torus, with
/// its state enumeration.
struct ProcessGenerator {
  Process process;
  TorusLattice lattice;
  StateSpace space;
  GeneratorMatrix Q;
};

std::vector<Symbol> process_alphabet(Process p);

/// Builds Q by evaluating the generator formulas term by term on every state.
/// Throws ResourceLimit beyond kMaxStates states.
ProcessGenerator build_generator(Process p, const TorusLattice& lattice, const GeneratorOptions& opts = {});

}  // namespace sep::oracle
