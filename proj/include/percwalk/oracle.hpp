#pragma once

// Brute-force dense-matrix evolution. Slow (O(d^2) per step, O(d^4) for two
// walkers); exists only to cross-check the permutation kernels.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "evolution.hpp"
#include "lattice.hpp"
#include "state.hpp"
#include "twowalker.hpp"

namespace percwalk::oracle {

inline Eigen::Index basis_index(int radius, int x, Coin c) { return 2 * (x + radius) + static_cast<int>(c); }

/// Percolated shift assembled site by site from the four local operators
/// S, S+, S-, S+- according to which neighbouring bonds are present.
inline Eigen::MatrixXcd dense_shift_matrix(const BondConfig& cfg) {
  const int r = cfg.window_radius();
  const Eigen::Index dim = 2 * (2 * r + 1);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  auto put = [&](int to_x, Coin to_c, int from_x, Coin from_c) {
    s(basis_index(r, to_x, to_c), basis_index(r, from_x, from_c)) += 1.0;
  };
  for (int i = -r; i <= r; ++i) {
    const bool next = cfg.present(i);      // bond (i, i+1)
    const bool prev = cfg.present(i - 1);  // bond (i-1, i)
    if (next && prev) {  // S
      put(i + 1, Coin::Up, i, Coin::Up);
      put(i - 1, Coin::Down, i, Coin::Down);
    } else if (!next && prev) {  // S+
      put(i, Coin::Down, i, Coin::Up);
      put(i - 1, Coin::Down, i, Coin::Down);
    } else if (next && !prev) {  // S-
      put(i + 1, Coin::Up, i, Coin::Up);
      put(i, Coin::Up, i, Coin::Down);
    } else {  // S+-
      put(i, Coin::Down, i, Coin::Up);
      put(i, Coin::Up, i, Coin::Down);
    }
  }
  return s;
}

inline Eigen::MatrixXcd dense_coin_matrix(int radius) {
  Eigen::Matrix2cd h;
  h << 1.0, 1.0, 1.0, -1.0;
  h *= M_SQRT1_2;
  const Eigen::Index sites = 2 * radius + 1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
  for (Eigen::Index x = 0; x < sites; ++x) out.block<2, 2>(2 * x, 2 * x) = h;
  return out;
}

/// One step S (1 (x) H) as an explicit matrix of dimension 2(2R+1).
inline Eigen::MatrixXcd dense_step_matrix(const BondConfig& cfg) {
  return dense_shift_matrix(cfg) * dense_coin_matrix(cfg.window_radius());
}

inline Eigen::VectorXcd to_vector(const WalkerState& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.size()));
  auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a[k];
  return v;
}

inline WalkerState from_vector(const Eigen::VectorXcd& v, int radius) {
  WalkerState s(radius);
  auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = v(static_cast<Eigen::Index>(k));
  return s;
}

inline WalkerState dense_evolve(const WalkerState& s, const LatticeSequence& seq) {
  Eigen::VectorXcd v = to_vector(s);
  for (int k = 0; k < seq.steps; ++k) v = dense_step_matrix(seq.config_for_step(k)) * v;
  return from_vector(v, s.window_radius());
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Full-tensor two-walker evolution under explicit U (x) U matrices, measured
/// with the exchange-symmetric projectors (|ij><ij| + |ji><ji|)/2.
inline JointDistribution dense_joint_distribution(const TwoWalkerInput& in, const LatticeSequence& seq) {
  const int r = in.window_radius();
  const Eigen::VectorXcd a = to_vector(in.psi1);
  const Eigen::VectorXcd b = to_vector(in.psi2);
  Eigen::VectorXcd psi;
  switch (in.kind) {
    case PairKind::ClassicalSeparable: psi = kron(a, b); break;
    case PairKind::BosonSym: psi = kron(a, b) + kron(b, a); break;
    case PairKind::FermionSym: psi = kron(a, b) - kron(b, a); break;
  }
  const double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("two-walker input vanishes");
  psi /= n;

  for (int k = 0; k < seq.steps; ++k) {
    const Eigen::MatrixXcd u = dense_step_matrix(seq.config_for_step(k));
    psi = kron(u, u) * psi;
  }

  const Eigen::Index d = 2 * (2 * r + 1);
  auto amp = [&](int i, Coin c, int j, Coin e) { return psi(basis_index(r, i, c) * d + basis_index(r, j, e)); };
  JointDistribution out(r);
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      double s = 0.0;
      for (Coin c : {Coin::Up, Coin::Down}) {
        for (Coin e : {Coin::Up, Coin::Down}) s += 0.5 * (std::norm(amp(i, c, j, e)) + std::norm(amp(j, c, i, e)));
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

}  // namespace percwalk::oracle
