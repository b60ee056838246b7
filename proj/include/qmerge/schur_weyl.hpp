#pragma once

// Young frames, isotypic projectors of (C^d)^{\otimes l} under S_l x U(d),
// and the entropy-estimating projective instrument built from them.

#include <cstddef>
#include <map>
#include <vector>

#include "qmerge/channels.hpp"
#include "qmerge/linalg.hpp"

namespace qmerge {

struct YoungFrame {
  std::vector<std::size_t> parts;  // nonincreasing, positive

  std::size_t boxes() const;
  std::size_t rows() const { return parts.size(); }
  friend auto operator<=>(const YoungFrame&, const YoungFrame&) = default;
};

// Partitions of l with at most d rows, in reverse lexicographic order
// ((l) first).
std::vector<YoungFrame> young_frames(std::size_t l, std::size_t d);

// Shannon entropy (bits) of the normalized row lengths.
double frame_entropy(const YoungFrame& f);

// S_l character chi_lambda at cycle type mu (Murnaghan-Nakayama).
long long sn_character(const YoungFrame& lambda, const std::vector<std::size_t>& cycle_type);
// dim of the S_l irrep (hook length formula, exact).
std::size_t sn_dimension(const YoungFrame& lambda);
// dim of the U(d) irrep (Weyl formula, exact).
std::size_t weyl_dimension(const YoungFrame& lambda, std::size_t d);

// All isotypic projectors of (C^d)^{\otimes l}, stored blockwise: every
// projector is block diagonal in the type (symbol-count) decomposition of
// the computational basis.
class IsotypicDecomposition {
 public:
  IsotypicDecomposition(std::size_t l, std::size_t d, const NumericConfig& cfg = default_config());

  std::size_t blocklength() const { return l_; }
  std::size_t local_dim() const { return d_; }
  std::size_t total_dim() const { return n_; }
  const std::vector<YoungFrame>& frames() const { return frames_; }

  Matrix projector(const YoungFrame& f) const;  // dense d^l x d^l
  std::size_t rank(const YoungFrame& f) const;
  // tr(P_lambda m) for a d^l x d^l matrix, using only the diagonal blocks.
  double trace_with(const YoungFrame& f, const Matrix& m) const;

 private:
  struct Block {
    std::vector<std::size_t> basis;                 // full indices
    std::map<YoungFrame, Eigen::MatrixXd> vectors;  // orthonormal columns per frame
  };

  std::size_t index_of(const YoungFrame& f) const;

  std::size_t l_;
  std::size_t d_;
  std::size_t n_;
  std::vector<YoungFrame> frames_;
  std::vector<Block> blocks_;
};

// P_{lambda,l}; prefer IsotypicDecomposition when several frames are needed.
Matrix isotypic_projector(const YoungFrame& f, std::size_t l, std::size_t d,
                          const NumericConfig& cfg = default_config());

// s_0 = 0 < s_1 < ... < s_N = log2 d with s_i = i * eta for i < N.
// Bins (1-based): I_1 = [s_0, s_1], I_i = (s_{i-1}, s_i] for i >= 2.
struct EntropyBinning {
  std::size_t l = 1;
  std::size_t d = 2;
  double eta = 1.0;
  std::vector<double> boundaries;  // s_0 .. s_N

  std::size_t bins() const { return boundaries.size() - 1; }
  double lower(std::size_t bin) const { return boundaries.at(bin - 1); }
  double upper(std::size_t bin) const { return boundaries.at(bin); }
  std::size_t bin_of(double entropy) const;
};

EntropyBinning make_binning(std::size_t l, std::size_t d, double eta);

struct EntropyBin {
  std::size_t index = 0;  // 1-based bin number in the binning
  double lo = 0.0;
  double hi = 0.0;
  std::vector<YoungFrame> frames;
  std::size_t rank = 0;
};

struct EntropyInstrument {
  EntropyBinning binning;
  std::vector<EntropyBin> bins;     // nonempty bins only, increasing index
  std::vector<Matrix> projectors;   // p_i, aligned with `bins`

  // Projective instrument {p_i (.) p_i} on (C^d)^{\otimes l}.
  Instrument instrument(const NumericConfig& cfg = default_config()) const;
  // Position in `bins` of a bin index, or bins.size() when that bin is empty.
  std::size_t position_of(std::size_t bin_index) const;
};

EntropyInstrument build_entropy_instrument(std::size_t l, std::size_t d, double eta,
                                           const NumericConfig& cfg = default_config());

// tr((p_i (x) id_B) rho^{\otimes l}) per nonempty bin, where the instrument
// acts on the A factors of each copy. Aligned with inst.bins.
std::vector<double> bin_probabilities(const EntropyInstrument& inst, const State& rho,
                                      const NumericConfig& cfg = default_config());

// Mass outside the neighbourhood {j : |j - i| <= 1} of bin i.
double misbin_probability(const EntropyInstrument& inst, const State& rho, std::size_t true_bin,
                          const NumericConfig& cfg = default_config());
// Same with i = bin of S(rho_A).
double misbin_probability(const EntropyInstrument& inst, const State& rho,
                          const NumericConfig& cfg = default_config());

}  // namespace qmerge
