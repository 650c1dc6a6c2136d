#pragma once
// Sparse multi-photon state vectors over labeled time-bin slots, the Bell
// basis algebra used to rewrite a two-pair product state into joint BC /
// AD branches, and the Werner-state visibility/fidelity bookkeeping.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "swapsim/types.hpp"

namespace swapsim {

/// Finitely supported complex amplitude map over basis kets sharing one
/// label set.  Amplitudes below kAmplitudePrune are dropped.
class StateVector {
 public:
  using AmplitudeMap = std::map<BasisKet, cplx>;

  StateVector() = default;
  explicit StateVector(std::uint8_t label_mask) : labels_(label_mask) {}

  /// State with a single basis ket; the label set is taken from the ket.
  static StateVector single(const BasisKet& ket, cplx amp = 1.0);

  std::uint8_t labels() const { return labels_; }
  bool has_label(PhotonLabel l) const { return labels_ & (1u << static_cast<int>(l)); }
  bool is_empty() const { return amps_.empty(); }
  std::size_t term_count() const { return amps_.size(); }
  const AmplitudeMap& amplitudes() const { return amps_; }

  cplx amplitude(const BasisKet& ket) const {
    const auto it = amps_.find(ket);
    return it == amps_.end() ? cplx{0.0, 0.0} : it->second;
  }

  /// Accumulate amplitude onto a ket.  The ket's label set must match the
  /// state's label set.
  void add(const BasisKet& ket, cplx amp);

  double norm2() const;
  void normalize();  // throws std::domain_error on an empty state
  void scale(cplx factor);
  void prune(double threshold = kAmplitudePrune);

  /// <this|other>; both states must share the same label set.
  cplx inner_product(const StateVector& other) const;

 private:
  std::uint8_t labels_ = 0;
  AmplitudeMap amps_;
};

/// |<s|t>|^2 for normalized pure states; insensitive to global phase.
double fidelity_pure(const StateVector& s, const StateVector& t);

/// Tensor product of states over disjoint label sets.
StateVector tensor(const StateVector& s, const StateVector& t);

enum class BellFamily : std::uint8_t { phi_plus, phi_minus, psi_plus, psi_minus };

constexpr const char* to_string(BellFamily f) {
  switch (f) {
    case BellFamily::phi_plus: return "phi_plus";
    case BellFamily::phi_minus: return "phi_minus";
    case BellFamily::psi_plus: return "psi_plus";
    case BellFamily::psi_minus: return "psi_minus";
  }
  return "?";
}

/// Bell state designator.  The phase parameter is meaningful for the phi
/// family only, where phi(+-) = (|0,0> +- e^{i phase} |1,1>)/sqrt(2); it is
/// stored reduced modulo 2*pi.  phi_minus(phase) equals phi_plus(phase+pi).
struct BellKind {
  BellFamily family = BellFamily::phi_plus;
  double phase = 0.0;
};

/// Two-photon Bell state on the given ordered label pair.  For the psi
/// family, |1,0> puts `first` in the late bin.
StateVector bell_state(const BellKind& kind, PhotonLabel first, PhotonLabel second);

/// One branch of a Bell-basis rewrite: the BC Bell component, its real
/// non-negative amplitude, and the normalized companion AD state (which
/// carries any relative phase).  A zero-probability branch has amplitude 0
/// and an empty companion state.
struct BellBranch {
  BellKind kind;
  double amplitude = 0.0;
  StateVector companion;
};

/// Rewrite a four-photon state as sum_k amplitude_k * bell_k(pair) (x)
/// companion_k.  Branches are returned in the fixed order phi_plus,
/// phi_minus, psi_plus, psi_minus.  The projected pair must occupy home
/// modes with bins in {0, 1}.
std::array<BellBranch, 4> bell_decompose(const StateVector& s,
                                         PhotonLabel first = PhotonLabel::B,
                                         PhotonLabel second = PhotonLabel::C);

/// Projection onto the kets selected by `keep`.  Returns the probability
/// relative to the input norm and the renormalized projected state (empty
/// sentinel when the probability is zero).
struct Projection {
  double probability = 0.0;
  StateVector state;
};
Projection project(const StateVector& s, const std::function<bool(const BasisKet&)>& keep);

/// 4x4 density matrix of a photon pair in the time-bin basis, ordered
/// |0,0>, |0,1>, |1,0>, |1,1>.
struct DensityMatrix {
  std::array<std::array<cplx, 4>, 4> m{};

  cplx trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }
  bool is_hermitian(double tol = 1e-12) const;
};

/// Werner mixture V |psi+><psi+| + (1-V)/4 * identity, V in [0, 1].
DensityMatrix werner_state(double visibility);

/// <psi+| rho |psi+>.
double psi_plus_overlap(const DensityMatrix& rho);

/// Two-photon interference visibility of a Werner state from its fidelity
/// to |psi+>, F in [1/4, 1]:  V = (4F - 1)/3.
double visibility_from_fidelity(double fidelity);

/// Inverse map, V in [0, 1]:  F = (3V + 1)/4.
double fidelity_from_visibility(double visibility);

enum class EntanglementClass : std::uint8_t {
  separable_compatible,  // V <= 1/3: a separable model exists
  entangled,             // 1/3 < V <= 1/sqrt(2)
  bell_violating,        // V > 1/sqrt(2)
};

constexpr const char* to_string(EntanglementClass c) {
  switch (c) {
    case EntanglementClass::separable_compatible: return "separable_compatible";
    case EntanglementClass::entangled: return "entangled";
    case EntanglementClass::bell_violating: return "bell_violating";
  }
  return "?";
}

EntanglementClass classify_entanglement(double visibility);

}  // namespace swapsim
