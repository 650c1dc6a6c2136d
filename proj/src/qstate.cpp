#include "swapsim/qstate.hpp"

#include <cmath>
#include <numbers>

namespace swapsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

StateVector StateVector::single(const BasisKet& ket, cplx amp) {
  StateVector s(ket.label_mask());
  s.add(ket, amp);
  return s;
}

void StateVector::add(const BasisKet& ket, cplx amp) {
  require(ket.label_mask() == labels_, "ket label set does not match state label set");
  auto [it, inserted] = amps_.try_emplace(ket, amp);
  if (!inserted) it->second += amp;
  if (std::abs(it->second) < kAmplitudePrune) amps_.erase(it);
}

double StateVector::norm2() const {
  double n = 0.0;
  for (const auto& [ket, amp] : amps_) n += std::norm(amp);
  return n;
}

void StateVector::normalize() {
  const double n2 = norm2();
  if (n2 <= 0.0) throw std::domain_error("cannot normalize an empty state");
  scale(1.0 / std::sqrt(n2));
}

void StateVector::scale(cplx factor) {
  for (auto& [ket, amp] : amps_) amp *= factor;
  prune();
}

void StateVector::prune(double threshold) {
  for (auto it = amps_.begin(); it != amps_.end();) {
    if (std::abs(it->second) < threshold)
      it = amps_.erase(it);
    else
      ++it;
  }
}

cplx StateVector::inner_product(const StateVector& other) const {
  require(labels_ == other.labels_, "inner product requires matching label sets");
  // Iterate the smaller support.
  const StateVector& a = term_count() <= other.term_count() ? *this : other;
  const StateVector& b = term_count() <= other.term_count() ? other : *this;
  cplx acc = 0.0;
  for (const auto& [ket, amp] : a.amplitudes()) {
    const cplx other_amp = b.amplitude(ket);
    if (&a == this)
      acc += std::conj(amp) * other_amp;
    else
      acc += std::conj(other_amp) * amp;
  }
  return acc;
}

double fidelity_pure(const StateVector& s, const StateVector& t) {
  return std::norm(s.inner_product(t));
}

StateVector tensor(const StateVector& s, const StateVector& t) {
  require((s.labels() & t.labels()) == 0, "tensor factors share a photon label");
  StateVector out(static_cast<std::uint8_t>(s.labels() | t.labels()));
  for (const auto& [ks, as] : s.amplitudes()) {
    for (const auto& [kt, at] : t.amplitudes()) {
      BasisKet k = ks;
      for (auto l : kAllLabels)
        if (kt.has(l)) k.set(l, kt.slot(l));
      out.add(k, as * at);
    }
  }
  return out;
}

StateVector bell_state(const BellKind& kind, PhotonLabel first, PhotonLabel second) {
  require(first != second, "Bell state needs two distinct photon labels");
  StateVector s(static_cast<std::uint8_t>((1u << static_cast<int>(first)) |
                                          (1u << static_cast<int>(second))));
  const double phase = wrap_angle(kind.phase);
  switch (kind.family) {
    case BellFamily::phi_plus:
    case BellFamily::phi_minus: {
      const cplx late = std::polar(kInvSqrt2, phase) *
                        (kind.family == BellFamily::phi_plus ? 1.0 : -1.0);
      s.add(make_ket({{first, 0}, {second, 0}}), kInvSqrt2);
      s.add(make_ket({{first, 1}, {second, 1}}), late);
      break;
    }
    case BellFamily::psi_plus:
    case BellFamily::psi_minus: {
      const double sign = kind.family == BellFamily::psi_plus ? 1.0 : -1.0;
      s.add(make_ket({{first, 1}, {second, 0}}), kInvSqrt2);
      s.add(make_ket({{first, 0}, {second, 1}}), sign * kInvSqrt2);
      break;
    }
  }
  return s;
}

std::array<BellBranch, 4> bell_decompose(const StateVector& s, PhotonLabel first,
                                         PhotonLabel second) {
  require(s.has_label(first) && s.has_label(second),
          "state does not contain the projected photon pair");
  for (const auto& [ket, amp] : s.amplitudes()) {
    (void)amp;
    const Slot a = ket.slot(first);
    const Slot b = ket.slot(second);
    require(a.mode == home_mode(first) && b.mode == home_mode(second),
            "projected pair must occupy home modes");
    require(a.bin <= 1 && b.bin <= 1, "projected pair must occupy bins 0 or 1");
  }

  constexpr std::array<BellFamily, 4> kOrder = {BellFamily::phi_plus, BellFamily::phi_minus,
                                                BellFamily::psi_plus, BellFamily::psi_minus};
  const std::uint8_t rest_mask = static_cast<std::uint8_t>(
      s.labels() & ~((1u << static_cast<int>(first)) | (1u << static_cast<int>(second))));

  std::array<BellBranch, 4> branches;
  for (std::size_t i = 0; i < kOrder.size(); ++i) {
    const BellKind kind{kOrder[i], 0.0};
    const StateVector basis = bell_state(kind, first, second);
    StateVector rest(rest_mask);
    for (const auto& [ket, amp] : s.amplitudes()) {
      const BasisKet pair_part =
          make_ket({{first, ket.bin(first)}, {second, ket.bin(second)}});
      const cplx basis_amp = basis.amplitude(pair_part);
      if (basis_amp == cplx{0.0, 0.0}) continue;
      rest.add(ket.without(first).without(second), std::conj(basis_amp) * amp);
    }
    BellBranch& br = branches[i];
    br.kind = kind;
    const double n2 = rest.norm2();
    br.amplitude = std::sqrt(n2);
    if (br.amplitude >= kAmplitudePrune) {
      rest.scale(1.0 / br.amplitude);
      br.companion = rest;
    } else {
      br.amplitude = 0.0;
      br.companion = StateVector(rest_mask);
    }
  }
  return branches;
}

Projection project(const StateVector& s, const std::function<bool(const BasisKet&)>& keep) {
  StateVector kept(s.labels());
  for (const auto& [ket, amp] : s.amplitudes())
    if (keep(ket)) kept.add(ket, amp);
  Projection p;
  const double n2 = kept.norm2();
  const double total = s.norm2();
  p.probability = total > 0.0 ? n2 / total : 0.0;
  if (n2 > 0.0) {
    kept.scale(1.0 / std::sqrt(n2));
    p.state = kept;
  } else {
    p.state = StateVector(s.labels());
  }
  return p;
}

bool DensityMatrix::is_hermitian(double tol) const {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(m[i][j] - std::conj(m[j][i])) > tol) return false;
  return true;
}

DensityMatrix werner_state(double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::domain_error("Werner visibility must lie in [0, 1]");
  DensityMatrix rho;
  const double iso = (1.0 - visibility) / 4.0;
  for (int i = 0; i < 4; ++i) rho.m[i][i] = iso;
  // |psi+> = (|0,1> + |1,0>)/sqrt(2) occupies basis slots 1 and 2.
  rho.m[1][1] += visibility / 2.0;
  rho.m[2][2] += visibility / 2.0;
  rho.m[1][2] += visibility / 2.0;
  rho.m[2][1] += visibility / 2.0;
  return rho;
}

double psi_plus_overlap(const DensityMatrix& rho) {
  const cplx v = 0.5 * (rho.m[1][1] + rho.m[1][2] + rho.m[2][1] + rho.m[2][2]);
  return v.real();
}

double visibility_from_fidelity(double fidelity) {
  if (fidelity < 0.25 || fidelity > 1.0)
    throw std::domain_error("psi+ fidelity must lie in [1/4, 1]");
  return (4.0 * fidelity - 1.0) / 3.0;
}

double fidelity_from_visibility(double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::domain_error("visibility must lie in [0, 1]");
  return (3.0 * visibility + 1.0) / 4.0;
}

EntanglementClass classify_entanglement(double visibility) {
  if (visibility > kBellVisibilityBound) return EntanglementClass::bell_violating;
  if (visibility > kPeresVisibilityBound) return EntanglementClass::entangled;
  return EntanglementClass::separable_compatible;
}

}  // namespace swapsim
