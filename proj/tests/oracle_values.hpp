#pragma once

// Reference values from tests/oracles/dither_oracle.py (mpmath, 50 digits).

namespace oracle {

// a = 0.2, omega = 10, L = 1
inline constexpr double kPublished_A = 0.13555114132444138402;
inline constexpr double kPublished_phi = -1.461794394096422213;
inline constexpr double kPublished_B = 9.3316150030768803786;
inline constexpr double kConsistent_A = 0.13481635708410034943;
inline constexpr double kConsistent_phi = -1.439605539764569716;
inline constexpr double kConsistent_B = 9.3824747339692788844;

// a = 0.2, omega = 10, L = 2 (psi2 < 0 branch)
inline constexpr double kPublishedL2_A = 0.014450613208535632364;
inline constexpr double kPublishedL2_psi = 3.6866774719886635267;
inline constexpr double kPublishedL2_B = 87.533383242186494471;
inline constexpr double kConsistentL2_A = 0.014447269528334358983;
inline constexpr double kConsistentL2_B = 87.553641993497484789;
inline constexpr double kConsistentL2_psi_atan2 = -2.5963872099211462383;

// omega = 25, L = 1
inline constexpr double kPublishedW25_A_a01 = 0.029125739475930435291;
inline constexpr double kPublishedW25_phi = -2.7495340489483476205;
inline constexpr double kPublishedW25_B = 34.333892220192446633;
inline constexpr double kConsistentW25_A_a01 = 0.029160657101142772643;
inline constexpr double kConsistentW25_A_a02 = 0.058321314202285545287;
inline constexpr double kConsistentW25_phi = -2.7507381574674768079;
inline constexpr double kConsistentW25_B = 34.292780047155081053;

inline constexpr double kS0_consistent = 0.45454844400256775851;
inline constexpr double kS0_rounded_constants = 0.4473722832740576639;   // A = 0.1356, phi = -1.4618
inline constexpr double kPublishedIdentityResidual = 0.004581131386;

// kernel, Kbar = -0.4, L = 1
inline constexpr double kGammaHalf = -0.4713318723175849613;
inline constexpr double kGammaZero = -0.49592202704383515261;
inline constexpr double kMomentGGamma = -0.15878881344964533832;
inline constexpr double kVarthetaZ1 = 1.1587888134496453383;

}  // namespace oracle
